//! Hybrid user-based collaborative filtering.
//!
//! The recommender runs in two phases. Offline, users of a training matrix are
//! grouped with fuzzy c-means and each user is pinned to one cluster by
//! center-of-gravity defuzzification. Online, neighbours are drawn from the
//! active user's cluster, ranked by a pluggable similarity measure (NHSM or one
//! of the Pearson-family / cosine baselines), and combined into a rating
//! prediction that can additionally be weighted by the resource-allocation
//! index of the user pair.
//!
//! [`evaluation`] wraps all of this in a k-fold cross-validation harness that
//! reports MAE, accuracy, precision and recall over Top-N lists.

pub mod clustering;
pub mod error;
pub mod evaluation;
pub mod prediction;
pub mod ratings;
pub mod reliability;
pub mod similarity;

pub use clustering::{defuzzify_cog, fit_fcm, ClusterModel, FcmConfig};
pub use error::{Error, Result};
pub use evaluation::{
    run_experiment, AveragingMode, ConfusionMatrix, EvalProtocol, EvaluationReport, Method,
    MethodConfig, Metrics,
};
pub use prediction::{Prediction, PredictorConfig, RecommendationList, Recommender};
pub use ratings::{
    k_fold_split, load_movielens, FoldSplit, ItemId, ItemStats, Rating, RatingScale, RatingsMatrix,
    UserId, UserStats,
};
pub use reliability::resource_allocation;
pub use similarity::{nhsm_sim, SimilarityMeasure};
