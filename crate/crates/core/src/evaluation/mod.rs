//! Top-N classification metrics and the k-fold cross-validation harness.
//!
//! For every user the candidate set is that user's held-out test items. The
//! items are ranked by predicted rating; an item is predicted-positive when
//! it lands in the Top-N *and* its prediction reaches the relevance
//! threshold, and actual-positive when its true rating reaches the threshold.
//! MAE is taken over the Top-N items only.

mod report;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clustering::{fit_fcm, ClusterModel, FcmConfig};
use crate::error::{Error, Result};
use crate::prediction::{rank_predictions, PredictorConfig, Recommender};
use crate::ratings::{k_fold_split, Entry, FoldSplit, ItemId, Rating, RatingsMatrix};
use crate::reliability::reliability_table;
use crate::similarity::{PairTable, SimilarityMeasure, DEFAULT_GAMMA};

pub use report::{render_csv, render_table, ReportHeader};

/// Table-1 style counts. `A`/`B`/`C`/`D` in the usual notation are
/// true-negative, false-positive, false-negative and true-positive.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub true_negative: u64,
    pub false_positive: u64,
    pub false_negative: u64,
    pub true_positive: u64,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.true_negative + self.false_positive + self.false_negative + self.true_positive
    }

    pub fn merge(&mut self, other: &ConfusionMatrix) {
        self.true_negative += other.true_negative;
        self.false_positive += other.false_positive;
        self.false_negative += other.false_negative;
        self.true_positive += other.true_positive;
    }
}

/// Metrics of one evaluation cell. Accuracy, precision and recall are
/// percentages; precision and recall are `None` when their denominator is
/// zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub mae: f64,
    pub accuracy: f64,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AveragingMode {
    /// Pool confusion counts and absolute errors over all users, then divide.
    Micro,
    /// Compute metrics per user, then average over users.
    Macro,
}

impl fmt::Display for AveragingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AveragingMode::Micro => "micro",
            AveragingMode::Macro => "macro",
        })
    }
}

impl FromStr for AveragingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "micro" => Ok(AveragingMode::Micro),
            "macro" => Ok(AveragingMode::Macro),
            other => Err(Error::param(format!("unknown averaging mode {other:?}"))),
        }
    }
}

/// Which of a user's test items enter the confusion matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EvaluationScope {
    /// Every test item; items outside the Top-N are predicted-negative.
    TestSet,
    /// Only the Top-N items; each is predicted-positive iff its prediction
    /// reaches the threshold.
    TopNList,
}

impl fmt::Display for EvaluationScope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EvaluationScope::TestSet => "test-set",
            EvaluationScope::TopNList => "top-n-list",
        })
    }
}

impl FromStr for EvaluationScope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "test-set" => Ok(EvaluationScope::TestSet),
            "top-n-list" => Ok(EvaluationScope::TopNList),
            other => Err(Error::param(format!("unknown evaluation scope {other:?}"))),
        }
    }
}

/// Test items of one user joined with their predictions, in ranking order.
struct RankedUser {
    /// (predicted, actual), best prediction first.
    ranked: Vec<(f64, Rating)>,
}

impl RankedUser {
    fn new(test: &[(ItemId, Rating)], predictions: &[(ItemId, f64)]) -> Result<Self> {
        if test.is_empty() {
            return Err(Error::Protocol("user has no test ratings".into()));
        }
        if test.len() != predictions.len() {
            return Err(Error::Protocol(format!(
                "{} test items but {} predictions",
                test.len(),
                predictions.len()
            )));
        }
        let mut actual: Vec<(ItemId, Rating)> = test.to_vec();
        actual.sort_unstable_by_key(|e| e.0);
        if actual.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Protocol("duplicate test item".into()));
        }
        let mut predicted_ids: Vec<ItemId> = predictions.iter().map(|e| e.0).collect();
        predicted_ids.sort_unstable();
        if predicted_ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Protocol("duplicate predicted item".into()));
        }
        let mut ranked_items = predictions.to_vec();
        rank_predictions(&mut ranked_items);
        let ranked = ranked_items
            .into_iter()
            .map(|(item, predicted)| {
                actual
                    .binary_search_by_key(&item, |e| e.0)
                    .map(|pos| (predicted, actual[pos].1))
                    .map_err(|_| {
                        Error::Protocol(format!("prediction for item {item} has no test rating"))
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(RankedUser { ranked })
    }

    fn confusion(&self, n: usize, threshold: Rating, scope: EvaluationScope) -> ConfusionMatrix {
        let t = threshold as f64;
        let mut cm = ConfusionMatrix::default();
        let considered = match scope {
            EvaluationScope::TestSet => &self.ranked[..],
            EvaluationScope::TopNList => &self.ranked[..n.min(self.ranked.len())],
        };
        for (rank, &(predicted, actual)) in considered.iter().enumerate() {
            let predicted_pos = rank < n && predicted >= t;
            let actual_pos = actual >= threshold;
            match (actual_pos, predicted_pos) {
                (false, false) => cm.true_negative += 1,
                (false, true) => cm.false_positive += 1,
                (true, false) => cm.false_negative += 1,
                (true, true) => cm.true_positive += 1,
            }
        }
        cm
    }

    fn absolute_error(&self, n: usize) -> (f64, usize) {
        let top = &self.ranked[..n.min(self.ranked.len())];
        let sum = top.iter().map(|&(p, a)| (p - a as f64).abs()).sum();
        (sum, top.len())
    }
}

pub fn classify_top_n(
    test: &[(ItemId, Rating)],
    predictions: &[(ItemId, f64)],
    n: usize,
    threshold: Rating,
) -> Result<ConfusionMatrix> {
    Ok(RankedUser::new(test, predictions)?.confusion(n, threshold, EvaluationScope::TestSet))
}

/// Like [`classify_top_n`] but counting only the user's Top-`n` items.
pub fn classify_top_n_list(
    test: &[(ItemId, Rating)],
    predictions: &[(ItemId, f64)],
    n: usize,
    threshold: Rating,
) -> Result<ConfusionMatrix> {
    Ok(RankedUser::new(test, predictions)?.confusion(n, threshold, EvaluationScope::TopNList))
}

/// Sum of absolute errors over the user's Top-`n` test items, and how many
/// items that was.
pub fn mae_over_top_n(
    test: &[(ItemId, Rating)],
    predictions: &[(ItemId, f64)],
    n: usize,
) -> Result<(f64, usize)> {
    Ok(RankedUser::new(test, predictions)?.absolute_error(n))
}

pub fn compute_metrics(cm: &ConfusionMatrix, mae_sum: f64, mae_count: usize) -> Result<Metrics> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::Protocol("empty confusion matrix".into()));
    }
    let pct = |num: u64, den: u64| (den > 0).then(|| 100.0 * num as f64 / den as f64);
    Ok(Metrics {
        mae: if mae_count > 0 {
            mae_sum / mae_count as f64
        } else {
            0.0
        },
        accuracy: 100.0 * (cm.true_negative + cm.true_positive) as f64 / total as f64,
        precision: pct(cm.true_positive, cm.false_positive + cm.true_positive),
        recall: pct(cm.true_positive, cm.false_negative + cm.true_positive),
    })
}

/// The methods compared by the harness. All of them confine neighbours to
/// the active user's fuzzy cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    /// NHSM similarity weighted by resource-allocation reliability.
    Fcnhsmra,
    /// NHSM similarity alone.
    Fnhsm,
    Pearson,
    Cosine,
    McLaughlin,
    Herlocker,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Fcnhsmra,
        Method::Fnhsm,
        Method::Pearson,
        Method::Cosine,
        Method::McLaughlin,
        Method::Herlocker,
    ];

    /// Display name used in report tables.
    pub fn label(&self) -> &'static str {
        match self {
            Method::Fcnhsmra => "FCNHSMRA_HRS",
            Method::Fnhsm => "FNHSM_HRS",
            Method::Pearson => "F_CF Pearson",
            Method::Cosine => "F_CF Cosine",
            Method::McLaughlin => "F_MW",
            Method::Herlocker => "F_HW",
        }
    }

    /// Short command-line key.
    pub fn key(&self) -> &'static str {
        match self {
            Method::Fcnhsmra => "fcnhsmra",
            Method::Fnhsm => "fnhsm",
            Method::Pearson => "pearson",
            Method::Cosine => "cosine",
            Method::McLaughlin => "mw",
            Method::Herlocker => "hw",
        }
    }

    pub fn measure(&self) -> SimilarityMeasure {
        match self {
            Method::Fcnhsmra | Method::Fnhsm => SimilarityMeasure::Nhsm,
            Method::Pearson => SimilarityMeasure::Pearson,
            Method::Cosine => SimilarityMeasure::Cosine,
            Method::McLaughlin => SimilarityMeasure::McLaughlinWeighted {
                gamma: DEFAULT_GAMMA,
            },
            Method::Herlocker => SimilarityMeasure::HerlockerWeighted {
                gamma: DEFAULT_GAMMA,
            },
        }
    }

    pub fn config(&self, neighbor_count: usize, clamp_predictions: bool) -> MethodConfig {
        MethodConfig {
            method: *self,
            predictor: PredictorConfig {
                neighbor_count,
                measure: self.measure(),
                use_reliability: *self == Method::Fcnhsmra,
                clamp_predictions,
            },
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        Method::ALL
            .into_iter()
            .find(|m| m.key() == lower || m.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::param(format!("unknown method {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MethodConfig {
    pub method: Method,
    pub predictor: PredictorConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalProtocol {
    pub top_n_values: Vec<usize>,
    pub relevance_threshold: Rating,
    pub folds: usize,
    pub repetitions: usize,
    pub seed: u64,
    pub averaging: AveragingMode,
    pub scope: EvaluationScope,
    /// Clustering settings; the seed field is ignored in favour of
    /// [`fcm_seed`].
    pub clustering: FcmConfig,
}

impl Default for EvalProtocol {
    fn default() -> Self {
        EvalProtocol {
            top_n_values: vec![5, 10, 15, 20, 30],
            relevance_threshold: 3,
            folds: 5,
            repetitions: 5,
            seed: 42,
            averaging: AveragingMode::Micro,
            scope: EvaluationScope::TestSet,
            clustering: FcmConfig::default(),
        }
    }
}

impl EvalProtocol {
    pub fn validate(&self) -> Result<()> {
        if self.top_n_values.is_empty() {
            return Err(Error::param("at least one Top-N value is required"));
        }
        if self.top_n_values[0] == 0 || self.top_n_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::param(
                "Top-N values must be positive and strictly increasing",
            ));
        }
        if self.folds < 2 {
            return Err(Error::param("at least two folds are required"));
        }
        if self.repetitions == 0 {
            return Err(Error::param("at least one repetition is required"));
        }
        self.clustering.validate()
    }
}

/// FCM seed for one (fold, repetition) cell, derived from the protocol seed
/// with a splitmix64 step so neighbouring cells get unrelated streams.
pub fn fcm_seed(protocol_seed: u64, fold: usize, repetition: usize) -> u64 {
    let mut z = protocol_seed
        ^ ((fold as u64) << 32)
        ^ (repetition as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Metric means for one Top-N value (or across Top-N values).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub mae: f64,
    pub accuracy: f64,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
}

impl MetricSummary {
    /// Arithmetic mean of each metric, skipping undefined precision/recall
    /// entries.
    pub fn mean_of(items: &[MetricSummary]) -> Option<MetricSummary> {
        if items.is_empty() {
            return None;
        }
        let n = items.len() as f64;
        let mean_opt = |f: fn(&MetricSummary) -> Option<f64>| {
            let defined: Vec<f64> = items.iter().filter_map(f).collect();
            (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64)
        };
        Some(MetricSummary {
            mae: items.iter().map(|m| m.mae).sum::<f64>() / n,
            accuracy: items.iter().map(|m| m.accuracy).sum::<f64>() / n,
            precision: mean_opt(|m| m.precision),
            recall: mean_opt(|m| m.recall),
        })
    }
}

impl From<Metrics> for MetricSummary {
    fn from(m: Metrics) -> Self {
        MetricSummary {
            mae: m.mae,
            accuracy: m.accuracy,
            precision: m.precision,
            recall: m.recall,
        }
    }
}

/// Metrics of one (fold, repetition, Top-N) cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricRecord {
    pub fold: usize,
    pub repetition: usize,
    pub top_n: usize,
    pub metrics: Metrics,
    /// Pooled counts over all evaluated users.
    pub confusion: ConfusionMatrix,
    pub users: usize,
    /// Users excluded from macro precision / recall for a zero denominator.
    pub precision_undefined_users: usize,
    pub recall_undefined_users: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TopNSummary {
    pub top_n: usize,
    pub metrics: MetricSummary,
    /// Cells whose precision (recall) was undefined and left out of the mean.
    pub precision_excluded: usize,
    pub recall_excluded: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub method: MethodConfig,
    pub protocol: EvalProtocol,
    pub records: Vec<MetricRecord>,
    pub per_top_n: Vec<TopNSummary>,
    pub average: MetricSummary,
    pub predictions: u64,
    pub fallback_predictions: u64,
}

impl EvaluationReport {
    pub fn top_n(&self, n: usize) -> Option<&TopNSummary> {
        self.per_top_n.iter().find(|s| s.top_n == n)
    }
}

/// Splits `matrix` into the protocol's folds.
pub fn prepare_folds(matrix: &RatingsMatrix, protocol: &EvalProtocol) -> Result<Vec<FoldSplit>> {
    protocol.validate()?;
    k_fold_split(matrix, protocol.folds, protocol.seed)
}

/// Fits one cluster model per (fold, repetition); indexed `[fold][rep]`.
pub fn fit_models(folds: &[FoldSplit], protocol: &EvalProtocol) -> Result<Vec<Vec<ClusterModel>>> {
    folds
        .iter()
        .map(|fold| {
            (0..protocol.repetitions)
                .map(|rep| {
                    let config = FcmConfig {
                        seed: fcm_seed(protocol.seed, fold.fold_index, rep),
                        ..protocol.clustering
                    };
                    fit_fcm(&fold.train, config)
                })
                .collect()
        })
        .collect()
}

/// Full cross-validated comparison: split, cluster, predict, score.
pub fn run_experiment(
    matrix: &RatingsMatrix,
    protocol: &EvalProtocol,
    methods: &[MethodConfig],
) -> Result<Vec<EvaluationReport>> {
    let folds = prepare_folds(matrix, protocol)?;
    let models = fit_models(&folds, protocol)?;
    evaluate(&folds, &models, protocol, methods)
}

/// Per-user outcome for every Top-N value.
struct UserOutcome {
    per_n: Vec<(ConfusionMatrix, f64, usize)>,
    predictions: u64,
    fallbacks: u64,
}

/// Scores `methods` on prepared folds and cluster models.
pub fn evaluate(
    folds: &[FoldSplit],
    models: &[Vec<ClusterModel>],
    protocol: &EvalProtocol,
    methods: &[MethodConfig],
) -> Result<Vec<EvaluationReport>> {
    protocol.validate()?;
    if methods.is_empty() {
        return Err(Error::param("no methods to evaluate"));
    }
    if models.len() != folds.len() || models.iter().any(|m| m.len() != protocol.repetitions) {
        return Err(Error::param(
            "cluster models do not cover every (fold, repetition) cell",
        ));
    }

    let mut records: Vec<Vec<MetricRecord>> = vec![Vec::new(); methods.len()];
    let mut counts = vec![(0u64, 0u64); methods.len()];

    for (fold, fold_models) in folds.iter().zip(models) {
        let train = &fold.train;
        let users = group_by_user(&fold.test);

        let mut measures: Vec<SimilarityMeasure> = Vec::new();
        for m in methods {
            if !measures.contains(&m.predictor.measure) {
                measures.push(m.predictor.measure);
            }
        }
        let tables: Vec<(SimilarityMeasure, PairTable)> = measures
            .into_iter()
            .map(|m| (m, PairTable::for_measure(train, m)))
            .collect();
        let reliability = methods
            .iter()
            .any(|m| m.predictor.use_reliability)
            .then(|| reliability_table(train));

        for (rep, model) in fold_models.iter().enumerate() {
            if !model.matches(train) {
                return Err(Error::param(format!(
                    "cluster model for fold {} repetition {rep} does not match its training matrix",
                    fold.fold_index
                )));
            }
            for (mi, method) in methods.iter().enumerate() {
                let table = tables
                    .iter()
                    .find(|(m, _)| *m == method.predictor.measure)
                    .map(|(_, t)| t);
                let recommender = Recommender::new(train, model, method.predictor)?
                    .with_tables(table, reliability.as_ref());

                let outcomes = users
                    .par_iter()
                    .map(|(user, test)| user_outcome(&recommender, train, *user, test, protocol))
                    .collect::<Result<Vec<_>>>()?;

                for outcome in &outcomes {
                    counts[mi].0 += outcome.predictions;
                    counts[mi].1 += outcome.fallbacks;
                }
                for (ni, &n) in protocol.top_n_values.iter().enumerate() {
                    records[mi].push(cell_record(
                        fold.fold_index,
                        rep,
                        n,
                        ni,
                        &outcomes,
                        protocol.averaging,
                    )?);
                }
            }
        }
    }

    Ok(methods
        .iter()
        .zip(records)
        .zip(counts)
        .map(|((method, records), (predictions, fallbacks))| {
            let per_top_n: Vec<TopNSummary> = protocol
                .top_n_values
                .iter()
                .map(|&n| summarize_top_n(n, &records))
                .collect();
            let average = average_over_top_n(&per_top_n);
            EvaluationReport {
                method: *method,
                protocol: protocol.clone(),
                records,
                per_top_n,
                average,
                predictions,
                fallback_predictions: fallbacks,
            }
        })
        .collect())
}

/// Groups test entries (sorted by user) into per-user item lists.
fn group_by_user(test: &[Entry]) -> Vec<(u32, Vec<(ItemId, Rating)>)> {
    let mut out: Vec<(u32, Vec<(ItemId, Rating)>)> = Vec::new();
    for &(user, item, rating) in test {
        match out.last_mut() {
            Some((u, items)) if *u == user => items.push((item, rating)),
            _ => out.push((user, vec![(item, rating)])),
        }
    }
    out
}

fn user_outcome(
    recommender: &Recommender<'_>,
    train: &RatingsMatrix,
    user: u32,
    test: &[(ItemId, Rating)],
    protocol: &EvalProtocol,
) -> Result<UserOutcome> {
    let mut fallbacks = 0;
    let predictions: Vec<(ItemId, f64)> = match train.user_index(user) {
        Some(u) => test
            .iter()
            .map(|&(item, _)| {
                let p = recommender.predict_index(u, item);
                fallbacks += p.fell_back as u64;
                (item, p.value)
            })
            .collect(),
        // a user with every rating held out has no profile: predict the
        // scale median
        None => {
            fallbacks = test.len() as u64;
            let median = train.scale().median as f64;
            test.iter().map(|&(item, _)| (item, median)).collect()
        }
    };
    let ranked = RankedUser::new(test, &predictions)?;
    let per_n = protocol
        .top_n_values
        .iter()
        .map(|&n| {
            let (sum, count) = ranked.absolute_error(n);
            let cm = ranked.confusion(n, protocol.relevance_threshold, protocol.scope);
            (cm, sum, count)
        })
        .collect();
    Ok(UserOutcome {
        per_n,
        predictions: test.len() as u64,
        fallbacks,
    })
}

fn cell_record(
    fold: usize,
    repetition: usize,
    top_n: usize,
    n_index: usize,
    outcomes: &[UserOutcome],
    averaging: AveragingMode,
) -> Result<MetricRecord> {
    let mut pooled = ConfusionMatrix::default();
    let (mut err_sum, mut err_count) = (0.0, 0usize);
    for o in outcomes {
        let (cm, sum, count) = &o.per_n[n_index];
        pooled.merge(cm);
        err_sum += sum;
        err_count += count;
    }

    let (mut precision_undefined, mut recall_undefined) = (0, 0);
    let metrics = match averaging {
        AveragingMode::Micro => compute_metrics(&pooled, err_sum, err_count)?,
        AveragingMode::Macro => {
            let per_user = outcomes
                .iter()
                .map(|o| {
                    let (cm, sum, count) = &o.per_n[n_index];
                    compute_metrics(cm, *sum, *count)
                })
                .collect::<Result<Vec<_>>>()?;
            precision_undefined = per_user.iter().filter(|m| m.precision.is_none()).count();
            recall_undefined = per_user.iter().filter(|m| m.recall.is_none()).count();
            let summaries: Vec<MetricSummary> = per_user.into_iter().map(Into::into).collect();
            let mean = MetricSummary::mean_of(&summaries)
                .ok_or_else(|| Error::Protocol("no users with test ratings".into()))?;
            Metrics {
                mae: mean.mae,
                accuracy: mean.accuracy,
                precision: mean.precision,
                recall: mean.recall,
            }
        }
    };
    Ok(MetricRecord {
        fold,
        repetition,
        top_n,
        metrics,
        confusion: pooled,
        users: outcomes.len(),
        precision_undefined_users: precision_undefined,
        recall_undefined_users: recall_undefined,
    })
}

fn summarize_top_n(top_n: usize, records: &[MetricRecord]) -> TopNSummary {
    let cells: Vec<MetricSummary> = records
        .iter()
        .filter(|r| r.top_n == top_n)
        .map(|r| r.metrics.into())
        .collect();
    TopNSummary {
        top_n,
        metrics: MetricSummary::mean_of(&cells).expect("every Top-N has at least one cell"),
        precision_excluded: cells.iter().filter(|c| c.precision.is_none()).count(),
        recall_excluded: cells.iter().filter(|c| c.recall.is_none()).count(),
    }
}

/// Across-Top-N means of per-Top-N means (the "average of Top-N" row).
pub fn average_over_top_n(per_top_n: &[TopNSummary]) -> MetricSummary {
    let rows: Vec<MetricSummary> = per_top_n.iter().map(|s| s.metrics).collect();
    MetricSummary::mean_of(&rows).unwrap_or(MetricSummary {
        mae: 0.0,
        accuracy: 0.0,
        precision: None,
        recall: None,
    })
}

#[cfg(test)]
mod tests;
