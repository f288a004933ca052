//! Neighbour selection inside the active user's cluster, the weighted
//! mean-offset rating predictor and Top-N lists.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::clustering::ClusterModel;
use crate::error::{Error, Result};
use crate::ratings::{ItemId, RatingsMatrix, UserId};
use crate::reliability::resource_allocation_at;
use crate::similarity::{PairTable, SimilarityMeasure};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictorConfig {
    pub neighbor_count: usize,
    pub measure: SimilarityMeasure,
    /// Multiply each neighbour's similarity by its resource-allocation score.
    pub use_reliability: bool,
    pub clamp_predictions: bool,
}

impl Default for PredictorConfig {
    fn default() -> Self {
        PredictorConfig {
            neighbor_count: 50,
            measure: SimilarityMeasure::Nhsm,
            use_reliability: true,
            clamp_predictions: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub user: UserId,
    pub item: ItemId,
    pub value: f64,
    /// Neighbours that carried non-zero weight.
    pub neighbors_used: usize,
    pub fell_back: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecommendationList {
    pub user: UserId,
    pub items: Vec<(ItemId, f64)>,
}

/// Sorts `(item, predicted rating)` pairs descending by prediction, ties by
/// ascending item id.
pub fn rank_predictions(predictions: &mut [(ItemId, f64)]) {
    predictions.sort_by(|a, b| match b.1.total_cmp(&a.1) {
        Ordering::Equal => a.0.cmp(&b.0),
        other => other,
    });
}

/// Online predictor over a training matrix and the cluster model fitted on
/// it. Pair scores are computed on demand unless precomputed tables are
/// attached with [`Recommender::with_tables`].
#[derive(Debug, Clone, Copy)]
pub struct Recommender<'a> {
    matrix: &'a RatingsMatrix,
    model: &'a ClusterModel,
    config: PredictorConfig,
    similarity: Option<&'a PairTable>,
    reliability: Option<&'a PairTable>,
}

impl<'a> Recommender<'a> {
    pub fn new(
        matrix: &'a RatingsMatrix,
        model: &'a ClusterModel,
        config: PredictorConfig,
    ) -> Result<Self> {
        if config.neighbor_count == 0 {
            return Err(Error::param("neighbour count must be at least 1"));
        }
        if !model.matches(matrix) {
            return Err(Error::param(
                "cluster model was fitted on a different matrix",
            ));
        }
        Ok(Recommender {
            matrix,
            model,
            config,
            similarity: None,
            reliability: None,
        })
    }

    /// Attaches precomputed pair tables. They must have been built from the
    /// same matrix with the configured measure and
    /// [`crate::reliability::reliability_table`].
    pub fn with_tables(
        mut self,
        similarity: Option<&'a PairTable>,
        reliability: Option<&'a PairTable>,
    ) -> Self {
        self.similarity = similarity;
        self.reliability = reliability;
        self
    }

    pub fn config(&self) -> &PredictorConfig {
        &self.config
    }

    fn similarity_at(&self, u: usize, v: usize) -> f64 {
        match self.similarity {
            Some(t) => t.get(u, v),
            None => self.config.measure.score_at(self.matrix, u, v),
        }
    }

    fn reliability_at(&self, u: usize, v: usize) -> f64 {
        match self.reliability {
            Some(t) => t.get(u, v),
            None => resource_allocation_at(self.matrix, u, v),
        }
    }

    fn cluster_of(&self, user: UserId) -> Result<(usize, usize)> {
        let u = self.matrix.require_user(user)?;
        let cluster = *self
            .model
            .assignments
            .get(u)
            .ok_or(Error::UnassignedUser(user))?;
        Ok((u, cluster))
    }

    fn neighbors_at(&self, u: usize, cluster: usize, item: ItemId) -> Vec<(usize, f64)> {
        let Some(p) = self.matrix.item_index(item) else {
            return Vec::new();
        };
        let mut candidates: Vec<(usize, f64)> = self
            .matrix
            .col(p)
            .iter()
            .map(|&(v, _)| v as usize)
            .filter(|&v| v != u && self.model.assignments[v] == cluster)
            .map(|v| (v, self.similarity_at(u, v)))
            .collect();
        // user indices ascend with user ids
        candidates.sort_by(|a, b| match b.1.total_cmp(&a.1) {
            Ordering::Equal => a.0.cmp(&b.0),
            other => other,
        });
        candidates.truncate(self.config.neighbor_count);
        candidates
    }

    /// Same-cluster raters of `item`, best similarity first, at most
    /// `neighbor_count` of them.
    pub fn select_neighbors(&self, user: UserId, item: ItemId) -> Result<Vec<(UserId, f64)>> {
        let (u, cluster) = self.cluster_of(user)?;
        Ok(self
            .neighbors_at(u, cluster, item)
            .into_iter()
            .map(|(v, s)| (self.matrix.users()[v], s))
            .collect())
    }

    pub fn predict_rating(&self, user: UserId, item: ItemId) -> Result<Prediction> {
        let (u, cluster) = self.cluster_of(user)?;
        Ok(self.predict_at(u, cluster, item))
    }

    pub(crate) fn predict_index(&self, u: usize, item: ItemId) -> Prediction {
        self.predict_at(u, self.model.assignments[u], item)
    }

    fn predict_at(&self, u: usize, cluster: usize, item: ItemId) -> Prediction {
        let mu_u = self.matrix.user_stats_at(u).mean;
        let neighbors = self.neighbors_at(u, cluster, item);
        let p = self.matrix.item_index(item);

        let (mut num, mut den, mut used) = (0.0, 0.0, 0usize);
        for &(v, sim) in &neighbors {
            let weight = if self.config.use_reliability {
                sim * self.reliability_at(u, v)
            } else {
                sim
            };
            if weight == 0.0 {
                continue;
            }
            let r = self
                .matrix
                .rating_at(v, p.expect("neighbours rated the item"))
                .expect("neighbours rated the item") as f64;
            num += (r - self.matrix.user_stats_at(v).mean) * weight;
            den += weight.abs();
            used += 1;
        }

        let fell_back = used == 0;
        let mut value = if fell_back { mu_u } else { mu_u + num / den };
        if self.config.clamp_predictions {
            value = self.matrix.scale().clamp(value);
        }
        Prediction {
            user: self.matrix.users()[u],
            item,
            value,
            neighbors_used: used,
            fell_back,
        }
    }

    /// Predicts every candidate and keeps the `n` best.
    pub fn recommend_top_n(
        &self,
        user: UserId,
        candidates: &[ItemId],
        n: usize,
    ) -> Result<RecommendationList> {
        if n == 0 {
            return Err(Error::param("Top-N size must be at least 1"));
        }
        let (u, cluster) = self.cluster_of(user)?;
        let mut scored = Vec::with_capacity(candidates.len());
        for &item in candidates {
            if self.matrix.rating(user, item).is_some() {
                return Err(Error::param(format!(
                    "candidate item {item} is already rated by user {user}"
                )));
            }
            scored.push((item, self.predict_at(u, cluster, item).value));
        }
        rank_predictions(&mut scored);
        scored.truncate(n);
        Ok(RecommendationList {
            user,
            items: scored,
        })
    }
}
