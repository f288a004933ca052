//! Fuzzy c-means clustering of users over zero-filled rating vectors, with
//! center-of-gravity defuzzification into crisp cluster assignments.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ratings::{ItemId, RatingsMatrix, UserId};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FcmConfig {
    pub cluster_count: usize,
    /// Fuzzifier exponent m, strictly greater than 1.
    pub fuzzifier: f64,
    pub max_iterations: usize,
    /// Convergence threshold on the largest absolute membership change.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for FcmConfig {
    fn default() -> Self {
        FcmConfig {
            cluster_count: 3,
            fuzzifier: 2.0,
            max_iterations: 100,
            tolerance: 1e-4,
            seed: 42,
        }
    }
}

impl FcmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.cluster_count < 2 {
            return Err(Error::param("cluster count must be at least 2"));
        }
        if !(self.fuzzifier > 1.0 && self.fuzzifier.is_finite()) {
            return Err(Error::param("fuzzifier must be a finite value > 1"));
        }
        if self.max_iterations == 0 {
            return Err(Error::param("max iterations must be positive"));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::param("tolerance must be > 0"));
        }
        Ok(())
    }
}

/// A fitted fuzzy partition of the users of a training matrix.
///
/// `memberships` and `assignments` are indexed by the user index of the
/// matrix the model was fitted on (see [`ClusterModel::users`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterModel {
    pub config: FcmConfig,
    pub user_order: Vec<UserId>,
    pub item_order: Vec<ItemId>,
    pub centers: Vec<Vec<f64>>,
    pub memberships: Vec<Vec<f64>>,
    pub assignments: Vec<usize>,
    pub iterations: usize,
    pub converged: bool,
    /// Objective value after each iteration.
    pub objective_trace: Vec<f64>,
    /// Clusters that received no crisp members.
    pub empty_clusters: Vec<usize>,
}

impl ClusterModel {
    pub fn cluster_count(&self) -> usize {
        self.config.cluster_count
    }

    pub fn users(&self) -> &[UserId] {
        &self.user_order
    }

    fn user_position(&self, user: UserId) -> Result<usize> {
        self.user_order
            .binary_search(&user)
            .map_err(|_| Error::UnassignedUser(user))
    }

    pub fn assignment(&self, user: UserId) -> Result<usize> {
        Ok(self.assignments[self.user_position(user)?])
    }

    pub fn membership(&self, user: UserId) -> Result<&[f64]> {
        Ok(&self.memberships[self.user_position(user)?])
    }

    /// Users whose crisp assignment is `cluster`, ascending by id.
    pub fn cluster_members(&self, cluster: usize) -> Result<Vec<UserId>> {
        if cluster >= self.cluster_count() {
            return Err(Error::param(format!(
                "cluster {cluster} out of range 0..{}",
                self.cluster_count()
            )));
        }
        Ok(self
            .user_order
            .iter()
            .zip(&self.assignments)
            .filter(|(_, &a)| a == cluster)
            .map(|(&u, _)| u)
            .collect())
    }

    /// True when the model was fitted on exactly this matrix's user and item
    /// sets.
    pub fn matches(&self, matrix: &RatingsMatrix) -> bool {
        self.user_order == matrix.users() && self.item_order == matrix.items()
    }
}

/// Dense zero-filled rating vector of `user` over the matrix's item order.
pub fn user_vector(matrix: &RatingsMatrix, user: UserId) -> Result<Vec<f64>> {
    let u = matrix.require_user(user)?;
    Ok(dense_row(matrix, u))
}

fn dense_row(matrix: &RatingsMatrix, user_idx: usize) -> Vec<f64> {
    let mut v = vec![0.0; matrix.item_count()];
    for &(p, r) in matrix.row(user_idx) {
        v[p as usize] = r as f64;
    }
    v
}

/// Center of gravity over 1-based cluster labels, rounded half away from
/// zero, clamped to the label range and returned as a 0-based index.
pub fn defuzzify_cog(memberships: &[f64]) -> Result<usize> {
    if memberships.is_empty() {
        return Err(Error::Degenerate("empty membership vector".into()));
    }
    if memberships.iter().any(|&m| !m.is_finite() || m < 0.0) {
        return Err(Error::Degenerate(
            "membership degrees must be finite and non-negative".into(),
        ));
    }
    let total: f64 = memberships.iter().sum();
    if total <= 0.0 {
        return Err(Error::Degenerate("all-zero membership vector".into()));
    }
    let weighted: f64 = memberships
        .iter()
        .enumerate()
        .map(|(k, &m)| (k + 1) as f64 * m)
        .sum();
    let label = (weighted / total)
        .round()
        .clamp(1.0, memberships.len() as f64);
    Ok(label as usize - 1)
}

/// Membership update for one user given squared distances to every center.
///
/// A zero distance yields crisp membership in the first such center.
pub(crate) fn update_membership(dist_sq: &[f64], fuzzifier: f64) -> Vec<f64> {
    let c = dist_sq.len();
    if let Some(hit) = dist_sq.iter().position(|&d| d == 0.0) {
        let mut out = vec![0.0; c];
        out[hit] = 1.0;
        return out;
    }
    // (d_ik / d_jk)^(2/(m-1)) with squared distances
    let exponent = 1.0 / (fuzzifier - 1.0);
    dist_sq
        .iter()
        .map(|&dk| {
            let denom: f64 = dist_sq.iter().map(|&dj| (dk / dj).powf(exponent)).sum();
            1.0 / denom
        })
        .collect()
}

struct Fcm<'a> {
    data: &'a [f64],
    dim: usize,
    users: usize,
    config: FcmConfig,
}

impl Fcm<'_> {
    fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    fn centers(&self, memberships: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let m = self.config.fuzzifier;
        (0..self.config.cluster_count)
            .into_par_iter()
            .map(|k| {
                let mut acc = vec![0.0; self.dim];
                let mut weight_sum = 0.0;
                for (i, u) in memberships.iter().enumerate() {
                    let w = u[k].powf(m);
                    if w == 0.0 {
                        continue;
                    }
                    weight_sum += w;
                    for (a, &x) in acc.iter_mut().zip(self.row(i)) {
                        *a += w * x;
                    }
                }
                if weight_sum > 0.0 {
                    acc.iter_mut().for_each(|a| *a /= weight_sum);
                }
                acc
            })
            .collect()
    }

    fn distances(&self, centers: &[Vec<f64>]) -> Vec<Vec<f64>> {
        (0..self.users)
            .into_par_iter()
            .map(|i| {
                let x = self.row(i);
                centers
                    .iter()
                    .map(|c| x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum())
                    .collect()
            })
            .collect()
    }

    fn objective(&self, memberships: &[Vec<f64>], dist_sq: &[Vec<f64>]) -> f64 {
        let m = self.config.fuzzifier;
        memberships
            .iter()
            .zip(dist_sq)
            .map(|(u, d)| {
                u.iter()
                    .zip(d)
                    .map(|(&uk, &dk)| uk.powf(m) * dk)
                    .sum::<f64>()
            })
            .sum()
    }
}

/// Fits fuzzy c-means on the users of `matrix`.
///
/// Memberships start from seeded uniform draws normalised per user, then
/// centers and memberships are updated alternately until the largest
/// membership change drops below the tolerance or the iteration budget runs
/// out. Results do not depend on the size of the rayon pool.
pub fn fit_fcm(matrix: &RatingsMatrix, config: FcmConfig) -> Result<ClusterModel> {
    config.validate()?;
    let users = matrix.user_count();
    let c = config.cluster_count;
    if users < c {
        return Err(Error::param(format!(
            "{users} users cannot fill {c} clusters"
        )));
    }

    let dim = matrix.item_count();
    let data: Vec<f64> = (0..users).flat_map(|u| dense_row(matrix, u)).collect();
    let fcm = Fcm {
        data: &data,
        dim,
        users,
        config,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut memberships: Vec<Vec<f64>> = (0..users)
        .map(|_| {
            let mut row: Vec<f64> = (0..c).map(|_| rng.gen::<f64>()).collect();
            let total: f64 = row.iter().sum();
            if total > 0.0 {
                row.iter_mut().for_each(|x| *x /= total);
            } else {
                row.iter_mut().for_each(|x| *x = 1.0 / c as f64);
            }
            row
        })
        .collect();

    let mut centers = Vec::new();
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < config.max_iterations {
        iterations += 1;
        centers = fcm.centers(&memberships);
        let dist_sq = fcm.distances(&centers);
        let next: Vec<Vec<f64>> = dist_sq
            .par_iter()
            .map(|d| update_membership(d, config.fuzzifier))
            .collect();
        trace.push(fcm.objective(&next, &dist_sq));

        let delta = memberships
            .iter()
            .zip(&next)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max);
        memberships = next;
        if delta < config.tolerance {
            converged = true;
            break;
        }
    }

    let assignments = memberships
        .iter()
        .map(|u| defuzzify_cog(u))
        .collect::<Result<Vec<_>>>()?;
    let empty_clusters = (0..c).filter(|k| !assignments.contains(k)).collect();

    Ok(ClusterModel {
        config,
        user_order: matrix.users().to_vec(),
        item_order: matrix.items().to_vec(),
        centers,
        memberships,
        assignments,
        iterations,
        converged,
        objective_trace: trace,
        empty_clusters,
    })
}
