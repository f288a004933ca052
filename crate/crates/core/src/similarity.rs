//! User-user similarity: the NHSM heuristic measure and the Pearson-family /
//! cosine baselines.
//!
//! NHSM multiplies three factors:
//!
//! * PSS, a sum over co-rated items of proximity × significance ×
//!   singularity of the two ratings,
//! * a Jaccard variant `|I_u ∩ I_v| / (|I_u| · |I_v|)`,
//! * URP, a logistic penalty on differing rating means and spreads.
//!
//! Singularity uses the pair-mean form `|(r_u + r_v)/2 − μ_p|`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ratings::{Rating, RatingsMatrix, UserId, UserStats};

/// Significance-weighting threshold shared by the Herlocker and McLaughlin
/// variants.
pub const DEFAULT_GAMMA: u32 = 50;

/// Human-readable statement of the singularity form, echoed in reports.
pub const SINGULARITY_FORM: &str = "1 - 1/(1 + exp(-|(r_up + r_vp)/2 - mu_p|))";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SimilarityMeasure {
    Nhsm,
    Pearson,
    Cosine,
    /// Pearson × min(n, γ)/γ.
    HerlockerWeighted {
        gamma: u32,
    },
    /// Pearson × n/max(n, γ).
    McLaughlinWeighted {
        gamma: u32,
    },
}

impl SimilarityMeasure {
    pub fn name(&self) -> &'static str {
        match self {
            SimilarityMeasure::Nhsm => "NHSM",
            SimilarityMeasure::Pearson => "PEARSON",
            SimilarityMeasure::Cosine => "COSINE",
            SimilarityMeasure::HerlockerWeighted { .. } => "HERLOCKER_W",
            SimilarityMeasure::McLaughlinWeighted { .. } => "MCLAUGHLIN_W",
        }
    }

    /// Similarity of two users given by id.
    pub fn score(&self, matrix: &RatingsMatrix, u: UserId, v: UserId) -> Result<f64> {
        let (a, b) = (matrix.require_user(u)?, matrix.require_user(v)?);
        Ok(self.score_at(matrix, a, b))
    }

    /// Similarity of two users given by matrix index.
    pub fn score_at(&self, matrix: &RatingsMatrix, u: usize, v: usize) -> f64 {
        match *self {
            SimilarityMeasure::Nhsm => nhsm_at(matrix, u, v),
            SimilarityMeasure::Pearson => pearson_at(matrix, u, v).0,
            SimilarityMeasure::Cosine => cosine_at(matrix, u, v),
            SimilarityMeasure::HerlockerWeighted { gamma } => {
                let (r, n) = pearson_at(matrix, u, v);
                r * herlocker_weight(n, gamma)
            }
            SimilarityMeasure::McLaughlinWeighted { gamma } => {
                let (r, n) = pearson_at(matrix, u, v);
                r * mclaughlin_weight(n, gamma)
            }
        }
    }
}

impl fmt::Display for SimilarityMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimilarityMeasure::HerlockerWeighted { gamma }
            | SimilarityMeasure::McLaughlinWeighted { gamma }
                if *gamma != DEFAULT_GAMMA =>
            {
                write!(f, "{}(gamma={gamma})", self.name())
            }
            _ => f.write_str(self.name()),
        }
    }
}

impl FromStr for SimilarityMeasure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "NHSM" => Ok(SimilarityMeasure::Nhsm),
            "PEARSON" => Ok(SimilarityMeasure::Pearson),
            "COSINE" => Ok(SimilarityMeasure::Cosine),
            "HERLOCKER_W" | "HW" => Ok(SimilarityMeasure::HerlockerWeighted {
                gamma: DEFAULT_GAMMA,
            }),
            "MCLAUGHLIN_W" | "MW" => Ok(SimilarityMeasure::McLaughlinWeighted {
                gamma: DEFAULT_GAMMA,
            }),
            other => Err(Error::param(format!(
                "unknown similarity measure {other:?}"
            ))),
        }
    }
}

/// Merge-join over two users' rows: yields `(item index, r_u, r_v)` for
/// every co-rated item in ascending item order.
pub(crate) fn co_rated<'a>(
    matrix: &'a RatingsMatrix,
    u: usize,
    v: usize,
) -> impl Iterator<Item = (usize, Rating, Rating)> + 'a {
    let (a, b) = (matrix.row(u), matrix.row(v));
    let (mut i, mut j) = (0, 0);
    std::iter::from_fn(move || {
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    let hit = (a[i].0 as usize, a[i].1, b[j].1);
                    i += 1;
                    j += 1;
                    return Some(hit);
                }
            }
        }
        None
    })
}

/// min(n, γ)/γ
pub fn herlocker_weight(co_rated: usize, gamma: u32) -> f64 {
    let g = gamma as f64;
    (co_rated as f64).min(g) / g
}

/// n/max(n, γ)
pub fn mclaughlin_weight(co_rated: usize, gamma: u32) -> f64 {
    let n = co_rated as f64;
    n / n.max(gamma as f64)
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

pub fn proximity(r_u: f64, r_v: f64) -> f64 {
    1.0 - logistic((r_u - r_v).abs())
}

pub fn significance(r_u: f64, r_v: f64, r_med: f64) -> f64 {
    logistic((r_u - r_med).abs() * (r_v - r_med).abs())
}

pub fn singularity(r_u: f64, r_v: f64, mu_p: f64) -> f64 {
    1.0 - logistic(((r_u + r_v) / 2.0 - mu_p).abs())
}

pub fn urp_sim(u: &UserStats, v: &UserStats) -> f64 {
    1.0 - logistic((u.mean - v.mean).abs() * (u.stddev - v.stddev).abs())
}

pub fn jaccard_prime(matrix: &RatingsMatrix, u: UserId, v: UserId) -> Result<f64> {
    let (a, b) = (matrix.require_user(u)?, matrix.require_user(v)?);
    Ok(jaccard_prime_at(matrix, a, b))
}

fn jaccard_prime_at(matrix: &RatingsMatrix, u: usize, v: usize) -> f64 {
    let (nu, nv) = (matrix.row(u).len(), matrix.row(v).len());
    if nu == 0 || nv == 0 {
        return 0.0;
    }
    co_rated(matrix, u, v).count() as f64 / (nu as f64 * nv as f64)
}

pub fn pss_sim(matrix: &RatingsMatrix, u: UserId, v: UserId) -> Result<f64> {
    let (a, b) = (matrix.require_user(u)?, matrix.require_user(v)?);
    Ok(pss_at(matrix, a, b))
}

fn pss_at(matrix: &RatingsMatrix, u: usize, v: usize) -> f64 {
    let r_med = matrix.scale().median as f64;
    co_rated(matrix, u, v)
        .map(|(p, ru, rv)| {
            let (ru, rv) = (ru as f64, rv as f64);
            let mu_p = matrix.item_stats_at(p).mean;
            proximity(ru, rv) * significance(ru, rv, r_med) * singularity(ru, rv, mu_p)
        })
        .sum()
}

pub fn nhsm_sim(matrix: &RatingsMatrix, u: UserId, v: UserId) -> Result<f64> {
    let (a, b) = (matrix.require_user(u)?, matrix.require_user(v)?);
    Ok(nhsm_at(matrix, a, b))
}

fn nhsm_at(matrix: &RatingsMatrix, u: usize, v: usize) -> f64 {
    let jaccard = jaccard_prime_at(matrix, u, v);
    if jaccard == 0.0 {
        return 0.0;
    }
    let urp = urp_sim(matrix.user_stats_at(u), matrix.user_stats_at(v));
    pss_at(matrix, u, v) * jaccard * urp
}

/// Pearson correlation over co-rated items (co-rated means), and the
/// co-rated count. Zero with fewer than two co-rated items or zero variance.
fn pearson_at(matrix: &RatingsMatrix, u: usize, v: usize) -> (f64, usize) {
    let (mut n, mut su, mut sv) = (0usize, 0.0, 0.0);
    for (_, ru, rv) in co_rated(matrix, u, v) {
        n += 1;
        su += ru as f64;
        sv += rv as f64;
    }
    if n < 2 {
        return (0.0, n);
    }
    let (mu, mv) = (su / n as f64, sv / n as f64);
    let (mut num, mut du, mut dv) = (0.0, 0.0, 0.0);
    for (_, ru, rv) in co_rated(matrix, u, v) {
        let (a, b) = (ru as f64 - mu, rv as f64 - mv);
        num += a * b;
        du += a * a;
        dv += b * b;
    }
    if du == 0.0 || dv == 0.0 {
        return (0.0, n);
    }
    ((num / (du * dv).sqrt()).clamp(-1.0, 1.0), n)
}

fn cosine_at(matrix: &RatingsMatrix, u: usize, v: usize) -> f64 {
    let (mut dot, mut nu, mut nv) = (0.0, 0.0, 0.0);
    for (_, ru, rv) in co_rated(matrix, u, v) {
        let (a, b) = (ru as f64, rv as f64);
        dot += a * b;
        nu += a * a;
        nv += b * b;
    }
    if nu == 0.0 || nv == 0.0 {
        return 0.0;
    }
    (dot / (nu * nv).sqrt()).clamp(-1.0, 1.0)
}

/// Baseline similarity; rejects NHSM, which has its own entry point.
pub fn baseline_sim(
    measure: SimilarityMeasure,
    matrix: &RatingsMatrix,
    u: UserId,
    v: UserId,
) -> Result<f64> {
    if measure == SimilarityMeasure::Nhsm {
        return Err(Error::param("NHSM is not a baseline measure; use nhsm_sim"));
    }
    measure.score(matrix, u, v)
}

/// Dense symmetric table of pair scores indexed by user index.
#[derive(Debug, Clone)]
pub struct PairTable {
    n: usize,
    values: Vec<f64>,
}

impl PairTable {
    /// Evaluates `f` on every unordered pair (and the diagonal) in parallel
    /// and mirrors the result.
    pub fn build<F>(n: usize, f: F) -> Self
    where
        F: Fn(usize, usize) -> f64 + Sync,
    {
        let upper: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|u| (u..n).map(|v| f(u, v)).collect())
            .collect();
        let mut values = vec![0.0; n * n];
        for (u, row) in upper.into_iter().enumerate() {
            for (offset, s) in row.into_iter().enumerate() {
                let v = u + offset;
                values[u * n + v] = s;
                values[v * n + u] = s;
            }
        }
        PairTable { n, values }
    }

    pub fn for_measure(matrix: &RatingsMatrix, measure: SimilarityMeasure) -> Self {
        Self::build(matrix.user_count(), |u, v| measure.score_at(matrix, u, v))
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.values[u * self.n + v]
    }
}
