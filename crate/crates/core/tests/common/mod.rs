//! Straight-line reference implementations over a dense grid, written
//! independently of the library's sparse index structures.

#![allow(dead_code)]

use hybridrec::{ClusterModel, FcmConfig, RatingScale, RatingsMatrix};
use rand::Rng;

pub const MEDIAN: f64 = 3.0;
pub const GAMMA: f64 = 50.0;

/// `grid[u][p]` is user `u`'s rating of item `p`. User ids are `10 + u`,
/// item ids `100 + 3p`, so ids never coincide with indices.
#[derive(Debug, Clone)]
pub struct Grid {
    pub cells: Vec<Vec<Option<u8>>>,
}

pub fn user_id(u: usize) -> u32 {
    10 + u as u32
}

pub fn item_id(p: usize) -> u32 {
    100 + 3 * p as u32
}

impl Grid {
    pub fn users(&self) -> usize {
        self.cells.len()
    }

    pub fn items(&self) -> usize {
        self.cells.first().map_or(0, |r| r.len())
    }

    pub fn rated(&self, u: usize) -> Vec<usize> {
        (0..self.items())
            .filter(|&p| self.cells[u][p].is_some())
            .collect()
    }

    /// Users with at least one rating, which are the users the matrix knows.
    pub fn active_users(&self) -> Vec<usize> {
        (0..self.users())
            .filter(|&u| !self.rated(u).is_empty())
            .collect()
    }

    pub fn matrix(&self) -> RatingsMatrix {
        let mut entries = Vec::new();
        for (u, row) in self.cells.iter().enumerate() {
            for (p, r) in row.iter().enumerate() {
                if let Some(r) = r {
                    entries.push((user_id(u), item_id(p), *r));
                }
            }
        }
        RatingsMatrix::from_entries(RatingScale::default(), &entries).unwrap()
    }

    pub fn r(&self, u: usize, p: usize) -> f64 {
        self.cells[u][p].unwrap() as f64
    }

    pub fn co_rated(&self, u: usize, v: usize) -> Vec<usize> {
        (0..self.items())
            .filter(|&p| self.cells[u][p].is_some() && self.cells[v][p].is_some())
            .collect()
    }
}

/// Random grid up to `max_users` x `max_items` with a random fill density.
pub fn random_grid<R: Rng>(rng: &mut R, max_users: usize, max_items: usize) -> Grid {
    let users = rng.gen_range(2..=max_users);
    let items = rng.gen_range(1..=max_items);
    let density: f64 = rng.gen_range(0.15..0.95);
    let mut cells = vec![vec![None; items]; users];
    for row in cells.iter_mut() {
        for cell in row.iter_mut() {
            if rng.gen_bool(density) {
                *cell = Some(rng.gen_range(1..=5));
            }
        }
    }
    // at least one rating so the matrix is not empty
    if cells.iter().all(|r| r.iter().all(Option::is_none)) {
        cells[0][0] = Some(rng.gen_range(1..=5));
    }
    Grid { cells }
}

pub fn user_mean(g: &Grid, u: usize) -> f64 {
    let items = g.rated(u);
    items.iter().map(|&p| g.r(u, p)).sum::<f64>() / items.len() as f64
}

/// Population standard deviation, two-pass.
pub fn user_stddev(g: &Grid, u: usize) -> f64 {
    let items = g.rated(u);
    let mean = user_mean(g, u);
    let var = items
        .iter()
        .map(|&p| (g.r(u, p) - mean).powi(2))
        .sum::<f64>()
        / items.len() as f64;
    var.sqrt()
}

pub fn raters(g: &Grid, p: usize) -> usize {
    (0..g.users()).filter(|&u| g.cells[u][p].is_some()).count()
}

pub fn item_mean(g: &Grid, p: usize) -> f64 {
    let rs: Vec<f64> = (0..g.users())
        .filter_map(|u| g.cells[u][p].map(f64::from))
        .collect();
    rs.iter().sum::<f64>() / rs.len() as f64
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

pub fn oracle_proximity(a: f64, b: f64) -> f64 {
    1.0 - sigmoid((a - b).abs())
}

pub fn oracle_significance(a: f64, b: f64) -> f64 {
    sigmoid((a - MEDIAN).abs() * (b - MEDIAN).abs())
}

pub fn oracle_singularity(a: f64, b: f64, item_mean: f64) -> f64 {
    1.0 - sigmoid(((a + b) / 2.0 - item_mean).abs())
}

pub fn oracle_pss(g: &Grid, u: usize, v: usize) -> f64 {
    let mut total = 0.0;
    for p in g.co_rated(u, v) {
        let (a, b) = (g.r(u, p), g.r(v, p));
        total += oracle_proximity(a, b)
            * oracle_significance(a, b)
            * oracle_singularity(a, b, item_mean(g, p));
    }
    total
}

pub fn oracle_jaccard(g: &Grid, u: usize, v: usize) -> f64 {
    let (nu, nv) = (g.rated(u).len(), g.rated(v).len());
    g.co_rated(u, v).len() as f64 / (nu * nv) as f64
}

pub fn oracle_urp(g: &Grid, u: usize, v: usize) -> f64 {
    let x =
        (user_mean(g, u) - user_mean(g, v)).abs() * (user_stddev(g, u) - user_stddev(g, v)).abs();
    1.0 - sigmoid(x)
}

pub fn oracle_nhsm(g: &Grid, u: usize, v: usize) -> f64 {
    oracle_pss(g, u, v) * oracle_jaccard(g, u, v) * oracle_urp(g, u, v)
}

/// Pearson over co-rated items with co-rated means; 0 when fewer than two
/// items or either side is constant.
pub fn oracle_pearson(g: &Grid, u: usize, v: usize) -> f64 {
    let common = g.co_rated(u, v);
    if common.len() < 2 {
        return 0.0;
    }
    let n = common.len() as f64;
    let mu = common.iter().map(|&p| g.r(u, p)).sum::<f64>() / n;
    let mv = common.iter().map(|&p| g.r(v, p)).sum::<f64>() / n;
    let num: f64 = common
        .iter()
        .map(|&p| (g.r(u, p) - mu) * (g.r(v, p) - mv))
        .sum();
    let du: f64 = common.iter().map(|&p| (g.r(u, p) - mu).powi(2)).sum();
    let dv: f64 = common.iter().map(|&p| (g.r(v, p) - mv).powi(2)).sum();
    if du == 0.0 || dv == 0.0 {
        0.0
    } else {
        num / (du.sqrt() * dv.sqrt())
    }
}

pub fn oracle_cosine(g: &Grid, u: usize, v: usize) -> f64 {
    let common = g.co_rated(u, v);
    if common.is_empty() {
        return 0.0;
    }
    let dot: f64 = common.iter().map(|&p| g.r(u, p) * g.r(v, p)).sum();
    let nu: f64 = common
        .iter()
        .map(|&p| g.r(u, p).powi(2))
        .sum::<f64>()
        .sqrt();
    let nv: f64 = common
        .iter()
        .map(|&p| g.r(v, p).powi(2))
        .sum::<f64>()
        .sqrt();
    dot / (nu * nv)
}

pub fn oracle_herlocker(g: &Grid, u: usize, v: usize) -> f64 {
    let n = g.co_rated(u, v).len() as f64;
    oracle_pearson(g, u, v) * n.min(GAMMA) / GAMMA
}

pub fn oracle_mclaughlin(g: &Grid, u: usize, v: usize) -> f64 {
    let n = g.co_rated(u, v).len() as f64;
    oracle_pearson(g, u, v) * n / n.max(GAMMA)
}

pub fn oracle_resource_allocation(g: &Grid, u: usize, v: usize) -> f64 {
    g.co_rated(u, v)
        .iter()
        .map(|&p| 1.0 / raters(g, p) as f64)
        .sum()
}

/// Reference prediction for grid user `u` on item `p`, given a cluster per
/// grid user and a similarity function over grid users.
#[allow(clippy::too_many_arguments)]
pub fn oracle_predict(
    g: &Grid,
    clusters: &[usize],
    sim: &dyn Fn(usize, usize) -> f64,
    reliability: Option<&dyn Fn(usize, usize) -> f64>,
    k: usize,
    u: usize,
    p: usize,
    clamp: bool,
) -> f64 {
    let mut candidates: Vec<(usize, f64)> = Vec::new();
    for v in 0..g.users() {
        if v != u && clusters[v] == clusters[u] && g.cells[v][p].is_some() {
            candidates.push((v, sim(u, v)));
        }
    }
    // best first, ties by ascending user
    for i in 1..candidates.len() {
        let mut j = i;
        while j > 0 {
            let (a, b) = (candidates[j - 1], candidates[j]);
            if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
                candidates.swap(j - 1, j);
                j -= 1;
            } else {
                break;
            }
        }
    }
    candidates.truncate(k);

    let mean_u = user_mean(g, u);
    let mut num = 0.0;
    let mut den = 0.0;
    for (v, s) in candidates {
        let w = match reliability {
            Some(rel) => s * rel(u, v),
            None => s,
        };
        num += (g.r(v, p) - user_mean(g, v)) * w;
        den += w.abs();
    }
    let value = if den == 0.0 {
        mean_u
    } else {
        mean_u + num / den
    };
    if clamp {
        value.clamp(1.0, 5.0)
    } else {
        value
    }
}

/// A hand-made cluster model over the matrix's users with the given crisp
/// assignments (indexed like `matrix.users()`).
pub fn model_with_assignments(
    matrix: &RatingsMatrix,
    assignments: Vec<usize>,
    clusters: usize,
) -> ClusterModel {
    let memberships = assignments
        .iter()
        .map(|&a| {
            (0..clusters)
                .map(|k| if k == a { 1.0 } else { 0.0 })
                .collect()
        })
        .collect();
    ClusterModel {
        config: FcmConfig {
            cluster_count: clusters,
            ..FcmConfig::default()
        },
        user_order: matrix.users().to_vec(),
        item_order: matrix.items().to_vec(),
        centers: vec![vec![0.0; matrix.item_count()]; clusters],
        memberships,
        assignments,
        iterations: 0,
        converged: true,
        objective_trace: Vec::new(),
        empty_clusters: Vec::new(),
    }
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

/// Two blocks of users with opposite tastes over disjoint halves of the
/// catalogue.
pub fn two_block_fixture() -> RatingsMatrix {
    let mut entries = Vec::new();
    for u in 0..10u32 {
        for p in 0..10u32 {
            let first_block = u < 5;
            let first_half = p < 5;
            if first_block == first_half {
                entries.push((u + 1, p + 1, 5));
            } else if (u + p) % 3 == 0 {
                entries.push((u + 1, p + 1, 1));
            }
        }
    }
    RatingsMatrix::from_entries(RatingScale::default(), &entries).unwrap()
}
