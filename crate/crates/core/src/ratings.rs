//! Sparse user × item rating storage, per-user and per-item statistics,
//! MovieLens ingestion and cross-validation splitting.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type UserId = u32;
pub type ItemId = u32;
pub type Rating = u8;

/// A (user, item, rating) triple.
pub type Entry = (UserId, ItemId, Rating);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatingScale {
    pub min: Rating,
    pub max: Rating,
    pub median: Rating,
}

impl RatingScale {
    /// Builds a scale whose median is the midpoint of `min` and `max`,
    /// rounded half up.
    pub fn new(min: Rating, max: Rating) -> Result<Self> {
        if min >= max {
            return Err(Error::param(format!(
                "rating scale needs min < max, got {min}..{max}"
            )));
        }
        let median = (min as u16 + max as u16).div_ceil(2) as Rating;
        Ok(RatingScale { min, max, median })
    }

    pub fn contains(&self, rating: Rating) -> bool {
        (self.min..=self.max).contains(&rating)
    }

    pub fn clamp(&self, value: f64) -> f64 {
        value.clamp(self.min as f64, self.max as f64)
    }
}

impl Default for RatingScale {
    fn default() -> Self {
        RatingScale {
            min: 1,
            max: 5,
            median: 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UserStats {
    pub user: UserId,
    pub mean: f64,
    /// Population standard deviation of the user's ratings.
    pub stddev: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ItemStats {
    pub item: ItemId,
    pub mean: f64,
    /// Number of distinct users who rated the item (k_z).
    pub rater_count: usize,
}

/// Immutable sparse ratings matrix.
///
/// Users and items are addressed either by their external ids or by dense
/// indices (ascending id order). Rows hold `(item index, rating)` pairs
/// sorted by item index; columns hold `(user index, rating)` pairs sorted by
/// user index.
#[derive(Debug, Clone)]
pub struct RatingsMatrix {
    scale: RatingScale,
    user_ids: Vec<UserId>,
    item_ids: Vec<ItemId>,
    user_index: HashMap<UserId, usize>,
    item_index: HashMap<ItemId, usize>,
    rows: Vec<Vec<(u32, Rating)>>,
    cols: Vec<Vec<(u32, Rating)>>,
    user_stats: Vec<UserStats>,
    item_stats: Vec<ItemStats>,
    len: usize,
}

impl PartialEq for RatingsMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.scale == other.scale
            && self.user_ids == other.user_ids
            && self.item_ids == other.item_ids
            && self.rows == other.rows
    }
}

impl RatingsMatrix {
    pub fn empty(scale: RatingScale) -> Self {
        Self::from_entries(scale, &[]).expect("empty matrix is always valid")
    }

    /// Builds a matrix from rating triples. Errors on out-of-scale ratings
    /// and duplicate (user, item) pairs; the reported line is the 1-based
    /// position in `entries`.
    pub fn from_entries(scale: RatingScale, entries: &[Entry]) -> Result<Self> {
        let lines: Vec<usize> = (1..=entries.len()).collect();
        Self::build(scale, entries, &lines)
    }

    fn build(scale: RatingScale, entries: &[Entry], lines: &[usize]) -> Result<Self> {
        let mut seen = HashSet::with_capacity(entries.len());
        for (&(user, item, rating), &line) in entries.iter().zip(lines) {
            if !scale.contains(rating) {
                return Err(Error::Ingest {
                    line,
                    message: format!("rating {rating} outside scale {}..{}", scale.min, scale.max),
                });
            }
            if !seen.insert((user, item)) {
                return Err(Error::DuplicateRating { line, user, item });
            }
        }

        let mut user_ids: Vec<UserId> = entries.iter().map(|e| e.0).collect();
        user_ids.sort_unstable();
        user_ids.dedup();
        let mut item_ids: Vec<ItemId> = entries.iter().map(|e| e.1).collect();
        item_ids.sort_unstable();
        item_ids.dedup();

        let user_index: HashMap<UserId, usize> =
            user_ids.iter().enumerate().map(|(i, &u)| (u, i)).collect();
        let item_index: HashMap<ItemId, usize> =
            item_ids.iter().enumerate().map(|(i, &p)| (p, i)).collect();

        let mut rows = vec![Vec::new(); user_ids.len()];
        let mut cols = vec![Vec::new(); item_ids.len()];
        for &(user, item, rating) in entries {
            let u = user_index[&user];
            let p = item_index[&item];
            rows[u].push((p as u32, rating));
            cols[p].push((u as u32, rating));
        }
        rows.iter_mut().for_each(|r| r.sort_unstable());
        cols.iter_mut().for_each(|c| c.sort_unstable());

        let user_stats = rows
            .iter()
            .zip(&user_ids)
            .map(|(row, &user)| user_stats_of(user, row.iter().map(|e| e.1), scale))
            .collect();
        let item_stats = cols
            .iter()
            .zip(&item_ids)
            .map(|(col, &item)| item_stats_of(item, col.iter().map(|e| e.1), scale))
            .collect();

        Ok(RatingsMatrix {
            scale,
            user_ids,
            item_ids,
            user_index,
            item_index,
            rows,
            cols,
            user_stats,
            item_stats,
            len: entries.len(),
        })
    }

    pub fn scale(&self) -> RatingScale {
        self.scale
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn user_count(&self) -> usize {
        self.user_ids.len()
    }

    pub fn item_count(&self) -> usize {
        self.item_ids.len()
    }

    /// User ids in ascending order; position = user index.
    pub fn users(&self) -> &[UserId] {
        &self.user_ids
    }

    /// Item ids in ascending order; position = item index.
    pub fn items(&self) -> &[ItemId] {
        &self.item_ids
    }

    pub fn user_index(&self, user: UserId) -> Option<usize> {
        self.user_index.get(&user).copied()
    }

    pub fn item_index(&self, item: ItemId) -> Option<usize> {
        self.item_index.get(&item).copied()
    }

    pub(crate) fn require_user(&self, user: UserId) -> Result<usize> {
        self.user_index(user).ok_or(Error::UnknownUser(user))
    }

    /// `(item index, rating)` pairs of a user, ascending by item index.
    pub fn row(&self, user_idx: usize) -> &[(u32, Rating)] {
        &self.rows[user_idx]
    }

    /// `(user index, rating)` pairs of an item, ascending by user index.
    pub fn col(&self, item_idx: usize) -> &[(u32, Rating)] {
        &self.cols[item_idx]
    }

    pub fn rating(&self, user: UserId, item: ItemId) -> Option<Rating> {
        let u = self.user_index(user)?;
        let p = self.item_index(item)?;
        self.rating_at(u, p)
    }

    pub fn rating_at(&self, user_idx: usize, item_idx: usize) -> Option<Rating> {
        let row = &self.rows[user_idx];
        row.binary_search_by_key(&(item_idx as u32), |e| e.0)
            .ok()
            .map(|pos| row[pos].1)
    }

    /// Rated items of a user as `(item id, rating)`.
    pub fn user_ratings(&self, user: UserId) -> Result<Vec<(ItemId, Rating)>> {
        let u = self.require_user(user)?;
        Ok(self.rows[u]
            .iter()
            .map(|&(p, r)| (self.item_ids[p as usize], r))
            .collect())
    }

    /// Raters of an item as `(user id, rating)`; empty for unknown items.
    pub fn item_ratings(&self, item: ItemId) -> Vec<(UserId, Rating)> {
        match self.item_index(item) {
            Some(p) => self.cols[p]
                .iter()
                .map(|&(u, r)| (self.user_ids[u as usize], r))
                .collect(),
            None => Vec::new(),
        }
    }

    /// All entries, ordered by user id then item id.
    pub fn entries(&self) -> impl Iterator<Item = Entry> + '_ {
        self.rows.iter().enumerate().flat_map(move |(u, row)| {
            row.iter()
                .map(move |&(p, r)| (self.user_ids[u], self.item_ids[p as usize], r))
        })
    }

    pub fn user_stats(&self, user: UserId) -> Result<UserStats> {
        Ok(self.user_stats[self.require_user(user)?])
    }

    pub fn user_stats_at(&self, user_idx: usize) -> &UserStats {
        &self.user_stats[user_idx]
    }

    /// Statistics of an item; items without raters fall back to the scale
    /// median with a rater count of zero.
    pub fn item_stats(&self, item: ItemId) -> ItemStats {
        match self.item_index(item) {
            Some(p) => self.item_stats[p],
            None => ItemStats {
                item,
                mean: self.scale.median as f64,
                rater_count: 0,
            },
        }
    }

    pub fn item_stats_at(&self, item_idx: usize) -> &ItemStats {
        &self.item_stats[item_idx]
    }

    /// Writes the matrix in MovieLens `u.data` layout with a zero timestamp.
    pub fn write_movielens<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (user, item, rating) in self.entries() {
            writeln!(out, "{user}\t{item}\t{rating}\t0")?;
        }
        out.flush()
    }
}

fn user_stats_of(
    user: UserId,
    ratings: impl Iterator<Item = Rating> + Clone,
    scale: RatingScale,
) -> UserStats {
    let (mean, stddev, count) = mean_and_stddev(ratings, scale);
    UserStats {
        user,
        mean,
        stddev,
        count,
    }
}

fn item_stats_of(
    item: ItemId,
    ratings: impl Iterator<Item = Rating> + Clone,
    scale: RatingScale,
) -> ItemStats {
    let (mean, _, rater_count) = mean_and_stddev(ratings, scale);
    ItemStats {
        item,
        mean,
        rater_count,
    }
}

fn mean_and_stddev(
    ratings: impl Iterator<Item = Rating> + Clone,
    scale: RatingScale,
) -> (f64, f64, usize) {
    let (sum, count) = ratings
        .clone()
        .fold((0u64, 0usize), |(s, n), r| (s + r as u64, n + 1));
    if count == 0 {
        return (scale.median as f64, 0.0, 0);
    }
    let mean = sum as f64 / count as f64;
    let sq: f64 = ratings.map(|r| (r as f64 - mean).powi(2)).sum();
    (mean, (sq / count as f64).sqrt(), count)
}

/// Loads a MovieLens `u.data` file (`user \t item \t rating \t timestamp`).
pub fn load_movielens(path: impl AsRef<Path>) -> Result<RatingsMatrix> {
    let file = File::open(path)?;
    read_movielens(BufReader::new(file), RatingScale::default())
}

pub fn read_movielens<R: Read>(reader: R, scale: RatingScale) -> Result<RatingsMatrix> {
    let mut entries = Vec::new();
    let mut lines = Vec::new();
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(Error::Ingest {
                line: line_no,
                message: format!("expected 4 tab-separated fields, found {}", fields.len()),
            });
        }
        let parse = |name: &str, s: &str| -> Result<u64> {
            s.parse::<u64>().map_err(|_| Error::Ingest {
                line: line_no,
                message: format!("{name} field {s:?} is not a non-negative integer"),
            })
        };
        let user = parse("user", fields[0])?;
        let item = parse("item", fields[1])?;
        let rating = parse("rating", fields[2])?;
        parse("timestamp", fields[3])?;
        let too_big = |name: &str| Error::Ingest {
            line: line_no,
            message: format!("{name} id out of range"),
        };
        let user = UserId::try_from(user).map_err(|_| too_big("user"))?;
        let item = ItemId::try_from(item).map_err(|_| too_big("item"))?;
        if rating < scale.min as u64 || rating > scale.max as u64 {
            return Err(Error::Ingest {
                line: line_no,
                message: format!("rating {rating} outside scale {}..{}", scale.min, scale.max),
            });
        }
        entries.push((user, item, rating as Rating));
        lines.push(line_no);
    }
    RatingsMatrix::build(scale, &entries, &lines)
}

#[derive(Debug, Clone)]
pub struct FoldSplit {
    pub fold_index: usize,
    pub train: RatingsMatrix,
    /// Held-out entries, ordered by user id then item id.
    pub test: Vec<Entry>,
}

/// Deals the entries of `matrix` into `k` folds.
///
/// Entries are permuted with a ChaCha8 stream seeded by `seed`; the entry at
/// permuted position `p` goes to the test set of fold `p % k`.
pub fn k_fold_split(matrix: &RatingsMatrix, k: usize, seed: u64) -> Result<Vec<FoldSplit>> {
    if k < 2 || k > matrix.len() {
        return Err(Error::param(format!(
            "fold count must be in 2..={}, got {k}",
            matrix.len()
        )));
    }
    let entries: Vec<Entry> = matrix.entries().collect();
    let mut order: Vec<usize> = (0..entries.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let mut fold_of = vec![0usize; entries.len()];
    for (pos, &entry_idx) in order.iter().enumerate() {
        fold_of[entry_idx] = pos % k;
    }

    (0..k)
        .map(|fold| {
            let mut test = Vec::with_capacity(entries.len() / k + 1);
            let mut train = Vec::with_capacity(entries.len());
            for (entry, &f) in entries.iter().zip(&fold_of) {
                if f == fold {
                    test.push(*entry);
                } else {
                    train.push(*entry);
                }
            }
            Ok(FoldSplit {
                fold_index: fold,
                train: RatingsMatrix::from_entries(matrix.scale(), &train)?,
                test,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(entries: &[Entry]) -> RatingsMatrix {
        RatingsMatrix::from_entries(RatingScale::default(), entries).unwrap()
    }

    #[test]
    fn scale_median_is_midpoint() {
        assert_eq!(RatingScale::new(1, 5).unwrap().median, 3);
        assert_eq!(RatingScale::default(), RatingScale::new(1, 5).unwrap());
        assert!(RatingScale::new(5, 5).is_err());
    }

    #[test]
    fn loads_two_line_file() {
        let m = read_movielens(
            "1\t10\t4\t0\n2\t10\t2\t0\n".as_bytes(),
            RatingScale::default(),
        )
        .unwrap();
        assert_eq!((m.user_count(), m.item_count(), m.len()), (2, 1, 2));
        assert_eq!(m.item_stats(10).rater_count, 2);
    }

    #[test]
    fn loads_empty_file() {
        let m = read_movielens("".as_bytes(), RatingScale::default()).unwrap();
        assert_eq!((m.user_count(), m.item_count(), m.len()), (0, 0, 0));
    }

    #[test]
    fn rejects_malformed_lines() {
        let cases = [
            ("1\t2\t3\n", 1),
            ("1\t2\t3\t0\nx\t2\t3\t0\n", 2),
            ("1\t2\t3\t0\n\n1\t3\t9\t0\n", 3),
            ("1\t2\t3\t0\t7\n", 1),
        ];
        for (text, line) in cases {
            match read_movielens(text.as_bytes(), RatingScale::default()) {
                Err(Error::Ingest { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("expected ingest error for {text:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn rejects_duplicates() {
        let err = read_movielens(
            "1\t2\t3\t0\n1\t2\t4\t5\n".as_bytes(),
            RatingScale::default(),
        )
        .unwrap_err();
        assert!(matches!(
            err,
            Error::DuplicateRating {
                line: 2,
                user: 1,
                item: 2
            }
        ));
    }

    #[test]
    fn user_stats_examples() {
        let m = matrix(&[
            (1, 1, 2),
            (1, 2, 4),
            (2, 1, 5),
            (3, 1, 1),
            (3, 2, 3),
            (3, 3, 5),
        ]);
        let s = m.user_stats(1).unwrap();
        assert_eq!((s.mean, s.stddev, s.count), (3.0, 1.0, 2));
        let s = m.user_stats(2).unwrap();
        assert_eq!((s.mean, s.stddev, s.count), (5.0, 0.0, 1));
        let s = m.user_stats(3).unwrap();
        assert_eq!(s.mean, 3.0);
        assert!((s.stddev - (8.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert!((s.stddev - 1.63299).abs() < 1e-5);
        assert!(matches!(m.user_stats(99), Err(Error::UnknownUser(99))));
    }

    #[test]
    fn item_stats_examples() {
        let m = matrix(&[(1, 7, 4), (2, 7, 2), (1, 8, 5), (2, 8, 5), (3, 8, 5)]);
        let s = m.item_stats(7);
        assert_eq!((s.mean, s.rater_count), (3.0, 2));
        let s = m.item_stats(8);
        assert_eq!((s.mean, s.rater_count), (5.0, 3));
        let s = m.item_stats(1234);
        assert_eq!((s.mean, s.rater_count), (3.0, 0));
    }

    #[test]
    fn folds_deal_pigeonhole_sizes() {
        let entries: Vec<Entry> = (0..11).map(|i| (i, 1, 3)).collect();
        let m = matrix(&entries);
        let mut sizes: Vec<usize> = k_fold_split(&m, 5, 1)
            .unwrap()
            .iter()
            .map(|f| f.test.len())
            .collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![2, 2, 2, 2, 3]);
    }

    #[test]
    fn folds_are_deterministic() {
        let entries: Vec<Entry> = (0..10).map(|i| (i % 4, i, 1 + (i % 5) as u8)).collect();
        let m = matrix(&entries);
        let a = k_fold_split(&m, 5, 99).unwrap();
        let b = k_fold_split(&m, 5, 99).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.test, y.test);
            assert_eq!(x.train, y.train);
        }
    }

    #[test]
    fn fold_parameter_errors() {
        let m = matrix(&[(1, 1, 1), (1, 2, 2), (2, 1, 3)]);
        assert!(k_fold_split(&m, 1, 0).is_err());
        assert!(k_fold_split(&m, 4, 0).is_err());
        assert!(k_fold_split(&RatingsMatrix::empty(RatingScale::default()), 2, 0).is_err());
    }
}
