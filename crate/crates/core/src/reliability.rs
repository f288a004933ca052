//! Resource-allocation reliability between two users: the sum of `1/k_z`
//! over their co-rated items, where `k_z` counts the raters of item `z`.
//! Shared popular items contribute little; shared niche items contribute a
//! lot.

use crate::error::Result;
use crate::ratings::{RatingsMatrix, UserId};
use crate::similarity::{co_rated, PairTable};

pub fn resource_allocation(matrix: &RatingsMatrix, u: UserId, v: UserId) -> Result<f64> {
    let (a, b) = (matrix.require_user(u)?, matrix.require_user(v)?);
    Ok(resource_allocation_at(matrix, a, b))
}

pub fn resource_allocation_at(matrix: &RatingsMatrix, u: usize, v: usize) -> f64 {
    co_rated(matrix, u, v)
        .map(|(p, _, _)| 1.0 / matrix.item_stats_at(p).rater_count as f64)
        .sum()
}

pub fn reliability_table(matrix: &RatingsMatrix) -> PairTable {
    PairTable::build(matrix.user_count(), |u, v| {
        resource_allocation_at(matrix, u, v)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratings::{Entry, RatingScale};

    fn matrix(entries: &[Entry]) -> RatingsMatrix {
        RatingsMatrix::from_entries(RatingScale::default(), entries).unwrap()
    }

    #[test]
    fn disjoint_users_score_zero() {
        let m = matrix(&[(1, 1, 3), (2, 2, 4)]);
        assert_eq!(resource_allocation(&m, 1, 2).unwrap(), 0.0);
    }

    #[test]
    fn sums_inverse_rater_counts() {
        // item 1 rated by users 1,2; item 2 rated by users 1,2,3,4
        let m = matrix(&[
            (1, 1, 3),
            (2, 1, 4),
            (1, 2, 5),
            (2, 2, 1),
            (3, 2, 2),
            (4, 2, 2),
        ]);
        assert_eq!(resource_allocation(&m, 1, 2).unwrap(), 0.75);
        assert_eq!(resource_allocation(&m, 2, 1).unwrap(), 0.75);
        assert_eq!(resource_allocation(&m, 3, 4).unwrap(), 0.25);
        assert!(resource_allocation(&m, 1, 9).is_err());
    }

    #[test]
    fn item_rated_by_everyone() {
        let entries: Vec<Entry> = (1..=943).map(|u| (u, 50, 4)).collect();
        let m = matrix(&entries);
        let ra = resource_allocation(&m, 1, 2).unwrap();
        assert!((ra - 1.0 / 943.0).abs() < 1e-15);
        assert!((ra - 0.00106).abs() < 1e-5);
    }

    #[test]
    fn monotone_in_items_and_raters() {
        let base = vec![(1, 1, 3), (2, 1, 3), (3, 1, 3)];
        let before = resource_allocation(&matrix(&base), 1, 2).unwrap();

        let mut more_items = base.clone();
        more_items.extend([(1, 2, 4), (2, 2, 4)]);
        assert!(resource_allocation(&matrix(&more_items), 1, 2).unwrap() > before);

        let mut more_raters = base;
        more_raters.push((4, 1, 1));
        assert!(resource_allocation(&matrix(&more_raters), 1, 2).unwrap() < before);
    }
}
