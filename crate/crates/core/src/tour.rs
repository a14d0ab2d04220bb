//! Plain route costs over permutations, used by the heuristics, the clustered
//! solver and the ACO-relative ratio.

use alloc::vec;

use crate::{CostMatrix, Error, Result};

pub fn is_permutation(tour: &[usize], n: usize) -> bool {
    if tour.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &c in tour {
        if c >= n || seen[c] {
            return false;
        }
        seen[c] = true;
    }
    true
}

/// Sum of consecutive edge costs, plus `tour[n-1] -> tour[0]` when `closed`.
pub fn route_cost(cost: &CostMatrix, tour: &[usize], closed: bool) -> Result<f64> {
    if !is_permutation(tour, cost.n()) {
        return Err(Error::NotPermutation(cost.n()));
    }
    Ok(route_cost_unchecked(cost, tour, closed))
}

/// Like [`route_cost`] but without the permutation check; also accepts
/// sub-paths. Closed tours are summed starting from their smallest city so
/// every rotation of a cycle yields the identical value.
pub fn route_cost_unchecked(cost: &CostMatrix, tour: &[usize], closed: bool) -> f64 {
    let len = tour.len();
    if !closed || len < 2 {
        return tour.windows(2).map(|w| cost.get(w[0], w[1])).sum();
    }
    let start = (0..len).min_by_key(|&k| tour[k]).unwrap_or(0);
    let mut total = 0.0;
    for k in 0..len {
        total += cost.get(tour[(start + k) % len], tour[(start + k + 1) % len]);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn m3() -> CostMatrix {
        CostMatrix::from_rows(&[vec![0., 1., 4.], vec![2., 0., 1.], vec![1., 3., 0.]]).unwrap()
    }

    #[test]
    fn closed_and_open() {
        assert_eq!(route_cost(&m3(), &[0, 1, 2], true).unwrap(), 3.0);
        assert_eq!(route_cost(&m3(), &[0, 1, 2], false).unwrap(), 2.0);
    }

    #[test]
    fn rotation_invariant() {
        let m = CostMatrix::from_fn(7, |i, j| 0.1 * (i * 7 + j) as f64 + 1.0 / (1 + i + j) as f64).unwrap();
        let t: Vec<usize> = vec![3, 0, 6, 2, 5, 1, 4];
        let base = route_cost(&m, &t, true).unwrap();
        for r in 0..7 {
            let mut u = t.clone();
            u.rotate_left(r);
            assert_eq!(route_cost(&m, &u, true).unwrap(), base);
        }
    }

    #[test]
    fn two_city_cycle() {
        let m = CostMatrix::from_rows(&[vec![0., 2.5], vec![4.0, 0.]]).unwrap();
        assert_eq!(route_cost(&m, &[0, 1], true).unwrap(), 6.5);
    }

    #[test]
    fn rejects_non_permutations() {
        assert!(route_cost(&m3(), &[0, 0, 2], true).is_err());
        assert!(route_cost(&m3(), &[0, 1], true).is_err());
        let long: Vec<usize> = vec![0, 1, 2, 3];
        assert!(route_cost(&m3(), &long, true).is_err());
    }
}
