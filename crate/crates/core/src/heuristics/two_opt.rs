use alloc::vec::Vec;

use crate::tour::route_cost_unchecked;
use crate::{CostMatrix, Error, Result};

fn improves(new: f64, old: f64) -> bool {
    new < old - 1e-12 * old.abs().max(1.0)
}

/// First segment reversal `tour[a..=b]` (scanning `a` then `b` upward) that
/// lowers the closed cost, if any. Costs are recomputed in full, so
/// asymmetric matrices are handled.
pub fn improving_reversal(cost: &CostMatrix, tour: &[usize]) -> Option<(usize, usize)> {
    let n = tour.len();
    let base = route_cost_unchecked(cost, tour, true);
    let mut work = tour.to_vec();
    for a in 0..n {
        for b in a + 1..n {
            work[a..=b].reverse();
            let c = route_cost_unchecked(cost, &work, true);
            work[a..=b].reverse();
            if improves(c, base) {
                return Some((a, b));
            }
        }
    }
    None
}

/// Applies improving reversals until none is left.
pub fn two_opt(cost: &CostMatrix, tour: &[usize]) -> Result<Vec<usize>> {
    if !crate::tour::is_permutation(tour, cost.n()) {
        return Err(Error::NotPermutation(cost.n()));
    }
    let mut t = tour.to_vec();
    while let Some((a, b)) = improving_reversal(cost, &t) {
        t[a..=b].reverse();
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn euclid(pts: &[(f64, f64)]) -> CostMatrix {
        CostMatrix::from_fn(pts.len(), |i, j| {
            let (dx, dy) = (pts[i].0 - pts[j].0, pts[i].1 - pts[j].1);
            crate::math::sqrt(dx * dx + dy * dy)
        })
        .unwrap()
    }

    #[test]
    fn removes_crossing() {
        // Unit square; 0-2-1-3 crosses itself.
        let m = euclid(&[(0., 0.), (1., 0.), (1., 1.), (0., 1.)]);
        let crossed = vec![0, 2, 1, 3];
        let before = route_cost_unchecked(&m, &crossed, true);
        let out = two_opt(&m, &crossed).unwrap();
        let after = route_cost_unchecked(&m, &out, true);
        assert!(after < before);
        assert!((after - 4.0).abs() < 1e-12);
        assert!(improving_reversal(&m, &out).is_none());
    }

    #[test]
    fn fixed_point() {
        let m = euclid(&[(0., 0.), (1., 0.), (1., 1.), (0., 1.)]);
        assert_eq!(two_opt(&m, &[0, 1, 2, 3]).unwrap(), vec![0, 1, 2, 3]);
        assert!(two_opt(&m, &[0, 1, 1, 3]).is_err());
    }

    #[test]
    fn direction_matters() {
        // Cheap clockwise, expensive counter-clockwise.
        let m = CostMatrix::from_fn(4, |i, j| if j == (i + 1) % 4 { 1.0 } else { 10.0 }).unwrap();
        let out = two_opt(&m, &[0, 3, 2, 1]).unwrap();
        assert_eq!(route_cost_unchecked(&m, &out, true), 4.0);
    }
}
