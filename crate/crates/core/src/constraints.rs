//! Logistical constraints: binary node compatibility (BNC), forbidden roads,
//! and forbidden (city, step) slots.

use alloc::format;
use alloc::vec::Vec;

use crate::matrix::default_penalty_weight;
use crate::{CostMatrix, Error, Result};

/// Optional overrides for the penalty weights. Unset weights fall back to
/// [`default_penalty_weight`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PenaltyWeights {
    /// Visit-each-city-once penalty.
    pub p: Option<f64>,
    /// One-city-per-step penalty; only used by the full-space reference cost.
    pub q: Option<f64>,
    /// BNC.
    pub k: Option<f64>,
    /// Road closures.
    pub r: Option<f64>,
    /// Time-step slots.
    pub t: Option<f64>,
}

/// Penalty weights after defaults are applied.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Lambdas {
    pub p: f64,
    pub q: f64,
    pub k: f64,
    pub r: f64,
    pub t: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConstraintSet {
    /// Category bit per city; consecutive visits within one category are
    /// penalized.
    pub bnc: Option<Vec<bool>>,
    /// `road[i * n + j]` forbids the direct move `i -> j`.
    pub road: Option<Vec<bool>>,
    /// `time[i * n + t]` forbids city `i` at step `t` (0-based).
    pub time: Option<Vec<bool>>,
    pub weights: PenaltyWeights,
}

impl ConstraintSet {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn with_bnc(mut self, k: Vec<bool>) -> Self {
        self.bnc = Some(k);
        self
    }

    pub fn with_road(mut self, r: Vec<bool>) -> Self {
        self.road = Some(r);
        self
    }

    pub fn with_time(mut self, t: Vec<bool>) -> Self {
        self.time = Some(t);
        self
    }

    pub fn with_weights(mut self, w: PenaltyWeights) -> Self {
        self.weights = w;
        self
    }

    pub fn is_empty(&self) -> bool {
        self.bnc.is_none() && self.road.is_none() && self.time.is_none()
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if let Some(k) = &self.bnc {
            if k.len() != n {
                return Err(Error::Dimension { what: "bnc vector", expected: n, got: k.len() });
            }
        }
        if let Some(r) = &self.road {
            if r.len() != n * n {
                return Err(Error::Dimension { what: "road matrix", expected: n * n, got: r.len() });
            }
            if let Some(i) = (0..n).find(|&i| r[i * n + i]) {
                return Err(Error::InvalidConstraint(format!(
                    "road matrix diagonal ({i}, {i}) must be 0"
                )));
            }
        }
        if let Some(t) = &self.time {
            if t.len() != n * n {
                return Err(Error::Dimension { what: "time matrix", expected: n * n, got: t.len() });
            }
        }
        let w = &self.weights;
        for (name, v) in [("p", w.p), ("q", w.q), ("k", w.k), ("r", w.r), ("t", w.t)] {
            if let Some(v) = v {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidConstraint(format!(
                        "penalty weight {name} = {v} must be finite and nonnegative"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Applies the default rule to every weight that is not overridden.
    pub fn resolve_weights(&self, cost: &CostMatrix) -> Result<Lambdas> {
        let d = default_penalty_weight(cost);
        let w = &self.weights;
        let l = Lambdas {
            p: w.p.unwrap_or(d),
            q: w.q.unwrap_or(d),
            k: w.k.unwrap_or(d),
            r: w.r.unwrap_or(d),
            t: w.t.unwrap_or(d),
        };
        if l.p <= 0.0 {
            return Err(Error::InvalidConstraint(
                "the visit-once penalty weight must be positive (override it for all-zero matrices)"
                    .into(),
            ));
        }
        Ok(l)
    }

    /// Number of logistical-constraint violations of a visiting sequence
    /// (BNC and road transitions, forbidden slots). Revisits are not counted
    /// here.
    pub fn violations(&self, seq: &[usize]) -> usize {
        let n = seq.len();
        let mut count = 0;
        for w in seq.windows(2) {
            let (a, b) = (w[0], w[1]);
            if a == b {
                continue;
            }
            if let Some(k) = &self.bnc {
                if k[a] == k[b] {
                    count += 1;
                }
            }
            if let Some(r) = &self.road {
                if r[a * n + b] {
                    count += 1;
                }
            }
        }
        if let Some(t) = &self.time {
            count += seq.iter().enumerate().filter(|&(step, &c)| t[c * n + step]).count();
        }
        count
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn validation_catches_shapes() {
        let c = ConstraintSet::none().with_bnc(vec![true, false]);
        assert!(c.validate(3).is_err());
        assert!(c.validate(2).is_ok());
        let r = ConstraintSet::none().with_road(vec![true, false, false, false]);
        assert!(r.validate(2).is_err());
        let w = ConstraintSet::none().with_weights(PenaltyWeights { p: Some(-1.0), ..Default::default() });
        assert!(w.validate(2).is_err());
    }

    #[test]
    fn zero_matrix_needs_override() {
        let z = CostMatrix::from_fn(2, |_, _| 0.0).unwrap();
        assert!(ConstraintSet::none().resolve_weights(&z).is_err());
        let c = ConstraintSet::none().with_weights(PenaltyWeights { p: Some(1.0), ..Default::default() });
        assert_eq!(c.resolve_weights(&z).unwrap().p, 1.0);
    }

    #[test]
    fn counts_violations() {
        let c = ConstraintSet::none()
            .with_bnc(vec![true, true, false])
            .with_time(vec![false, false, false, false, false, false, true, false, false]);
        // 0 -> 1 is same category, city 2 is forbidden at step 0.
        assert_eq!(c.violations(&[2, 0, 1]), 2);
        assert_eq!(c.violations(&[0, 2, 1]), 0);
    }
}
