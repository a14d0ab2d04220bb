//! Square travel-cost matrices.

use alloc::format;
use alloc::vec::Vec;

use crate::{Error, Result};

/// An `n × n` table of nonnegative, finite, possibly asymmetric travel costs
/// with a zero diagonal. Entry `(i, j)` is the cost of going from `i` to `j`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CostMatrix {
    n: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    /// Builds a matrix from row-major entries.
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidMatrix(format!("need at least 2 cities, got {n}")));
        }
        if data.len() != n * n {
            return Err(Error::Dimension {
                what: "matrix entries",
                expected: n * n,
                got: data.len(),
            });
        }
        for i in 0..n {
            for j in 0..n {
                let v = data[i * n + j];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidMatrix(format!(
                        "entry ({i}, {j}) = {v} is not a finite nonnegative number"
                    )));
                }
                if i == j && v != 0.0 {
                    return Err(Error::InvalidMatrix(format!(
                        "diagonal entry ({i}, {i}) = {v} must be 0"
                    )));
                }
            }
        }
        Ok(Self { n, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidMatrix(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Self::from_row_major(n, data)
    }

    /// Builds a matrix by evaluating `f(i, j)` off the diagonal.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(if i == j { 0.0 } else { f(i, j) });
            }
        }
        Self::from_row_major(n, data)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    /// Largest entry of the matrix.
    pub fn max_entry(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    /// Off-diagonal entries in row-major order.
    pub fn off_diagonal(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.n;
        self.data
            .iter()
            .enumerate()
            .filter(move |(k, _)| k / n != k % n)
            .map(|(_, &v)| v)
    }

    /// The matrix restricted to `cities`, in the given order.
    pub fn submatrix(&self, cities: &[usize]) -> Result<Self> {
        let m = cities.len();
        let mut data = Vec::with_capacity(m * m);
        for &a in cities {
            for &b in cities {
                data.push(self.get(a, b));
            }
        }
        Self::from_row_major(m, data)
    }
}

/// Default weight for every penalty term: the largest cost times `n`.
///
/// A zero matrix gives zero, which [`crate::TspProblem`] rejects for the
/// mandatory visit-once penalty; callers must override it in that case.
pub fn default_penalty_weight(cost: &CostMatrix) -> f64 {
    cost.max_entry() * cost.n() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn rejects_bad_matrices() {
        assert!(CostMatrix::from_rows(&[vec![0.0]]).is_err());
        assert!(CostMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.5]]).is_err());
        assert!(CostMatrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).is_err());
        assert!(CostMatrix::from_rows(&[vec![0.0, f64::NAN], vec![1.0, 0.0]]).is_err());
        assert!(CostMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0]]).is_err());
    }

    #[test]
    fn penalty_weight_rule() {
        let m = CostMatrix::from_fn(5, |i, j| if (i, j) == (3, 1) { 10.0 } else { 1.0 }).unwrap();
        assert_eq!(default_penalty_weight(&m), 50.0);
        let z = CostMatrix::from_fn(2, |_, _| 0.0).unwrap();
        assert_eq!(default_penalty_weight(&z), 0.0);
        let m3 = CostMatrix::from_fn(3, |i, j| if i < j { 7.5 } else { 2.0 }).unwrap();
        assert_eq!(default_penalty_weight(&m3), 22.5);
    }

    #[test]
    fn submatrix_keeps_order() {
        let m = CostMatrix::from_fn(4, |i, j| (10 * i + j) as f64).unwrap();
        let s = m.submatrix(&[3, 1]).unwrap();
        assert_eq!(s.get(0, 1), 31.0);
        assert_eq!(s.get(1, 0), 13.0);
    }
}
