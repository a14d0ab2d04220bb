//! Approximation ratios, shot planners and the least-squares fits used by the
//! experiment reports.

use alloc::vec::Vec;

use crate::math::{ceil, exp, ln, powi, sqrt};

fn sq(x: f64) -> f64 {
    x * x
}
use crate::oracle::{Extremes, ExtremesMode};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ArRecord {
    pub ar_exp: f64,
    pub ar_min: f64,
    pub extremes_mode: ExtremesMode,
    pub c_expected: f64,
    pub c_min: f64,
    pub c_opt: f64,
    pub c_worst: f64,
    /// `c_opt == c_worst`; both ratios are then reported as 1.
    pub degenerate: bool,
}

/// `(c − c_worst) / (c_opt − c_worst)` for the expected and the best sampled
/// cost.
pub fn approximation_ratios(c_expected: f64, c_min: f64, extremes: &Extremes) -> ArRecord {
    let span = extremes.c_opt - extremes.c_worst;
    let degenerate = !(span.abs() > crate::COST_TOL * extremes.c_worst.abs().max(1.0));
    let ratio = |c: f64| if degenerate { 1.0 } else { (c - extremes.c_worst) / span };
    ArRecord {
        ar_exp: ratio(c_expected),
        ar_min: ratio(c_min),
        extremes_mode: extremes.mode,
        c_expected,
        c_min,
        c_opt: extremes.c_opt,
        c_worst: extremes.c_worst,
        degenerate,
    }
}

/// `c_method / c_aco`; below 1 beats the ant colony baseline.
pub fn relative_ratio(c_method: f64, c_aco: f64) -> Result<f64> {
    if !(c_aco > 0.0) {
        return Err(Error::InvalidArgument("reference cost must be positive".into()));
    }
    Ok(c_method / c_aco)
}

/// Shots needed to estimate an expectation within relative error `delta`:
/// `ceil(var / (δ² E²))`, at least 1.
pub fn required_shots(expectation: f64, variance: f64, delta: f64) -> Result<u64> {
    if !(expectation > 0.0 && delta > 0.0 && variance >= 0.0) {
        return Err(Error::InvalidArgument("need expectation > 0, delta > 0, variance >= 0".into()));
    }
    Ok((ceil(variance / (delta * delta * expectation * expectation)) as u64).max(1))
}

/// Shots needed to see an outcome of probability `rho` at least once with
/// probability `pi`: `ceil(ln(1 − π) / ln(1 − ρ))`, at least 1.
pub fn final_sampling_shots(rho: f64, pi: f64) -> Result<u64> {
    if !(rho > 0.0 && rho < 1.0 && pi > 0.0 && pi < 1.0) {
        return Err(Error::InvalidArgument("need 0 < rho < 1 and 0 < pi < 1".into()));
    }
    Ok((ceil(ln(1.0 - pi) / ln(1.0 - rho)) as u64).max(1))
}

/// `AR(p) ≈ 1 − A e^{−k p}`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FitResult {
    pub a: f64,
    pub k: f64,
    /// Root mean square residual of the log-linear fit.
    pub residual: f64,
    /// `false` when `k <= 0`: the fitted curve never saturates.
    pub converging: bool,
}

impl FitResult {
    pub fn predict(&self, p: f64) -> f64 {
        1.0 - self.a * exp(-self.k * p)
    }

    /// Smallest depth whose fitted ratio reaches `target`, at least 1.
    pub fn p_star(&self, target: f64) -> Option<u64> {
        if !self.converging || !(target < 1.0) {
            return None;
        }
        let p = ceil((ln(self.a) - ln(1.0 - target)) / self.k);
        Some(if p < 1.0 { 1 } else { p as u64 })
    }
}

/// Least squares of `ln(1 − ar)` against `p`. Points with `ar >= 1` carry
/// no information about the gap and are dropped.
pub fn fit_saturation(points: &[(f64, f64)]) -> Result<FitResult> {
    let usable: Vec<(f64, f64)> =
        points.iter().filter(|&&(_, ar)| ar < 1.0 - 1e-12).map(|&(p, ar)| (p, ln(1.0 - ar))).collect();
    if usable.len() < 2 {
        return Err(Error::InvalidArgument("need at least 2 points with ar < 1".into()));
    }
    let xs: Vec<f64> = usable.iter().map(|u| u.0).collect();
    let ys: Vec<f64> = usable.iter().map(|u| u.1).collect();
    let fit = linear_fit(&xs, &ys)?;
    let rms = sqrt(
        xs.iter().zip(&ys).map(|(x, y)| sq(y - fit.intercept - fit.slope * x)).sum::<f64>() / xs.len() as f64,
    );
    let k = -fit.slope;
    Ok(FitResult { a: exp(fit.intercept), k, residual: rms, converging: k > 0.0 })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuadraticFit {
    /// `y ≈ c0 + c1 x + c2 x²`.
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub r2: f64,
}

fn r_squared(ys: &[f64], pred: impl Fn(usize) -> f64) -> f64 {
    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    let ss_tot: f64 = ys.iter().map(|y| sq(y - mean)).sum();
    let ss_res: f64 = ys.iter().enumerate().map(|(i, y)| sq(y - pred(i))).sum();
    if ss_tot == 0.0 {
        if ss_res == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        1.0 - ss_res / ss_tot
    }
}

fn check_xy(xs: &[f64], ys: &[f64], min: usize) -> Result<()> {
    if xs.len() != ys.len() {
        return Err(Error::Dimension { what: "fit samples", expected: xs.len(), got: ys.len() });
    }
    if xs.len() < min {
        return Err(Error::InvalidArgument(alloc::format!("need at least {min} points")));
    }
    Ok(())
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    check_xy(xs, ys, 2)?;
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| sq(x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("x values are all equal".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = r_squared(ys, |i| intercept + slope * xs[i]);
    Ok(LinearFit { slope, intercept, r2 })
}

/// Solves the 3x3 normal equations by Cramer's rule.
pub fn quadratic_fit(xs: &[f64], ys: &[f64]) -> Result<QuadraticFit> {
    check_xy(xs, ys, 3)?;
    let s = |k: i32| xs.iter().map(|x| powi(*x, k)).sum::<f64>();
    let t = |k: i32| xs.iter().zip(ys).map(|(x, y)| powi(*x, k) * y).sum::<f64>();
    let m = [[s(0), s(1), s(2)], [s(1), s(2), s(3)], [s(2), s(3), s(4)]];
    let r = [t(0), t(1), t(2)];
    let det3 = |a: [[f64; 3]; 3]| {
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    };
    let d = det3(m);
    if d.abs() < 1e-300 {
        return Err(Error::InvalidArgument("need at least 3 distinct x values".into()));
    }
    let mut c = [0.0; 3];
    for (col, out) in c.iter_mut().enumerate() {
        let mut mm = m;
        for row in 0..3 {
            mm[row][col] = r[row];
        }
        *out = det3(mm) / d;
    }
    let r2 = r_squared(ys, |i| c[0] + c[1] * xs[i] + c[2] * xs[i] * xs[i]);
    Ok(QuadraticFit { c0: c[0], c1: c[1], c2: c[2], r2 })
}

pub fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

pub fn median(v: &[f64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() / 2;
    Some(if s.len() % 2 == 1 { s[m] } else { 0.5 * (s[m - 1] + s[m]) })
}

/// Sample standard deviation (`n − 1` denominator); 0 for fewer than 2 values.
pub fn std_dev(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = v.iter().sum::<f64>() / v.len() as f64;
    sqrt(v.iter().map(|x| sq(x - m)).sum::<f64>() / (v.len() - 1) as f64)
}

/// Large-sample standard error of the median, `sqrt(π/2) · s / sqrt(n)`.
pub fn std_err_median(v: &[f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    sqrt(core::f64::consts::FRAC_PI_2) * std_dev(v) / sqrt(v.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::Witness;
    use crate::SequenceState;
    use alloc::vec;

    fn ext(opt: f64, worst: f64) -> Extremes {
        Extremes {
            c_opt: opt,
            c_worst: worst,
            mode: ExtremesMode::Subspace,
            opt_witness: Witness::Sequence(SequenceState::new(vec![0, 1])),
        }
    }

    #[test]
    fn ratio_endpoints() {
        let e = ext(2.0, 12.0);
        assert_eq!(approximation_ratios(2.0, 2.0, &e).ar_exp, 1.0);
        assert_eq!(approximation_ratios(12.0, 2.0, &e).ar_exp, 0.0);
        assert_eq!(approximation_ratios(7.0, 2.0, &e).ar_exp, 0.5);
        let d = approximation_ratios(3.0, 3.0, &ext(3.0, 3.0));
        assert!(d.degenerate && d.ar_exp == 1.0 && d.ar_min == 1.0);
    }

    #[test]
    fn relative() {
        assert_eq!(relative_ratio(5.0, 5.0).unwrap(), 1.0);
        assert!((relative_ratio(9.0, 10.0).unwrap() - 0.9).abs() < 1e-15);
        assert!(relative_ratio(1.0, 0.0).is_err());
    }

    #[test]
    fn shot_planners() {
        assert_eq!(required_shots(10.0, 4.0, 0.1).unwrap(), 4);
        assert_eq!(required_shots(10.0, 0.0, 0.1).unwrap(), 1);
        assert_eq!(required_shots(10.0, 400.0, 0.05).unwrap(), 4 * required_shots(10.0, 400.0, 0.1).unwrap());
        assert!(required_shots(0.0, 1.0, 0.1).is_err());
        assert_eq!(final_sampling_shots(0.5, 0.99).unwrap(), 7);
        assert_eq!(final_sampling_shots(1.0 - 1e-9, 0.99).unwrap(), 1);
        assert_eq!(final_sampling_shots(1.0 / 512.0, 0.5).unwrap(), 355);
        assert!(final_sampling_shots(1.0, 0.5).is_err());
    }

    #[test]
    fn saturation_recovers_parameters() {
        let pts: Vec<(f64, f64)> = (1..=6).map(|p| (p as f64, 1.0 - 0.5 * exp(-(p as f64)))).collect();
        let f = fit_saturation(&pts).unwrap();
        assert!((f.a - 0.5).abs() < 1e-6 && (f.k - 1.0).abs() < 1e-6);
        assert_eq!(f.p_star(0.95), Some(3));
        assert_eq!(f.p_star(0.1), Some(1));
        assert!(fit_saturation(&[(1.0, 0.5), (2.0, 1.0)]).is_err());
    }

    #[test]
    fn fits() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let l = linear_fit(&xs, &[3.0, 5.0, 7.0, 9.0]).unwrap();
        assert!((l.slope - 2.0).abs() < 1e-12 && (l.intercept - 1.0).abs() < 1e-12 && (l.r2 - 1.0).abs() < 1e-12);
        let q = quadratic_fit(&xs, &[2.0, 7.0, 14.0, 23.0]).unwrap();
        assert!((q.c2 - 1.0).abs() < 1e-9 && (q.c1 - 2.0).abs() < 1e-9 && (q.c0 + 1.0).abs() < 1e-9);
        assert!(quadratic_fit(&[1.0, 1.0, 2.0], &[1.0, 1.0, 2.0]).is_err());
    }

    #[test]
    fn summaries() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(mean(&[]), None);
        assert_eq!(std_err_median(&[1.0]), 0.0);
    }
}
