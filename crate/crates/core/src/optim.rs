//! Derivative-free minimization with Powell's COBYLA scheme, specialized to
//! problems without constraints.
//!
//! The method keeps a simplex of `d + 1` points, fits the linear interpolant
//! through it, and steps a distance `rho` down the model gradient. The
//! simplex geometry is repaired when vertices drift too far from the best
//! point or collapse onto a face, and `rho` is halved when a step fails on
//! an acceptable simplex, until it reaches `rho_end`.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::sqrt;

const ALPHA: f64 = 0.25;
const BETA: f64 = 2.1;
const GAMMA: f64 = 0.5;
const DELTA: f64 = 1.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cobyla {
    pub rho_begin: f64,
    pub rho_end: f64,
    /// Maximum number of objective evaluations.
    pub max_evals: usize,
}

impl Default for Cobyla {
    fn default() -> Self {
        Self { rho_begin: 0.5, rho_end: 1e-3, max_evals: 200 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
    /// `true` when `rho` reached `rho_end`, `false` when the evaluation
    /// budget ran out first.
    pub converged: bool,
}

struct Simplex {
    pole: Vec<f64>,
    f_pole: f64,
    verts: Vec<Vec<f64>>,
    f_verts: Vec<f64>,
}

impl Simplex {
    /// Puts `x` in place of vertex `j`, promoting it to the pole if it is the
    /// new best point.
    fn replace(&mut self, j: usize, x: Vec<f64>, fx: f64) {
        self.verts[j] = x;
        self.f_verts[j] = fx;
        if fx < self.f_pole {
            core::mem::swap(&mut self.verts[j], &mut self.pole);
            core::mem::swap(&mut self.f_verts[j], &mut self.f_pole);
        }
    }

    /// Rows are vertex displacements from the pole.
    fn displacements(&self) -> Vec<Vec<f64>> {
        self.verts
            .iter()
            .map(|v| v.iter().zip(&self.pole).map(|(a, b)| a - b).collect())
            .collect()
    }
}

fn norm(v: &[f64]) -> f64 {
    sqrt(v.iter().map(|x| x * x).sum())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gauss–Jordan inverse with partial pivoting; `None` if singular.
fn invert(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let d = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut inv: Vec<Vec<f64>> = (0..d)
        .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for col in 0..d {
        let piv = (col..d).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = a[col][col];
        for k in 0..d {
            a[col][k] /= p;
            inv[col][k] /= p;
        }
        for r in 0..d {
            if r != col {
                let factor = a[r][col];
                if factor != 0.0 {
                    for k in 0..d {
                        a[r][k] -= factor * a[col][k];
                        inv[r][k] -= factor * inv[col][k];
                    }
                }
            }
        }
    }
    Some(inv)
}

impl Cobyla {
    pub fn minimize<F: FnMut(&[f64]) -> f64>(&self, mut f: F, x0: &[f64]) -> Minimum {
        let d = x0.len();
        let mut evals = 0usize;
        let mut eval = |x: &[f64], evals: &mut usize| {
            *evals += 1;
            let v = f(x);
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        };
        let mut rho = self.rho_begin;

        let f0 = eval(x0, &mut evals);
        let mut s = Simplex {
            pole: x0.to_vec(),
            f_pole: f0,
            verts: Vec::with_capacity(d),
            f_verts: Vec::with_capacity(d),
        };
        if d == 0 {
            return Minimum { x: s.pole, f: s.f_pole, evals, converged: true };
        }
        for j in 0..d {
            if evals >= self.max_evals {
                // Degenerate budget: report the best point seen.
                let (x, fx) = best_of(&s);
                return Minimum { x, f: fx, evals, converged: false };
            }
            let mut v = s.pole.clone();
            v[j] += rho;
            let fv = eval(&v, &mut evals);
            s.verts.push(v);
            s.f_verts.push(fv);
            let last = s.verts.len() - 1;
            if fv < s.f_pole {
                core::mem::swap(&mut s.verts[last], &mut s.pole);
                core::mem::swap(&mut s.f_verts[last], &mut s.f_pole);
            }
        }

        let mut skip_geometry = false;
        let converged = loop {
            if evals >= self.max_evals {
                break false;
            }
            let disp = s.displacements();
            let simi = match invert(&disp) {
                Some(m) => m,
                None => {
                    // Rebuild a fresh coordinate simplex around the pole.
                    for j in 0..d {
                        let mut v = s.pole.clone();
                        v[j] += rho;
                        s.verts[j] = v;
                        s.f_verts[j] = f64::INFINITY;
                    }
                    for j in 0..d {
                        if evals >= self.max_evals {
                            break;
                        }
                        let v = s.verts[j].clone();
                        s.f_verts[j] = eval(&v, &mut evals);
                    }
                    continue;
                }
            };
            // Column j of simi is the gradient of the barycentric coordinate of
            // vertex j.
            let cols: Vec<Vec<f64>> = (0..d).map(|j| (0..d).map(|i| simi[i][j]).collect()).collect();
            let veta: Vec<f64> = disp.iter().map(|r| norm(r)).collect();
            let vsig: Vec<f64> = cols.iter().map(|c| 1.0 / norm(c)).collect();
            let parsig = ALPHA * rho;
            let pareta = BETA * rho;
            let acceptable = veta.iter().all(|&v| v <= pareta) && vsig.iter().all(|&v| v >= parsig);

            // Linear model gradient: disp · g = Δf.
            let df: Vec<f64> = s.f_verts.iter().map(|fv| fv - s.f_pole).collect();
            let grad: Vec<f64> = (0..d).map(|i| dot(&simi[i], &df)).collect();

            if !acceptable && !skip_geometry {
                let jdrop = match (0..d).filter(|&j| veta[j] > pareta).max_by(|&a, &b| veta[a].total_cmp(&veta[b])) {
                    Some(j) => j,
                    None => (0..d).min_by(|&a, &b| vsig[a].total_cmp(&vsig[b])).unwrap_or(0),
                };
                let scale = GAMMA * rho * vsig[jdrop];
                let mut dx: Vec<f64> = cols[jdrop].iter().map(|c| scale * c).collect();
                if dot(&grad, &dx) > 0.0 {
                    dx.iter_mut().for_each(|v| *v = -*v);
                }
                let x: Vec<f64> = s.pole.iter().zip(&dx).map(|(a, b)| a + b).collect();
                let fx = eval(&x, &mut evals);
                s.replace(jdrop, x, fx);
                skip_geometry = true;
                continue;
            }
            skip_geometry = false;

            let gnorm = norm(&grad);
            let mut improved_enough = false;
            if gnorm > 0.0 && gnorm.is_finite() {
                let dx: Vec<f64> = grad.iter().map(|g| -rho * g / gnorm).collect();
                let predicted = rho * gnorm;
                let x: Vec<f64> = s.pole.iter().zip(&dx).map(|(a, b)| a + b).collect();
                let fx = eval(&x, &mut evals);
                let actual = s.f_pole - fx;

                let mut best_ratio = if actual > 0.0 { 0.0 } else { 1.0 };
                let mut jdrop = None;
                let mut sigbar = vec![0.0; d];
                for j in 0..d {
                    let lam = dot(&cols[j], &dx).abs();
                    if lam > best_ratio {
                        jdrop = Some(j);
                        best_ratio = lam;
                    }
                    sigbar[j] = lam * vsig[j];
                }
                let mut edgmax = DELTA * rho;
                let mut far = None;
                for j in 0..d {
                    if sigbar[j] >= parsig || sigbar[j] >= vsig[j] {
                        let dist = if actual > 0.0 {
                            norm(&dx.iter().zip(&disp[j]).map(|(a, b)| a - b).collect::<Vec<_>>())
                        } else {
                            veta[j]
                        };
                        if dist > edgmax {
                            far = Some(j);
                            edgmax = dist;
                        }
                    }
                }
                if far.is_some() {
                    jdrop = far;
                }
                if let Some(j) = jdrop {
                    s.replace(j, x, fx);
                }
                improved_enough = actual > 0.0 && actual >= 0.1 * predicted;
            }
            if improved_enough {
                continue;
            }
            if !acceptable {
                continue;
            }
            if rho <= self.rho_end {
                break true;
            }
            rho *= 0.5;
            if rho <= 1.5 * self.rho_end {
                rho = self.rho_end;
            }
        };
        Minimum { x: s.pole, f: s.f_pole, evals, converged }
    }
}

fn best_of(s: &Simplex) -> (Vec<f64>, f64) {
    let mut x = s.pole.clone();
    let mut fx = s.f_pole;
    for (v, &fv) in s.verts.iter().zip(&s.f_verts) {
        if fv < fx {
            x = v.clone();
            fx = fv;
        }
    }
    (x, fx)
}
