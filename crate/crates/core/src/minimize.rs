//! Quasi-Newton minimizer for the small smooth convex subproblems that play
//! the role of exact oracles inside the algorithms: Chebyshev projections in
//! `l_p`, the two-parameter relaxation step, and energy minimization over a
//! span.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{dot, norm_inf};

/// Smooth objective on `R^n`.
pub trait Objective {
    fn dim(&self) -> usize;

    /// Writes the gradient at `x` into `grad` and returns the value.
    fn eval(&self, x: &[f64], grad: &mut [f64]) -> f64;

    /// Scale-free first-order stationarity measure, `||grad||_inf` by default.
    fn stationarity(&self, _x: &[f64], grad: &[f64], _value: f64) -> f64 {
        norm_inf(grad)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MinimizeOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 10_000 }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub stationarity: f64,
    pub iterations: usize,
    /// The line search could no longer decrease the objective in floating
    /// point before the tolerance was met; `x` is the best point found.
    pub stalled: bool,
}

/// BFGS with an Armijo backtracking line search, started from `x0`.
///
/// Fails only when the iteration cap is hit; a stalled line search ends the
/// run at working precision and is flagged in the result.
pub fn minimize<O: Objective>(obj: &O, x0: &[f64], opts: MinimizeOptions) -> Result<Minimum> {
    let n = obj.dim();
    debug_assert_eq!(x0.len(), n);
    let mut x = x0.to_vec();
    let mut g = vec![0.0; n];
    let mut f = obj.eval(&x, &mut g);
    let mut h = identity(n);
    let mut fresh = true;
    let mut x_new = vec![0.0; n];
    let mut g_new = vec![0.0; n];

    for iter in 0..opts.max_iter {
        let stat = obj.stationarity(&x, &g, f);
        if stat <= opts.tol || n == 0 {
            return Ok(Minimum { x, value: f, stationarity: stat, iterations: iter, stalled: false });
        }
        let mut p = mat_vec_neg(&h, &g, n);
        let mut slope = dot(&p, &g);
        if !(slope < 0.0) {
            h = identity(n);
            fresh = true;
            p = g.iter().map(|v| -v).collect();
            slope = dot(&p, &g);
        }
        // first step of a fresh approximation: unit step in the max-norm
        let mut alpha = if fresh { 1.0 / norm_inf(&p).max(1.0) } else { 1.0 };
        let mut f_new = f;
        let mut progress = false;
        for _ in 0..80 {
            for i in 0..n {
                x_new[i] = x[i] + alpha * p[i];
            }
            f_new = obj.eval(&x_new, &mut g_new);
            if f_new.is_finite() && f_new <= f + 1e-4 * alpha * slope {
                progress = f_new < f;
                break;
            }
            alpha *= 0.5;
        }
        if progress {
            let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
            let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
            let sy = dot(&s, &y);
            if sy > 1e-14 * libm::sqrt(dot(&s, &s) * dot(&y, &y)) {
                if fresh {
                    let scale = sy / dot(&y, &y);
                    for v in h.iter_mut() {
                        *v *= scale;
                    }
                }
                bfgs_update(&mut h, &s, &y, sy, n);
                fresh = false;
            }
            x.copy_from_slice(&x_new);
            g.copy_from_slice(&g_new);
            f = f_new;
        } else if fresh {
            let stat = obj.stationarity(&x, &g, f);
            return Ok(Minimum { x, value: f, stationarity: stat, iterations: iter, stalled: true });
        } else {
            // retry from steepest descent before giving up
            h = identity(n);
            fresh = true;
        }
    }
    let stat = obj.stationarity(&x, &g, f);
    if stat <= opts.tol {
        return Ok(Minimum { x, value: f, stationarity: stat, iterations: opts.max_iter, stalled: false });
    }
    Err(Error::InnerSolver { iterations: opts.max_iter, stationarity: stat })
}

fn identity(n: usize) -> Vec<f64> {
    let mut h = vec![0.0; n * n];
    for i in 0..n {
        h[i * n + i] = 1.0;
    }
    h
}

fn mat_vec_neg(h: &[f64], g: &[f64], n: usize) -> Vec<f64> {
    (0..n).map(|i| -dot(&h[i * n..(i + 1) * n], g)).collect()
}

// H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
fn bfgs_update(h: &mut [f64], s: &[f64], y: &[f64], sy: f64, n: usize) {
    let rho = 1.0 / sy;
    let hy: Vec<f64> = (0..n).map(|i| dot(&h[i * n..(i + 1) * n], y)).collect();
    let yhy = dot(y, &hy);
    for i in 0..n {
        for j in 0..n {
            h[i * n + j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Quadratic;
    impl Objective for Quadratic {
        fn dim(&self) -> usize {
            3
        }
        fn eval(&self, x: &[f64], g: &mut [f64]) -> f64 {
            // 0.5 x^T A x - b^T x with A = diag(1, 10, 100), b = (1, 1, 1)
            let a = [1.0, 10.0, 100.0];
            let mut f = 0.0;
            for i in 0..3 {
                g[i] = a[i] * x[i] - 1.0;
                f += 0.5 * a[i] * x[i] * x[i] - x[i];
            }
            f
        }
    }

    struct Rosenbrock;
    impl Objective for Rosenbrock {
        fn dim(&self) -> usize {
            2
        }
        fn eval(&self, x: &[f64], g: &mut [f64]) -> f64 {
            let (a, b) = (x[0], x[1]);
            g[0] = -2.0 * (1.0 - a) - 400.0 * a * (b - a * a);
            g[1] = 200.0 * (b - a * a);
            (1.0 - a) * (1.0 - a) + 100.0 * (b - a * a) * (b - a * a)
        }
    }

    #[test]
    fn converges_on_ill_conditioned_quadratic() {
        let m = minimize(&Quadratic, &[0.0; 3], MinimizeOptions::default()).unwrap();
        for (xi, ai) in m.x.iter().zip([1.0, 10.0, 100.0]) {
            assert!((xi - 1.0 / ai).abs() < 1e-9);
        }
    }

    #[test]
    fn converges_on_rosenbrock() {
        let m = minimize(&Rosenbrock, &[-1.2, 1.0], MinimizeOptions { tol: 1e-8, max_iter: 10_000 }).unwrap();
        assert!((m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] - 1.0).abs() < 1e-6, "{:?}", m.x);
    }

    #[test]
    fn iteration_cap_is_an_error() {
        let err = minimize(&Rosenbrock, &[-1.2, 1.0], MinimizeOptions { tol: 1e-12, max_iter: 3 }).unwrap_err();
        assert!(matches!(err, Error::InnerSolver { iterations: 3, .. }));
    }
}
