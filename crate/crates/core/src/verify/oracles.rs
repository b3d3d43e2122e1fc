use alloc::vec::Vec;

use crate::dictionary::Dictionary;
use crate::error::{check_dim, invalid, Error, Result};
use crate::greedy::{run_woga, GreedyConfig, LpFit};
use crate::linalg::{binomial, least_squares, Combinations};
use crate::minimize::{minimize, MinimizeOptions};

/// Hard cap on the number of subsets enumerated by [`sigma_m_bruteforce`].
pub const SIGMA_BUDGET: u128 = 1_000_000;

/// Best `m`-term approximation error `sigma_m(f_0, D)`, by enumerating all
/// `m`-subsets of atoms (`m` is clamped to `N`). In `l_2` each subset is a
/// least-squares problem; otherwise the convex span problem is solved by BFGS.
pub fn sigma_m_bruteforce(f0: &[f64], dict: &Dictionary, m: usize, budget: u128) -> Result<f64> {
    check_dim(dict.dim(), f0.len())?;
    let sp = dict.space();
    if m == 0 {
        return Ok(sp.norm_of(f0));
    }
    let m = m.min(dict.len());
    let required = binomial(dict.len(), m);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let mut best = f64::INFINITY;
    for subset in Combinations::new(dict.len(), m) {
        let cols: Vec<&[f64]> = subset.iter().map(|&j| dict.atom(j)).collect();
        let err = if sp.is_euclidean() {
            least_squares(&cols, f0).residual_norm
        } else {
            let obj = LpFit { target: f0, cols: &cols, p: sp.p() };
            let r = minimize(&obj, &alloc::vec![0.0; m], MinimizeOptions::default())?;
            sp.norm_of(&obj.residual(&r.x))
        };
        best = best.min(err);
        if best == 0.0 {
            break;
        }
    }
    Ok(best)
}

/// Constants of the Lebesgue-type check `||f_{C1 m}|| <= C2 sigma_m(f_0)`
/// for `m <= C3 / mu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LebesgueConfig {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub budget: u128,
}

impl Default for LebesgueConfig {
    fn default() -> Self {
        Self { c1: 2.0, c2: 3.0, c3: 0.5, budget: SIGMA_BUDGET }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LebesgueReport {
    pub m: usize,
    /// WOGA iterations run (`ceil(C1 m)`, fewer if the residual vanished).
    pub steps: usize,
    pub coherence: f64,
    pub residual: f64,
    pub sigma: f64,
    /// `residual / sigma`, absent when `sigma = 0`.
    pub ratio: Option<f64>,
    pub pass: bool,
}

/// Runs WOGA for `ceil(C1 m)` steps and compares the residual with
/// `C2 sigma_m + 1e-10`. Fails with a precondition error when `m > C3 / mu`.
pub fn check_lebesgue(dict: &Dictionary, f0: &[f64], m: usize, cfg: &LebesgueConfig) -> Result<LebesgueReport> {
    if !(cfg.c1 >= 1.0 && cfg.c2 > 0.0 && cfg.c3 > 0.0) {
        return Err(invalid("c1", "need C1 >= 1 and positive C2, C3"));
    }
    let mu = dict.coherence().value;
    if mu > 0.0 && m as f64 > cfg.c3 / mu {
        return Err(Error::Precondition(alloc::format!("m = {m} exceeds C3 / mu = {}", cfg.c3 / mu)));
    }
    let sigma = sigma_m_bruteforce(f0, dict, m, cfg.budget)?;
    let iterations = libm::ceil(cfg.c1 * m as f64) as usize;
    let (residual, steps) = if iterations == 0 {
        (dict.space().norm_of(f0), 0)
    } else {
        let t = run_woga(f0, dict, &GreedyConfig { max_iter: iterations, stop_norm: 0.0, ..GreedyConfig::default() })?;
        (t.final_norm(), t.steps.len())
    };
    let ratio = (sigma > 0.0).then(|| residual / sigma);
    let pass = residual <= cfg.c2 * sigma + 1e-10;
    Ok(LebesgueReport { m, steps, coherence: mu, residual, sigma, ratio, pass })
}
