//! Trend measurements without pass/fail thresholds: the constants of the
//! corresponding bounds are unknown.

use alloc::vec::Vec;

use super::incoherence::{check_property_a, IncoherenceProfile, PROPERTY_A_BUDGET};
use crate::dictionary::Dictionary;
use crate::error::{invalid, Result};
use crate::greedy::{run_wcga, GreedyConfig};
use crate::linalg::linear_regression;

/// WCGA on `f_0 = f^eps + noise` after the iteration count
/// `ceil(c V^{q'} ln(V K) K^{r q'})` built from the measured property-A constant.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseRecoveryProbe {
    pub k: usize,
    pub v: f64,
    pub iterations: usize,
    pub residual: f64,
    pub eps: f64,
    /// `residual / eps`.
    pub ratio: f64,
}

/// `coefficients` define the `K`-sparse `f^eps`; `noise` is added to it and
/// `eps = ||noise||`. With `Lambda` ranging up to `depth - |A|` atoms.
pub fn probe_sparse_recovery(
    dict: &Dictionary,
    coefficients: &[f64],
    noise: &[f64],
    depth: usize,
    c: f64,
) -> Result<SparseRecoveryProbe> {
    if !(c > 0.0) {
        return Err(invalid("c", "iteration constant must be positive"));
    }
    let k = coefficients.iter().filter(|v| **v != 0.0).count();
    let profile = IncoherenceProfile { k, depth, v: None, r: 0.5 };
    let v = check_property_a(dict, coefficients, &profile, PROPERTY_A_BUDGET)?.min_v;
    let qp = dict.space().q() / (dict.space().q() - 1.0);
    let kf = k as f64;
    let count = c * libm::pow(v, qp) * libm::log((v * kf).max(core::f64::consts::E)) * libm::pow(kf, 0.5 * qp);
    let iterations = (libm::ceil(count) as usize).clamp(1, 100_000);
    let mut f0 = dict.combine(coefficients);
    for (a, b) in f0.iter_mut().zip(noise) {
        *a += b;
    }
    let eps = dict.space().norm_of(noise);
    let t = run_wcga(&f0, dict, &GreedyConfig { max_iter: iterations, ..GreedyConfig::default() })?;
    let residual = t.final_norm();
    Ok(SparseRecoveryProbe { k, v, iterations, residual, eps, ratio: if eps > 0.0 { residual / eps } else { 0.0 } })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PackingPoint {
    pub d: usize,
    pub mu: f64,
    pub achieved: usize,
    /// `d mu^2`.
    pub x: f64,
    /// `ln N`.
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PackingTrend {
    pub points: Vec<PackingPoint>,
    /// Slope and `r^2` of `ln N` against `d mu^2`.
    pub slope: Option<f64>,
    pub r_squared: Option<f64>,
}

/// Greedy packings at each `(d, mu)`, capped at `n_cap` atoms and
/// `attempts` candidates.
pub fn packing_trend(configs: &[(usize, f64)], n_cap: usize, attempts: usize, seed: u64) -> Result<PackingTrend> {
    let mut points = Vec::with_capacity(configs.len());
    for (i, &(d, mu)) in configs.iter().enumerate() {
        let (_, rep) = Dictionary::incoherent(d, n_cap, mu, attempts, seed.wrapping_add(i as u64))?;
        points.push(PackingPoint { d, mu, achieved: rep.achieved, x: d as f64 * mu * mu, y: libm::log(rep.achieved as f64) });
    }
    let fit = linear_regression(&points.iter().map(|p| (p.x, p.y)).collect::<Vec<_>>());
    Ok(PackingTrend { points, slope: fit.map(|f| f.0), r_squared: fit.map(|f| f.2) })
}
