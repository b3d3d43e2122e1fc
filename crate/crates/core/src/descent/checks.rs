use alloc::format;
use alloc::vec::Vec;

use super::{run_wcga_co, DescentTrace, Energy, NormCompositeEnergy, Potential};
use crate::dictionary::Dictionary;
use crate::error::{invalid, Error, Result};
use crate::greedy::{run_wcga, GreedyConfig, SignedIndex, Termination};
use crate::linalg::{dot, norm_inf, OrthoBasis};
use crate::sampling;
use crate::spaces::{ModulusPoint, ModulusTable};

/// Points of the level set `D = {x : E(x) <= E(0)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSetSample {
    pub points: Vec<Vec<f64>>,
    /// Sampled directions along which `D` reaches beyond the declared `C_0`.
    pub c0_violations: usize,
    /// Largest norm of a boundary point of `D` found along the rays.
    pub max_extent: f64,
}

/// Samples `D` along random rays from `0 in D`: the exit of the convex set
/// along each ray is located by bisection on `[0, C_0 (1 + 1e-6)]`, and a
/// uniform point of the segment is kept. Rays leaving `D` immediately (the
/// origin is on the boundary) are redrawn, at most `20 n` times in total.
pub fn sample_level_set<E: Energy + ?Sized>(energy: &E, n: usize, seed: u64) -> Result<LevelSetSample> {
    let sp = *energy.space();
    let params = energy.params();
    params.validate()?;
    let d = sp.dim();
    let level = energy.value(&alloc::vec![0.0; d]);
    let reach = params.c0 * (1.0 + 1e-6);
    let mut rng = sampling::seeded(seed);
    let mut out = LevelSetSample { points: Vec::with_capacity(n), c0_violations: 0, max_extent: 0.0 };
    let inside = |x: &[f64]| energy.value(x) <= level;
    for _ in 0..20 * n.max(1) {
        if out.points.len() == n {
            break;
        }
        let u = sp.random_unit(&mut rng);
        let at = |s: f64| -> Vec<f64> { u.iter().map(|v| s * v).collect() };
        let t_max = if inside(&at(reach)) {
            out.c0_violations += 1;
            reach
        } else {
            let (mut lo, mut hi) = (0.0, reach);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if inside(&at(mid)) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        };
        out.max_extent = out.max_extent.max(t_max);
        if t_max <= 1e-9 * params.c0.max(f64::MIN_POSITIVE) {
            continue;
        }
        out.points.push(at(t_max * sampling::uniform(&mut rng)));
    }
    if out.points.len() < n {
        return Err(Error::Precondition(format!(
            "level set has negligible volume: {} of {} points found",
            out.points.len(),
            n
        )));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyCheckConfig {
    pub samples: usize,
    /// Range of the step `u` in the sandwich inequality, sampled log-uniformly.
    pub u_min: f64,
    pub u_max: f64,
    /// Relative step of the central differences.
    pub fd_step: f64,
}

impl Default for EnergyCheckConfig {
    fn default() -> Self {
        Self { samples: 1000, u_min: 1e-4, u_max: 1.0, fd_step: 1e-5 }
    }
}

/// Worst observed violations; all are relative to `max(1, |E(0)|)`
/// except the gradient error, which is relative to `||E'(x)||_inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyCheck {
    pub samples: usize,
    /// `max(0, E(x) + <E'(x), y - x> - E(y))`.
    pub convexity: f64,
    /// `max(0, -(E(x+uy) - E(x) - u<E'(x),y>))`.
    pub sandwich_lower: f64,
    /// `max(0, E(x+uy) - E(x) - u<E'(x),y> - 2 gamma (u||y||)^q)`.
    pub sandwich_upper: f64,
    /// Central-difference gradient error.
    pub gradient: f64,
    pub c0_violations: usize,
}

impl EnergyCheck {
    pub fn pass(&self, tol: f64, gradient_tol: f64) -> bool {
        self.convexity <= tol
            && self.sandwich_lower <= tol
            && self.sandwich_upper <= tol
            && self.gradient <= gradient_tol
            && self.c0_violations == 0
    }
}

/// Samples triples in `D` and measures the convexity inequality, both sides
/// of the sandwich `0 <= E(x+uy) - E(x) - u<E'(x),y> <= 2 gamma (u||y||)^q`
/// and the gradient against central differences. Points where the gradient
/// does not exist are skipped.
pub fn check_energy<E: Energy + ?Sized>(energy: &E, cfg: &EnergyCheckConfig, seed: u64) -> Result<EnergyCheck> {
    if cfg.samples == 0 {
        return Err(invalid("samples", "at least one sample required"));
    }
    if !(cfg.u_min > 0.0 && cfg.u_min <= cfg.u_max) {
        return Err(invalid("u_min", "need 0 < u_min <= u_max"));
    }
    let sp = *energy.space();
    let params = energy.params();
    let d = sp.dim();
    let level = sample_level_set(energy, 2 * cfg.samples, seed)?;
    let scale = energy.value(&alloc::vec![0.0; d]).abs().max(1.0);
    let mut rng = sampling::substream(seed, 1);
    let mut report = EnergyCheck {
        samples: 0,
        convexity: 0.0,
        sandwich_lower: 0.0,
        sandwich_upper: 0.0,
        gradient: 0.0,
        c0_violations: level.c0_violations,
    };
    let (lu_min, lu_max) = (libm::log(cfg.u_min), libm::log(cfg.u_max));
    for pair in level.points.chunks_exact(2) {
        let (x, z) = (&pair[0], &pair[1]);
        let grad = match energy.gradient(x) {
            Ok(g) => g,
            Err(Error::Kink) => continue,
            Err(e) => return Err(e),
        };
        let ex = energy.value(x);
        let diff: Vec<f64> = z.iter().zip(x).map(|(a, b)| a - b).collect();
        report.convexity = report.convexity.max((ex + grad.apply(&diff) - energy.value(z)) / scale);

        let y: Vec<f64> = {
            let r = 0.1 + 1.9 * sampling::uniform(&mut rng);
            sp.random_unit(&mut rng).into_iter().map(|v| r * v).collect()
        };
        let u = libm::exp(lu_min + (lu_max - lu_min) * sampling::uniform(&mut rng));
        let moved: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + u * b).collect();
        let gap = energy.value(&moved) - ex - u * grad.apply(&y);
        let bound = 2.0 * params.gamma * libm::pow(u * sp.norm_of(&y), params.q);
        report.sandwich_lower = report.sandwich_lower.max(-gap / scale);
        report.sandwich_upper = report.sandwich_upper.max((gap - bound) / scale);

        let h = cfg.fd_step * norm_inf(x).max(1.0);
        let mut err: f64 = 0.0;
        let mut xp = x.clone();
        for i in 0..d {
            xp[i] = x[i] + h;
            let fp = energy.value(&xp);
            xp[i] = x[i] - h;
            let fm = energy.value(&xp);
            xp[i] = x[i];
            err = err.max(((fp - fm) / (2.0 * h) - grad.coords()[i]).abs());
        }
        let gnorm = norm_inf(grad.coords());
        report.gradient = report.gradient.max(if gnorm > 0.0 { err / gnorm } else { err });
        report.samples += 1;
    }
    Ok(report)
}

/// Empirical `rho(E, u) = sup_{x in D, ||y|| = 1} |E(x+uy) + E(x-uy) - 2E(x)| / 2`
/// over sampled `x in D` and unit `y`, with the declared bound `gamma u^q`.
pub fn energy_modulus_estimate<E: Energy + ?Sized>(
    energy: &E,
    u_grid: &[f64],
    n_samples: usize,
    seed: u64,
) -> Result<ModulusTable> {
    if let Some(&u) = u_grid.iter().find(|u| !(**u >= 0.0 && u.is_finite())) {
        return Err(invalid("u", format!("grid value {u} is not a non-negative number")));
    }
    let sp = *energy.space();
    let params = energy.params();
    let xs = sample_level_set(energy, n_samples, seed)?.points;
    let mut rng = sampling::substream(seed, 1);
    let ys: Vec<Vec<f64>> = (0..n_samples).map(|_| sp.random_unit(&mut rng)).collect();
    let points = u_grid
        .iter()
        .map(|&u| {
            let rho = if u == 0.0 {
                0.0
            } else {
                xs.iter().zip(&ys).fold(0.0f64, |best, (x, y)| {
                    let p: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + u * b).collect();
                    let m: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - u * b).collect();
                    let v = 0.5 * (energy.value(&p) + energy.value(&m) - 2.0 * energy.value(x)).abs();
                    best.max(v)
                })
            };
            ModulusPoint { u, rho, bound: params.gamma * libm::pow(u, params.q) }
        })
        .collect();
    Ok(ModulusTable { points })
}

/// Step-by-step check of `a_m <= a_{m-1} (1 - a_{m-1}^{1/(q-1)} / B)` and of
/// `a_m <= B^{q-1} m^{1-q}` along a trace with known minimum and `B`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecursionReport {
    pub b: f64,
    pub checked: usize,
    /// First step violating the one-step recursion.
    pub recursion_violation: Option<usize>,
    /// First step violating the power bound.
    pub bound_violation: Option<usize>,
    /// `max a_m / (B^{q-1} m^{1-q})`.
    pub worst_bound_ratio: f64,
}

impl RecursionReport {
    pub fn pass(&self) -> bool {
        self.recursion_violation.is_none() && self.bound_violation.is_none()
    }
}

/// Both inequalities hold up to `1e-12 a_0`.
pub fn check_rate_recursion(trace: &DescentTrace) -> Result<RecursionReport> {
    let b = trace.proof_b.ok_or_else(|| Error::Precondition("trace carries no certified beta".into()))?;
    let a = trace.gaps().ok_or_else(|| Error::Precondition("energy minimum unknown".into()))?;
    let q = trace.params.q;
    let slack = 1e-12 * a[0].abs().max(f64::MIN_POSITIVE);
    let mut report = RecursionReport {
        b,
        checked: 0,
        recursion_violation: None,
        bound_violation: None,
        worst_bound_ratio: 0.0,
    };
    for m in 1..a.len() {
        let prev = a[m - 1].max(0.0);
        let step = prev * (1.0 - libm::pow(prev, 1.0 / (q - 1.0)) / b);
        if a[m] > step + slack && report.recursion_violation.is_none() {
            report.recursion_violation = Some(m);
        }
        let bound = libm::pow(b, q - 1.0) * libm::pow(m as f64, 1.0 - q);
        if a[m] > bound + slack && report.bound_violation.is_none() {
            report.bound_violation = Some(m);
        }
        report.worst_bound_ratio = report.worst_bound_ratio.max(a[m] / bound);
        report.checked += 1;
    }
    Ok(report)
}

/// Comparison of WCGA on `f_0` with WCGA(co) on `E(x) = ||x - f_0||^2 / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub greedy_steps: usize,
    pub descent_steps: usize,
    /// Steps compared (the common prefix up to the first divergence).
    pub compared: usize,
    /// First step whose selected atoms differ.
    pub first_divergence: Option<usize>,
    /// The divergence happened between atoms whose selection values agree
    /// within the tie tolerance.
    pub divergence_is_tie: bool,
    /// Steps at which the two best atoms are within the tie tolerance.
    pub near_ties: usize,
    /// Steps of the longer run past the point where the shorter one reached
    /// its stopping tolerance.
    pub trailing_steps: usize,
    /// `max_m |E(G_m) - ||f_m||^2 / 2|`.
    pub max_energy_error: f64,
    pub tie_tol: f64,
    pub energy_tol: f64,
}

impl EquivalenceReport {
    /// Same selections over the common steps; a longer run may only continue
    /// past a stop of the other at agreeing energy.
    pub fn identical(&self) -> bool {
        self.first_divergence.is_none()
    }

    pub fn pass(&self) -> bool {
        let sequences = self.identical() || self.divergence_is_tie;
        sequences && self.max_energy_error <= self.energy_tol
    }
}

/// Runs both algorithms with identical tie-breaking. The descent run stops at
/// gap `stop_norm^2 / 2`, matching the greedy stop at `||f_m|| <= stop_norm`.
/// Selection values are compared by replaying the orthogonal projections.
pub fn check_equivalence_co(f0: &[f64], dict: &Dictionary, cfg: &GreedyConfig) -> Result<EquivalenceReport> {
    let sp = *dict.space();
    if !sp.is_euclidean() {
        return Err(Error::Unsupported("the equivalence check is stated for l_2".into()));
    }
    let tie_tol = 1e-12;
    let greedy = run_wcga(f0, dict, cfg)?;
    let energy = NormCompositeEnergy::new(f0.to_vec(), Potential::HalfSquare, sp, 2.0, 0.5)?;
    let co_cfg = GreedyConfig { stop_norm: 0.5 * cfg.stop_norm * cfg.stop_norm, ..*cfg };
    let co = run_wcga_co(&energy, dict, &co_cfg)?;

    let mut report = EquivalenceReport {
        greedy_steps: greedy.steps.len(),
        descent_steps: co.steps.len(),
        compared: 0,
        first_divergence: None,
        divergence_is_tie: false,
        near_ties: 0,
        trailing_steps: 0,
        max_energy_error: 0.0,
        tie_tol,
        energy_tol: 1e-8,
    };
    let mut basis = OrthoBasis::new(dict.dim());
    for (k, (g, c)) in greedy.steps.iter().zip(&co.steps).enumerate() {
        let residual = basis.residual(f0);
        let (top, second) = two_best(&residual, dict);
        if top.1 - second.1 <= tie_tol * top.1.abs() {
            report.near_ties += 1;
        }
        if g.selected != c.selected {
            report.first_divergence = Some(k + 1);
            let vg = signed_value(&residual, dict, g.selected);
            let vc = signed_value(&residual, dict, c.selected);
            report.divergence_is_tie = (vg - vc).abs() <= tie_tol * top.1.abs();
            break;
        }
        let err = (c.energy - 0.5 * g.residual_norm * g.residual_norm).abs();
        report.max_energy_error = report.max_energy_error.max(err);
        report.compared += 1;
        basis.push(g.selected.column(), dict.atom(g.selected.column()));
    }
    if report.first_divergence.is_none() && report.greedy_steps != report.descent_steps {
        let n = report.compared;
        let greedy_stopped = report.greedy_steps == n && greedy.termination == Termination::StopNorm;
        let co_stopped = report.descent_steps == n && co.termination == Termination::StopNorm;
        // energy of the stopped run against the other at the same step
        let agree = (0.5 * greedy.final_norm() * greedy.final_norm() - co.energies()[n]).abs() <= report.energy_tol
            || (co.final_energy() - 0.5 * greedy.residual_norms()[n] * greedy.residual_norms()[n]).abs()
                <= report.energy_tol;
        if (greedy_stopped || co_stopped) && agree {
            report.trailing_steps = report.greedy_steps.abs_diff(report.descent_steps);
        } else {
            report.first_divergence = Some(n + 1);
        }
    }
    Ok(report)
}

fn signed_value(r: &[f64], dict: &Dictionary, i: SignedIndex) -> f64 {
    i.sign() * dot(r, dict.atom(i.column()))
}

// best and second-best signed atoms by <r, g> over D^+-
fn two_best(r: &[f64], dict: &Dictionary) -> ((SignedIndex, f64), (SignedIndex, f64)) {
    let mut best = (SignedIndex::new(0, false), f64::NEG_INFINITY);
    let mut second = best;
    for j in 0..dict.len() {
        let v = dot(r, dict.atom(j));
        for cand in [(SignedIndex::new(j, false), v), (SignedIndex::new(j, true), -v)] {
            if cand.1 > best.1 {
                second = best;
                best = cand;
            } else if cand.1 > second.1 {
                second = cand;
            }
        }
    }
    (best, second)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descent::{run_wgafr_co, QuadraticEnergy};
    use crate::spaces::SmoothSpace;

    #[test]
    fn quadratic_energy_passes_all_checks() {
        let y = sampling::gaussian(&mut sampling::seeded(1), 6);
        let e = QuadraticEnergy::new(y).unwrap();
        let r = check_energy(&e, &EnergyCheckConfig::default(), 2).unwrap();
        assert_eq!(r.samples, 1000);
        assert!(r.pass(1e-9, 1e-5), "{r:?}");
    }

    #[test]
    fn quadratic_modulus_is_exactly_half_u_squared() {
        let e = QuadraticEnergy::new(alloc::vec![1.0, -2.0, 0.5]).unwrap();
        let grid = [0.0, 0.01, 0.1, 0.5, 1.0];
        let t = energy_modulus_estimate(&e, &grid, 200, 3).unwrap();
        assert_eq!(t.points[0].rho, 0.0);
        for p in &t.points[1..] {
            assert!((p.rho - 0.5 * p.u * p.u).abs() <= 1e-12 * p.u.max(1.0), "{p:?}");
        }
        assert!(t.dominated());
    }

    #[test]
    fn quartic_composite_modulus_exponent() {
        let sp = SmoothSpace::euclidean(4);
        let f0 = alloc::vec![0.5, -0.3, 0.2, 0.4];
        // on D, |x - f0| <= |f0| (about 0.74); V'' = 12 u^2 gives gamma = 6 |f0|^2 + O(u^2)
        let e = NormCompositeEnergy::new(f0, Potential::Power(4.0), sp, 2.0, 4.0).unwrap();
        let grid: Vec<f64> = (0..12).map(|k| 0.01 * libm::pow(30.0, k as f64 / 11.0)).collect();
        let t = energy_modulus_estimate(&e, &grid, 400, 5).unwrap();
        let s = t.fitted_exponent().unwrap();
        assert!(s > 1.0 && s <= 2.0 + 0.05, "{s}");
        assert!(t.dominated());
        let r = check_energy(&e, &EnergyCheckConfig { u_max: 0.3, ..EnergyCheckConfig::default() }, 6).unwrap();
        assert!(r.pass(1e-9, 1e-5), "{r:?}");
    }

    #[test]
    fn understated_gamma_is_detected() {
        let sp = SmoothSpace::euclidean(3);
        let e = NormCompositeEnergy::new(alloc::vec![2.0, 0.0, 1.0], Potential::Power(4.0), sp, 2.0, 0.1).unwrap();
        let r = check_energy(&e, &EnergyCheckConfig::default(), 1).unwrap();
        assert!(r.sandwich_upper > 1e-9, "{r:?}");
        assert!(!energy_modulus_estimate(&e, &[0.1, 0.5], 200, 1).unwrap().dominated());
    }

    #[test]
    fn understated_c0_is_detected() {
        struct Shrunk(QuadraticEnergy);
        impl Energy for Shrunk {
            fn space(&self) -> &SmoothSpace {
                self.0.space()
            }
            fn value(&self, x: &[f64]) -> f64 {
                self.0.value(x)
            }
            fn gradient(&self, x: &[f64]) -> Result<crate::Covector> {
                self.0.gradient(x)
            }
            fn params(&self) -> super::super::EnergyParams {
                super::super::EnergyParams { c0: 0.5, ..self.0.params() }
            }
        }
        let e = Shrunk(QuadraticEnergy::new(alloc::vec![1.0, 1.0]).unwrap());
        let r = check_energy(&e, &EnergyCheckConfig { samples: 100, ..Default::default() }, 1).unwrap();
        assert!(r.c0_violations > 0);
    }

    #[test]
    fn degenerate_level_set_is_reported() {
        let e = QuadraticEnergy::new(alloc::vec![0.0, 0.0]).unwrap();
        assert!(matches!(sample_level_set(&e, 10, 1), Err(Error::Precondition(_))));
    }

    #[test]
    fn recursion_holds_on_canonical_quadratic() {
        for d in [2usize, 4, 8] {
            let sp = SmoothSpace::euclidean(d);
            let dict = Dictionary::canonical(sp);
            let beta = 1.0 / libm::sqrt(d as f64);
            for seed in 0..5 {
                let y = sampling::gaussian(&mut sampling::seeded(seed), d);
                let e = QuadraticEnergy::new(y).unwrap();
                let cfg = GreedyConfig { beta_lower: Some(beta), max_iter: 50, ..GreedyConfig::default() };
                for t in [run_wcga_co(&e, &dict, &cfg).unwrap(), run_wgafr_co(&e, &dict, &cfg).unwrap()] {
                    let r = check_rate_recursion(&t).unwrap();
                    assert!(r.pass(), "d={d} seed={seed}: {r:?}");
                }
            }
        }
    }

    #[test]
    fn recursion_needs_beta_and_minimum() {
        let e = QuadraticEnergy::new(alloc::vec![1.0, 0.0]).unwrap();
        let t = run_wcga_co(&e, &Dictionary::canonical(SmoothSpace::euclidean(2)), &GreedyConfig::default()).unwrap();
        assert!(matches!(check_rate_recursion(&t), Err(Error::Precondition(_))));
    }

    #[test]
    fn equivalence_on_canonical_basis() {
        let d = Dictionary::canonical(SmoothSpace::euclidean(3));
        let r = check_equivalence_co(&[1.0, 2.0, 3.0], &d, &GreedyConfig::default()).unwrap();
        assert!(r.identical() && r.pass(), "{r:?}");
        assert_eq!(r.compared, 3);
    }

    #[test]
    fn equivalence_on_random_dictionaries() {
        for seed in 0..20u64 {
            let d = 4 + (seed as usize % 13);
            let dict = Dictionary::random_sphere(SmoothSpace::euclidean(d), 3 * d, seed).unwrap();
            let f0 = sampling::gaussian(&mut sampling::substream(seed, 7), d);
            let r = check_equivalence_co(&f0, &dict, &GreedyConfig { max_iter: 40, ..Default::default() }).unwrap();
            assert!(r.pass(), "seed {seed}: {r:?}");
        }
    }

    #[test]
    fn near_tie_is_flagged() {
        let sp = SmoothSpace::euclidean(2);
        let d = Dictionary::canonical(sp);
        let r = check_equivalence_co(&[1.0, 1.0 + 1e-13], &d, &GreedyConfig::default()).unwrap();
        assert!(r.near_ties >= 1 && r.pass(), "{r:?}");
    }

    #[test]
    fn equivalence_requires_l2() {
        let d = Dictionary::canonical(SmoothSpace::lp(2, 3.0).unwrap());
        assert!(matches!(check_equivalence_co(&[1.0, 0.0], &d, &GreedyConfig::default()), Err(Error::Unsupported(_))));
    }
}
