use alloc::vec;
use alloc::vec::Vec;

use super::{guaranteed_contraction, select_by_functional, Algorithm, GreedyConfig, Selection, Step, Termination, Trace};
use crate::dictionary::Dictionary;
use crate::error::{invalid, Error, Result};
use crate::linalg::{axpy, dot, least_squares, norm1, OrthoBasis};
use crate::minimize::{minimize, MinimizeOptions, Objective};
use crate::spaces::SmoothSpace;

/// Incrementally updated residuals are recomputed from `f_0` and the
/// expansion this often.
const REFRESH_EVERY: usize = 32;

pub(crate) fn check_input(f0: &[f64], dict: &Dictionary, cfg: &GreedyConfig) -> Result<()> {
    cfg.validate()?;
    crate::error::check_dim(dict.dim(), f0.len())?;
    if f0.iter().any(|v| !v.is_finite()) {
        return Err(invalid("f0", "entries must be finite"));
    }
    Ok(())
}

fn require_l2(dict: &Dictionary, what: &str) -> Result<()> {
    if dict.space().is_euclidean() {
        Ok(())
    } else {
        Err(Error::Unsupported(alloc::format!("{what} is defined for the l_2 ambient norm only")))
    }
}

// state shared by all runs: residual, expansion over columns, and the trace under construction
struct Run<'a> {
    f0: &'a [f64],
    dict: &'a Dictionary,
    cfg: &'a GreedyConfig,
    residual: Vec<f64>,
    norm: f64,
    expansion: Vec<f64>,
    steps: Vec<Step>,
}

impl<'a> Run<'a> {
    fn new(f0: &'a [f64], dict: &'a Dictionary, cfg: &'a GreedyConfig) -> Self {
        Self {
            f0,
            dict,
            cfg,
            residual: f0.to_vec(),
            norm: dict.space().norm_of(f0),
            expansion: vec![0.0; dict.len()],
            steps: Vec::new(),
        }
    }

    fn space(&self) -> &SmoothSpace {
        self.dict.space()
    }

    /// Selection at the current residual, or the reason to stop.
    fn select(&self) -> core::result::Result<Selection, Termination> {
        if self.norm <= self.cfg.stop_norm {
            return Err(Termination::StopNorm);
        }
        let f = self.space().norming_functional_with_norm(&self.residual, self.norm);
        let sel = select_by_functional(f.coords(), self.dict, self.cfg.t, self.cfg.selection);
        if !(sel.sup > 0.0) {
            return Err(Termination::NoCorrelation);
        }
        Ok(sel)
    }

    fn refresh_residual(&mut self) {
        let g = self.dict.combine(&self.expansion);
        self.residual = crate::linalg::sub(self.f0, &g);
        self.norm = self.space().norm_of(&self.residual);
    }

    fn record(&mut self, sel: Selection, step_coefficient: f64) {
        self.steps.push(Step {
            m: self.steps.len() + 1,
            selected: sel.index,
            value: sel.value,
            sup: sel.sup,
            step_coefficient,
            residual_norm: self.norm,
            coeff_l1: norm1(&self.expansion),
        });
    }

    fn finish(self, algorithm: Algorithm, stopped: Option<Termination>) -> Result<Trace> {
        let termination = stopped.unwrap_or(if self.norm <= self.cfg.stop_norm {
            Termination::StopNorm
        } else {
            Termination::MaxIter
        });
        let contraction = match self.cfg.beta_lower {
            Some(b) => Some(guaranteed_contraction(self.space(), b, self.cfg.t)?),
            None => None,
        };
        Ok(Trace {
            algorithm,
            initial_norm: self.space().norm_of(self.f0),
            steps: self.steps,
            termination,
            expansion: self.expansion,
            contraction,
            switch_at: None,
        })
    }
}

/// Weak Chebyshev Greedy Algorithm.
///
/// In `l_2` the projection is maintained by incremental Gram-Schmidt; for
/// `p != 2` the coefficients minimize `||f_0 - sum c_j phi_j||_p^p / p` by
/// BFGS warm-started at the previous coefficients, to stationarity
/// `||Phi^T F_{f_m}||_inf <= inner_tol`. Atoms already in the span are
/// recorded but add no coefficient.
pub fn run_wcga(f0: &[f64], dict: &Dictionary, cfg: &GreedyConfig) -> Result<Trace> {
    check_input(f0, dict, cfg)?;
    chebyshev(f0, dict, cfg, Algorithm::Wcga)
}

/// Weak Orthogonal Greedy Algorithm (orthogonal matching pursuit), `l_2` only.
pub fn run_woga(f0: &[f64], dict: &Dictionary, cfg: &GreedyConfig) -> Result<Trace> {
    check_input(f0, dict, cfg)?;
    require_l2(dict, "WOGA")?;
    chebyshev(f0, dict, cfg, Algorithm::Woga)
}

fn chebyshev(f0: &[f64], dict: &Dictionary, cfg: &GreedyConfig, algorithm: Algorithm) -> Result<Trace> {
    let mut run = Run::new(f0, dict, cfg);
    let mut basis = OrthoBasis::new(dict.dim());
    let mut coeffs: Vec<f64> = Vec::new();
    let euclidean = dict.space().is_euclidean();
    let mut stopped = None;
    for _ in 0..cfg.max_iter {
        let sel = match run.select() {
            Ok(s) => s,
            Err(t) => {
                stopped = Some(t);
                break;
            }
        };
        let col = sel.index.column();
        let added = basis.push(col, dict.atom(col));
        if euclidean || basis.is_full() {
            let (c, r) = basis.solve(f0);
            coeffs = c;
            if basis.is_full() {
                run.residual = vec![0.0; dict.dim()];
            } else {
                run.residual = r;
            }
        } else if added {
            coeffs.push(0.0);
            let cols: Vec<&[f64]> = basis.tags().iter().map(|&j| dict.atom(j)).collect();
            let obj = LpFit { target: f0, cols: &cols, p: dict.space().p() };
            let opts = MinimizeOptions { tol: cfg.inner_tol, max_iter: cfg.inner_max_iter };
            coeffs = minimize(&obj, &coeffs, opts)?.x;
            run.residual = obj.residual(&coeffs);
        }
        for v in run.expansion.iter_mut() {
            *v = 0.0;
        }
        for (&j, &c) in basis.tags().iter().zip(&coeffs) {
            run.expansion[j] = c;
        }
        run.norm = run.space().norm_of(&run.residual);
        let step = sel.index.sign() * run.expansion[col];
        run.record(sel, step);
        if !added && run.norm > cfg.stop_norm {
            // the selected atom is already in the span: the residual cannot move
            stopped = Some(Termination::Stagnation);
            break;
        }
    }
    run.finish(algorithm, stopped)
}

/// `c -> ||target - sum_j c_j col_j||_p^p / p`.
pub(crate) struct LpFit<'a> {
    pub(crate) target: &'a [f64],
    pub(crate) cols: &'a [&'a [f64]],
    pub(crate) p: f64,
}

impl LpFit<'_> {
    pub(crate) fn residual(&self, c: &[f64]) -> Vec<f64> {
        let mut r = self.target.to_vec();
        for (cj, col) in c.iter().zip(self.cols) {
            axpy(-cj, col, &mut r);
        }
        r
    }
}

impl Objective for LpFit<'_> {
    fn dim(&self) -> usize {
        self.cols.len()
    }

    fn eval(&self, c: &[f64], grad: &mut [f64]) -> f64 {
        let r = self.residual(c);
        let w: Vec<f64> = r.iter().map(|&v| libm::copysign(libm::pow(v.abs(), self.p - 1.0), v)).collect();
        for (g, col) in grad.iter_mut().zip(self.cols) {
            *g = -dot(col, &w);
        }
        r.iter().map(|v| libm::pow(v.abs(), self.p)).sum::<f64>() / self.p
    }

    // gradient of the norm itself: Phi^T F_r
    fn stationarity(&self, _c: &[f64], grad: &[f64], value: f64) -> f64 {
        if value <= 0.0 {
            return 0.0;
        }
        let scale = libm::pow(self.p * value, (self.p - 1.0) / self.p);
        crate::linalg::norm_inf(grad) / scale
    }
}

/// `(a, lambda) -> ||target - a G - lambda phi||_p^p / p`.
struct RelaxFit<'a> {
    target: &'a [f64],
    g: &'a [f64],
    phi: &'a [f64],
    p: f64,
}

impl Objective for RelaxFit<'_> {
    fn dim(&self) -> usize {
        2
    }

    fn eval(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let cols = [self.g, self.phi];
        LpFit { target: self.target, cols: &cols, p: self.p }.eval(x, grad)
    }

    fn stationarity(&self, x: &[f64], grad: &[f64], value: f64) -> f64 {
        let cols = [self.g, self.phi];
        LpFit { target: self.target, cols: &cols, p: self.p }.stationarity(x, grad, value)
    }
}

/// Weak Greedy Algorithm with Free Relaxation: `G_m = a G_{m-1} + lambda phi_m`
/// with `(a, lambda)` minimizing `||f_0 - G_m||` (least squares in `l_2`,
/// BFGS from the previous iterate `(1, 0)` otherwise).
pub fn run_wgafr(f0: &[f64], dict: &Dictionary, cfg: &GreedyConfig) -> Result<Trace> {
    check_input(f0, dict, cfg)?;
    let mut run = Run::new(f0, dict, cfg);
    let mut g = vec![0.0; dict.dim()];
    let p = dict.space().p();
    let mut stopped = None;
    for m in 1..=cfg.max_iter {
        let sel = match run.select() {
            Ok(s) => s,
            Err(t) => {
                stopped = Some(t);
                break;
            }
        };
        let phi = sel.index.atom(dict);
        let (a, lambda) = if dict.space().is_euclidean() {
            let ls = least_squares(&[&g, &phi], f0);
            // a zero or parallel G gets coefficient 0
            (ls.coefficients[0], ls.coefficients[1])
        } else {
            let obj = RelaxFit { target: f0, g: &g, phi: &phi, p };
            let opts = MinimizeOptions { tol: cfg.inner_tol, max_iter: cfg.inner_max_iter };
            let r = minimize(&obj, &[1.0, 0.0], opts)?;
            (r.x[0], r.x[1])
        };
        for v in run.expansion.iter_mut() {
            *v *= a;
        }
        run.expansion[sel.index.column()] += sel.index.sign() * lambda;
        if m % REFRESH_EVERY == 0 {
            g = dict.combine(&run.expansion);
        } else {
            for v in g.iter_mut() {
                *v *= a;
            }
            axpy(lambda, &phi, &mut g);
        }
        run.residual = crate::linalg::sub(f0, &g);
        run.norm = run.space().norm_of(&run.residual);
        run.record(sel, lambda);
    }
    run.finish(Algorithm::Wgafr, stopped)
}

/// Weak Greedy Algorithm (matching pursuit), `l_2` only:
/// `f_m = f_{m-1} - <f_{m-1}, phi_m> phi_m / ||phi_m||^2`.
pub fn run_wga(f0: &[f64], dict: &Dictionary, cfg: &GreedyConfig) -> Result<Trace> {
    check_input(f0, dict, cfg)?;
    require_l2(dict, "WGA")?;
    let mut run = Run::new(f0, dict, cfg);
    let stopped = pure_steps(&mut run, cfg.max_iter);
    run.finish(Algorithm::Wga, stopped)
}

fn pure_steps(run: &mut Run<'_>, budget: usize) -> Option<Termination> {
    for _ in 0..budget {
        let sel = match run.select() {
            Ok(s) => s,
            Err(t) => return Some(t),
        };
        let phi = sel.index.atom(run.dict);
        let c = dot(&run.residual, &phi) / dot(&phi, &phi);
        run.expansion[sel.index.column()] += sel.index.sign() * c;
        if (run.steps.len() + 1).is_multiple_of(REFRESH_EVERY) {
            run.refresh_residual();
        } else {
            axpy(-c, &phi, &mut run.residual);
            run.norm = run.space().norm_of(&run.residual);
        }
        run.record(sel, c);
    }
    None
}

/// WOGA for `switch_iter` steps (default `ceil(sqrt(d))`), then WGA from
/// the WOGA residual and expansion. `l_2` only.
pub fn run_hybrid(f0: &[f64], dict: &Dictionary, cfg: &GreedyConfig, switch_iter: Option<usize>) -> Result<Trace> {
    check_input(f0, dict, cfg)?;
    require_l2(dict, "the hybrid strategy")?;
    let switch = switch_iter.unwrap_or_else(|| libm::ceil(libm::sqrt(dict.dim() as f64)) as usize);
    let first = switch.min(cfg.max_iter);
    let head = if first > 0 {
        let c = GreedyConfig { max_iter: first, ..*cfg };
        Some(chebyshev(f0, dict, &c, Algorithm::Woga)?)
    } else {
        None
    };
    let mut run = Run::new(f0, dict, cfg);
    let mut stopped = None;
    if let Some(h) = head {
        run.expansion = h.expansion;
        run.steps = h.steps;
        run.refresh_residual();
        if h.termination != Termination::MaxIter {
            stopped = Some(h.termination);
        }
    }
    let switched = run.steps.len();
    if stopped.is_none() {
        stopped = pure_steps(&mut run, cfg.max_iter - switched);
    }
    let mut trace = run.finish(Algorithm::Hybrid, stopped)?;
    trace.switch_at = Some(switched);
    Ok(trace)
}

/// Dual greedy expansion and the running sum of its step sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct DgaRun {
    pub trace: Trace,
    /// `sum_k c_k` over all steps (without aggregation by column).
    pub coefficient_sum: f64,
}

/// DGA(t, b, mu) with `mu(u) = gamma u^q` from the declared smoothness:
/// `c_m = ||f_{m-1}|| (t b r_D(f_{m-1}) / (2 gamma))^{1/(q-1)}` solves
/// `||f|| mu(c / ||f||) = (t b / 2) c r_D(f)`, and `f_m = f_{m-1} - c_m phi_m`.
///
/// Stops with [`Termination::Stagnation`] if the residual norm decreases by
/// less than `1e-15` relative over 100 steps.
pub fn run_dga(f0: &[f64], dict: &Dictionary, cfg: &GreedyConfig) -> Result<DgaRun> {
    check_input(f0, dict, cfg)?;
    let sp = *dict.space();
    let mut run = Run::new(f0, dict, cfg);
    let mut sum = 0.0;
    let mut history: Vec<f64> = Vec::new();
    let mut stopped = None;
    let e = 1.0 / (sp.q() - 1.0);
    for m in 1..=cfg.max_iter {
        let sel = match run.select() {
            Ok(s) => s,
            Err(t) => {
                stopped = Some(t);
                break;
            }
        };
        let c = run.norm * libm::pow(cfg.t * cfg.b * sel.sup / (2.0 * sp.gamma()), e);
        let phi = sel.index.atom(dict);
        run.expansion[sel.index.column()] += sel.index.sign() * c;
        sum += c;
        if m % REFRESH_EVERY == 0 {
            run.refresh_residual();
        } else {
            axpy(-c, &phi, &mut run.residual);
            run.norm = sp.norm_of(&run.residual);
        }
        run.record(sel, c);
        history.push(run.norm);
        if m > 100 {
            let old = history[m - 101];
            if old - run.norm <= 1e-15 * old {
                stopped = Some(Termination::Stagnation);
                break;
            }
        }
    }
    Ok(DgaRun { trace: run.finish(Algorithm::Dga, stopped)?, coefficient_sum: sum })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use crate::spaces::SmoothSpace;

    fn cfg(max_iter: usize) -> GreedyConfig {
        GreedyConfig { max_iter, ..GreedyConfig::default() }
    }

    fn canonical(d: usize) -> Dictionary {
        Dictionary::canonical(SmoothSpace::euclidean(d))
    }

    #[test]
    fn wcga_two_step_projection() {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let t = run_wcga(&[s, s], &canonical(2), &cfg(10)).unwrap();
        assert_eq!(t.steps.len(), 2);
        assert!((t.steps[0].residual_norm - s).abs() < 1e-15);
        assert_eq!(t.steps[1].residual_norm, 0.0);
        assert_eq!(t.termination, Termination::StopNorm);
    }

    #[test]
    fn one_step_recovery_of_an_atom() {
        let sp = SmoothSpace::lp(4, 3.0).unwrap();
        let d = Dictionary::random_sphere(sp, 6, 3).unwrap();
        let g = d.atom(4).to_vec();
        for run in [run_wcga, run_wgafr] {
            let t = run(&g, &d, &cfg(1)).unwrap();
            assert_eq!(t.steps[0].selected.get(), 5);
            assert!(t.steps[0].residual_norm <= 1e-10, "{}", t.steps[0].residual_norm);
        }
        let e = canonical(3);
        let t = run_wga(e.atom(1), &e, &cfg(5)).unwrap();
        assert_eq!(t.steps.len(), 1);
        assert_eq!(t.final_norm(), 0.0);
    }

    #[test]
    fn woga_is_exact_after_d_steps() {
        let t = run_woga(&[1.0, 2.0, 3.0, 4.0], &canonical(4), &cfg(10)).unwrap();
        assert_eq!(t.steps.len(), 4);
        assert_eq!(t.final_norm(), 0.0);
        let sel: Vec<i64> = t.selected().iter().map(|s| s.get()).collect();
        assert_eq!(sel, [4, 3, 2, 1]);
    }

    #[test]
    fn woga_residual_orthogonal_to_selected_atoms() {
        let d = Dictionary::random_sphere(SmoothSpace::euclidean(12), 40, 8).unwrap();
        let f0 = sampling::gaussian(&mut sampling::seeded(9), 12);
        let t = run_woga(&f0, &d, &cfg(8)).unwrap();
        let residual = crate::linalg::sub(&f0, &d.combine(&t.expansion));
        for s in &t.steps {
            assert!(dot(&residual, d.atom(s.selected.column())).abs() <= 1e-10);
        }
    }

    #[test]
    fn wga_matches_woga_on_orthonormal_basis() {
        let f0 = [0.3, -1.2, 0.7, 2.0, -0.1];
        let a = run_wga(&f0, &canonical(5), &cfg(10)).unwrap();
        let b = run_woga(&f0, &canonical(5), &cfg(10)).unwrap();
        assert_eq!(a.selected(), b.selected());
        for (x, y) in a.residual_norms().iter().zip(b.residual_norms()) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn wga_pythagoras() {
        let d = Dictionary::random_sphere(SmoothSpace::euclidean(6), 20, 1).unwrap();
        let f0 = sampling::gaussian(&mut sampling::seeded(2), 6);
        let t = run_wga(&f0, &d, &cfg(100)).unwrap();
        let norms = t.residual_norms();
        for (k, s) in t.steps.iter().enumerate() {
            let inner = s.step_coefficient; // unit atoms: <f, phi> = c
            let lhs = norms[k + 1] * norms[k + 1];
            let rhs = norms[k] * norms[k] - inner * inner;
            assert!((lhs - rhs).abs() <= 1e-12 * norms[0] * norms[0], "step {k}");
        }
    }

    #[test]
    fn residuals_are_non_increasing() {
        for p in [1.5, 2.0, 3.0] {
            let sp = SmoothSpace::lp(8, p).unwrap();
            let d = Dictionary::random_sphere(sp, 24, 4).unwrap();
            let f0 = sampling::gaussian(&mut sampling::seeded(5), 8);
            for run in [run_wcga, run_wgafr] {
                let n = run(&f0, &d, &cfg(30)).unwrap().residual_norms();
                for w in n.windows(2) {
                    assert!(w[1] <= w[0] + 1e-12, "p={p}: {} > {}", w[1], w[0]);
                }
            }
        }
    }

    #[test]
    fn lp_chebyshev_matches_brute_force_on_two_atoms() {
        // best approximation by two atoms in l_3, compared with a dense grid search
        let sp = SmoothSpace::lp(3, 3.0).unwrap();
        let d = Dictionary::random_sphere(sp, 2, 11).unwrap();
        let f0 = [0.9, -0.4, 0.3];
        let t = run_wcga(&f0, &d, &cfg(2)).unwrap();
        let mut best = f64::INFINITY;
        let (lo, hi, n) = (-3.0, 3.0, 600);
        for i in 0..=n {
            for j in 0..=n {
                let a = lo + (hi - lo) * i as f64 / n as f64;
                let b = lo + (hi - lo) * j as f64 / n as f64;
                let r: Vec<f64> = (0..3).map(|k| f0[k] - a * d.atom(0)[k] - b * d.atom(1)[k]).collect();
                best = best.min(sp.norm(&r).unwrap());
            }
        }
        assert!(t.final_norm() <= best + 1e-12);
        assert!(best - t.final_norm() < 1e-2);
    }

    #[test]
    fn wcga_dominates_wga_on_same_prefix() {
        let d = Dictionary::random_sphere(SmoothSpace::euclidean(10), 30, 6).unwrap();
        let f0 = sampling::gaussian(&mut sampling::seeded(7), 10);
        let wga = run_wga(&f0, &d, &cfg(25)).unwrap();
        let mut basis = OrthoBasis::new(10);
        for s in &wga.steps {
            basis.push(s.selected.column(), d.atom(s.selected.column()));
            let best = crate::linalg::norm2(&basis.residual(&f0));
            assert!(best <= s.residual_norm + 1e-12);
        }
    }

    #[test]
    fn dga_closed_form_step() {
        let d = canonical(2);
        let c = GreedyConfig { t: 1.0, b: 0.5, max_iter: 1, ..GreedyConfig::default() };
        let r = run_dga(&[1.0, 0.0], &d, &c).unwrap();
        assert!((r.trace.steps[0].step_coefficient - 0.5).abs() < 1e-15);
        assert!((r.trace.final_norm() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn dga_step_solves_defining_equation() {
        // ||f|| gamma (c/||f||)^q = (t b / 2) c r solved by bisection in c
        for p in [1.5, 2.0, 4.0] {
            let sp = SmoothSpace::lp(5, p).unwrap();
            let d = Dictionary::random_sphere(sp, 12, 3).unwrap();
            let f0 = sampling::gaussian(&mut sampling::seeded(4), 5);
            let c = GreedyConfig { t: 0.9, b: 0.3, max_iter: 1, ..GreedyConfig::default() };
            let run = run_dga(&f0, &d, &c).unwrap();
            let s = &run.trace.steps[0];
            let fnorm = run.trace.initial_norm;
            let h = |x: f64| fnorm * sp.gamma() * libm::pow(x / fnorm, sp.q()) - 0.5 * c.t * c.b * x * s.sup;
            let (mut lo, mut hi) = (1e-12 * fnorm, 1e3 * fnorm);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if h(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            assert!((s.step_coefficient - lo).abs() <= 1e-10 * lo, "p={p}");
        }
    }

    #[test]
    fn dga_decrease_inequality() {
        let sp = SmoothSpace::euclidean(8);
        let d = Dictionary::random_sphere(sp, 32, 2).unwrap();
        let f0 = sampling::gaussian(&mut sampling::seeded(3), 8);
        let c = GreedyConfig { t: 1.0, b: 0.5, max_iter: 2000, stop_norm: 1e-6, ..GreedyConfig::default() };
        let run = run_dga(&f0, &d, &c).unwrap();
        let n = run.trace.residual_norms();
        for (k, s) in run.trace.steps.iter().enumerate() {
            assert!(c.t * (1.0 - c.b) * s.step_coefficient * s.sup <= n[k] - n[k + 1] + 1e-10);
        }
        assert_eq!(run.trace.termination, Termination::StopNorm);
    }

    #[test]
    fn hybrid_edge_cases() {
        let d = Dictionary::random_sphere(SmoothSpace::euclidean(6), 18, 5).unwrap();
        let f0 = sampling::gaussian(&mut sampling::seeded(6), 6);
        let h = run_hybrid(&f0, &d, &cfg(40), Some(0)).unwrap();
        let w = run_wga(&f0, &d, &cfg(40)).unwrap();
        assert_eq!(h.steps, w.steps);
        assert_eq!(h.switch_at, Some(0));
        let h = run_hybrid(&f0, &d, &cfg(40), Some(6)).unwrap();
        assert!(h.final_norm() <= 1e-12 && h.steps.len() == 6);
    }

    #[test]
    fn l2_only_algorithms_reject_other_norms() {
        let d = Dictionary::canonical(SmoothSpace::lp(2, 3.0).unwrap());
        assert!(matches!(run_woga(&[1.0, 0.0], &d, &cfg(3)), Err(Error::Unsupported(_))));
        assert!(matches!(run_wga(&[1.0, 0.0], &d, &cfg(3)), Err(Error::Unsupported(_))));
        assert!(matches!(run_hybrid(&[1.0, 0.0], &d, &cfg(3), None), Err(Error::Unsupported(_))));
    }
}
