use alloc::vec;
use alloc::vec::Vec;

use super::{Energy, EnergyParams};
use crate::dictionary::Dictionary;
use crate::error::{check_dim, invalid, Result};
use crate::greedy::{select_by_functional, Algorithm, GreedyConfig, Selection, SignedIndex, Termination};
use crate::linalg::{axpy, dot, least_squares, OrthoBasis};
use crate::minimize::{minimize, MinimizeOptions, Objective};

const REFRESH_EVERY: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct DescentStep {
    pub m: usize,
    pub selected: SignedIndex,
    /// `<-E'(G_{m-1}), phi_m>`.
    pub value: f64,
    /// `sup_g <-E'(G_{m-1}), g>` over `D^+-`.
    pub sup: f64,
    pub energy: f64,
    /// `a_m = E(G_m) - inf E` when the minimum is known.
    pub energy_gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DescentTrace {
    pub algorithm: Algorithm,
    /// `E(0)`.
    pub initial_energy: f64,
    pub known_min: Option<f64>,
    pub steps: Vec<DescentStep>,
    pub termination: Termination,
    /// Column coefficients of `G_m`.
    pub expansion: Vec<f64>,
    /// `B` of the recursion `a_m <= a_{m-1} (1 - a_{m-1}^{1/(q-1)} / B)`, when
    /// a certified `beta` was supplied.
    pub proof_b: Option<f64>,
    pub params: EnergyParams,
}

impl DescentTrace {
    /// `E(G_m)` for `m = 0..=steps`.
    pub fn energies(&self) -> Vec<f64> {
        core::iter::once(self.initial_energy).chain(self.steps.iter().map(|s| s.energy)).collect()
    }

    /// `a_m` for `m = 0..=steps`, when the minimum is known.
    pub fn gaps(&self) -> Option<Vec<f64>> {
        let w = self.known_min?;
        Some(self.energies().into_iter().map(|e| e - w).collect())
    }

    pub fn selected(&self) -> Vec<SignedIndex> {
        self.steps.iter().map(|s| s.selected).collect()
    }

    pub fn final_energy(&self) -> f64 {
        self.steps.last().map_or(self.initial_energy, |s| s.energy)
    }
}

/// `B` with `B^{-1} = (t beta / (4 C_0))^{q/(q-1)} (2 gamma)^{-1/(q-1)}`.
pub fn proof_constant(params: &EnergyParams, t: f64, beta: f64) -> Result<f64> {
    params.validate()?;
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(invalid("beta", "must lie in (0, 1]"));
    }
    if !(params.c0 > 0.0) {
        return Err(invalid("c0", "a positive bound on the level set is required"));
    }
    let q = params.q;
    let inv = libm::pow(t * beta / (4.0 * params.c0), q / (q - 1.0)) * libm::pow(2.0 * params.gamma, -1.0 / (q - 1.0));
    Ok(1.0 / inv)
}

/// `c -> E(sum_j c_j cols_j)`.
struct SpanEnergy<'a, E: Energy + ?Sized> {
    energy: &'a E,
    cols: Vec<&'a [f64]>,
}

impl<E: Energy + ?Sized> SpanEnergy<'_, E> {
    fn point(&self, c: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.energy.space().dim()];
        for (cj, col) in c.iter().zip(&self.cols) {
            axpy(*cj, col, &mut x);
        }
        x
    }
}

impl<E: Energy + ?Sized> Objective for SpanEnergy<'_, E> {
    fn dim(&self) -> usize {
        self.cols.len()
    }

    fn eval(&self, c: &[f64], grad: &mut [f64]) -> f64 {
        let x = self.point(c);
        match self.energy.gradient(&x) {
            Ok(g) => {
                for (gj, col) in grad.iter_mut().zip(&self.cols) {
                    *gj = dot(g.coords(), col);
                }
            }
            // the kink of an increasing norm profile is its global minimum
            Err(_) => grad.iter_mut().for_each(|g| *g = 0.0),
        }
        self.energy.value(&x)
    }
}

struct Descent<'a, E: Energy + ?Sized> {
    energy: &'a E,
    dict: &'a Dictionary,
    cfg: &'a GreedyConfig,
    params: EnergyParams,
    g: Vec<f64>,
    value: f64,
    expansion: Vec<f64>,
    steps: Vec<DescentStep>,
}

impl<'a, E: Energy + ?Sized> Descent<'a, E> {
    fn new(energy: &'a E, dict: &'a Dictionary, cfg: &'a GreedyConfig) -> Result<Self> {
        cfg.validate()?;
        let params = energy.params();
        params.validate()?;
        check_dim(energy.space().dim(), dict.dim())?;
        let g = vec![0.0; dict.dim()];
        let value = energy.value(&g);
        Ok(Self { energy, dict, cfg, params, g, value, expansion: vec![0.0; dict.len()], steps: Vec::new() })
    }

    fn gap(&self) -> Option<f64> {
        self.params.known_min.map(|w| self.value - w)
    }

    fn select(&self) -> core::result::Result<Selection, Termination> {
        if self.gap().is_some_and(|a| a <= self.cfg.stop_norm) {
            return Err(Termination::StopNorm);
        }
        let grad = match self.energy.gradient(&self.g) {
            Ok(g) => g,
            Err(_) => return Err(Termination::Kink),
        };
        let neg: Vec<f64> = grad.coords().iter().map(|v| -v).collect();
        let sel = select_by_functional(&neg, self.dict, self.cfg.t, self.cfg.selection);
        if !(sel.sup > 0.0) {
            return Err(Termination::NoCorrelation);
        }
        Ok(sel)
    }

    fn record(&mut self, sel: Selection) {
        self.value = self.energy.value(&self.g);
        self.steps.push(DescentStep {
            m: self.steps.len() + 1,
            selected: sel.index,
            value: sel.value,
            sup: sel.sup,
            energy: self.value,
            energy_gap: self.gap(),
        });
    }

    fn finish(self, algorithm: Algorithm, stopped: Option<Termination>) -> Result<DescentTrace> {
        let termination = stopped.unwrap_or(if self.gap().is_some_and(|a| a <= self.cfg.stop_norm) {
            Termination::StopNorm
        } else {
            Termination::MaxIter
        });
        let proof_b = match self.cfg.beta_lower {
            Some(b) if self.params.c0 > 0.0 => Some(proof_constant(&self.params, self.cfg.t, b)?),
            _ => None,
        };
        let initial_energy = self.energy.value(&vec![0.0; self.dict.dim()]);
        Ok(DescentTrace {
            algorithm,
            initial_energy,
            known_min: self.params.known_min,
            steps: self.steps,
            termination,
            expansion: self.expansion,
            proof_b,
            params: self.params,
        })
    }

    fn inner_options(&self) -> MinimizeOptions {
        MinimizeOptions { tol: self.cfg.inner_tol, max_iter: self.cfg.inner_max_iter }
    }
}

/// WCGA(co): `G_m` minimizes `E` over `span(phi_1..phi_m)`.
///
/// Quadratic energies are minimized by orthogonal projection; other energies
/// by BFGS over the span coefficients, warm-started at the previous
/// minimizer, to `||Phi^T E'(G_m)||_inf <= inner_tol`.
pub fn run_wcga_co<E: Energy + ?Sized>(energy: &E, dict: &Dictionary, cfg: &GreedyConfig) -> Result<DescentTrace> {
    let mut run = Descent::new(energy, dict, cfg)?;
    let mut basis = OrthoBasis::new(dict.dim());
    let mut coeffs: Vec<f64> = Vec::new();
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
        if added {
            if let Some(y) = energy.quadratic_target() {
                if basis.is_full() {
                    coeffs = basis.solve(y).0;
                    run.g = y.to_vec();
                } else {
                    coeffs = basis.solve(y).0;
                    run.g = combine_tags(dict, basis.tags(), &coeffs);
                }
            } else {
                coeffs.push(0.0);
                let obj = SpanEnergy { energy, cols: basis.tags().iter().map(|&j| dict.atom(j)).collect() };
                coeffs = minimize(&obj, &coeffs, run.inner_options())?.x;
                run.g = obj.point(&coeffs);
            }
            run.expansion.iter_mut().for_each(|v| *v = 0.0);
            for (&j, &c) in basis.tags().iter().zip(&coeffs) {
                run.expansion[j] = c;
            }
        }
        run.record(sel);
        if !added {
            // selected atom already in the span, where E is minimal
            stopped = Some(Termination::Stagnation);
            break;
        }
    }
    run.finish(Algorithm::WcgaCo, stopped)
}

fn combine_tags(dict: &Dictionary, tags: &[usize], coeffs: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; dict.dim()];
    for (&j, &c) in tags.iter().zip(coeffs) {
        axpy(c, dict.atom(j), &mut x);
    }
    x
}

/// WGAFR(co): `G_m = (1 - w) G_{m-1} + lambda phi_m` with `(w, lambda)`
/// minimizing `E` (least squares for quadratic energies, BFGS from the
/// feasible point `(w, lambda) = (0, 0)` otherwise).
pub fn run_wgafr_co<E: Energy + ?Sized>(energy: &E, dict: &Dictionary, cfg: &GreedyConfig) -> Result<DescentTrace> {
    let mut run = Descent::new(energy, dict, cfg)?;
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
        let (a, lambda) = if let Some(y) = energy.quadratic_target() {
            let ls = least_squares(&[&run.g, &phi], y);
            (ls.coefficients[0], ls.coefficients[1])
        } else {
            let obj = SpanEnergy { energy, cols: vec![&run.g[..], &phi[..]] };
            let r = minimize(&obj, &[1.0, 0.0], run.inner_options())?;
            (r.x[0], r.x[1])
        };
        run.expansion.iter_mut().for_each(|v| *v *= a);
        run.expansion[sel.index.column()] += sel.index.sign() * lambda;
        if m % REFRESH_EVERY == 0 {
            run.g = dict.combine(&run.expansion);
        } else {
            run.g.iter_mut().for_each(|v| *v *= a);
            axpy(lambda, &phi, &mut run.g);
        }
        run.record(sel);
    }
    run.finish(Algorithm::WgafrCo, stopped)
}
