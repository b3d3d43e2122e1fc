//! Greedy approximation of `f_0` by the symmetrized dictionary `D^+-`.
//!
//! Every algorithm starts from `f_0`, picks `phi_m in D^+-` with
//! `F_{f_{m-1}}(phi_m) >= t sup_g F_{f_{m-1}}(g)` and updates the residual
//! `f_m = f_0 - G_m`:
//!
//! * WCGA: `G_m` is the best approximant to `f_0` from `span(phi_1..phi_m)`
//!   (WOGA in `l_2`, where the projection is orthogonal);
//! * WGAFR: `G_m = (1 - w) G_{m-1} + lambda phi_m` with optimal `(w, lambda)`;
//! * WGA: `f_m = f_{m-1} - <f_{m-1}, phi_m> phi_m / ||phi_m||^2` (`l_2`);
//! * DGA: an explicit step `c_m` fixed by the modulus of smoothness;
//! * hybrid: WOGA for a few steps, then WGA.

mod algorithms;

use alloc::vec::Vec;
use core::fmt;

pub use algorithms::{run_dga, run_hybrid, run_wcga, run_wga, run_wgafr, run_woga, DgaRun};

pub(crate) use algorithms::LpFit;


use crate::dictionary::Dictionary;
use crate::error::{invalid, Error, Result};
use crate::spaces::SmoothSpace;

/// Atom of `D^+-`: `+-g^j` as `+-j` with 1-based `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedIndex(i64);

impl SignedIndex {
    /// `column` is 0-based.
    pub fn new(column: usize, negative: bool) -> Self {
        let j = column as i64 + 1;
        SignedIndex(if negative { -j } else { j })
    }

    /// Parses the signed 1-based form; `0` is not an atom.
    pub fn from_signed(v: i64) -> Option<Self> {
        (v != 0).then_some(SignedIndex(v))
    }

    /// 0-based column of `D`.
    pub fn column(&self) -> usize {
        (self.0.unsigned_abs() - 1) as usize
    }

    pub fn is_negative(&self) -> bool {
        self.0 < 0
    }

    pub fn sign(&self) -> f64 {
        if self.0 < 0 {
            -1.0
        } else {
            1.0
        }
    }

    pub fn get(&self) -> i64 {
        self.0
    }

    /// The atom `+-g^j` itself.
    pub fn atom(&self, dict: &Dictionary) -> Vec<f64> {
        let s = self.sign();
        dict.atom(self.column()).iter().map(|v| s * v).collect()
    }
}

impl fmt::Display for SignedIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// How the weakness parameter `t` is exercised at selection time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SelectionMode {
    /// Exact maximizer, lowest signed index among ties (admissible for every `t`).
    #[default]
    Exact,
    /// Two passes: compute the supremum, then take the first atom in scan
    /// order whose value reaches `t` times it.
    FirstAcceptable,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreedyConfig {
    /// Weakness parameter in `(0, 1]`.
    pub t: f64,
    /// Step parameter of the dual greedy expansion, in `(0, 1)`.
    pub b: f64,
    pub max_iter: usize,
    /// Stationarity tolerance of the inner convex solvers.
    pub inner_tol: f64,
    pub inner_max_iter: usize,
    /// Stop once the residual norm (or energy gap) is at most this.
    pub stop_norm: f64,
    pub selection: SelectionMode,
    /// Certified lower bound on `beta(D)`; attaches the contraction factor to traces.
    pub beta_lower: Option<f64>,
}

impl Default for GreedyConfig {
    fn default() -> Self {
        Self {
            t: 1.0,
            b: 0.5,
            max_iter: 1000,
            inner_tol: 1e-10,
            inner_max_iter: 10_000,
            stop_norm: 1e-12,
            selection: SelectionMode::Exact,
            beta_lower: None,
        }
    }
}

impl GreedyConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t > 0.0 && self.t <= 1.0) {
            return Err(invalid("t", alloc::format!("weakness parameter must lie in (0, 1], got {}", self.t)));
        }
        if !(self.b > 0.0 && self.b < 1.0) {
            return Err(invalid("b", alloc::format!("must lie in (0, 1), got {}", self.b)));
        }
        if self.max_iter == 0 {
            return Err(invalid("max_iter", "must be at least 1"));
        }
        if !(self.inner_tol > 0.0) {
            return Err(invalid("inner_tol", "must be positive"));
        }
        if self.inner_max_iter == 0 {
            return Err(invalid("inner_max_iter", "must be at least 1"));
        }
        if !(self.stop_norm >= 0.0) {
            return Err(invalid("stop_norm", "must be non-negative"));
        }
        if let Some(b) = self.beta_lower {
            if !(b > 0.0 && b <= 1.0) {
                return Err(invalid("beta_lower", "must lie in (0, 1]"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Selection {
    pub index: SignedIndex,
    /// Functional value at the selected atom.
    pub value: f64,
    /// Supremum of the functional over `D^+-`.
    pub sup: f64,
}

/// Scan of `D^+-` against the coordinates of a functional, in the order
/// `+g^1, -g^1, +g^2, ..` with strict comparison, so ties go to the lowest
/// signed position.
pub(crate) fn select_by_functional(f: &[f64], dict: &Dictionary, t: f64, mode: SelectionMode) -> Selection {
    let mut best = (SignedIndex::new(0, false), f64::NEG_INFINITY);
    let values: Vec<f64> = dict.atoms().iter().map(|g| crate::linalg::dot(f, g)).collect();
    for (j, &v) in values.iter().enumerate() {
        if v > best.1 {
            best = (SignedIndex::new(j, false), v);
        }
        if -v > best.1 {
            best = (SignedIndex::new(j, true), -v);
        }
    }
    let sup = best.1;
    if mode == SelectionMode::FirstAcceptable && t < 1.0 {
        let bar = t * sup;
        for (j, &v) in values.iter().enumerate() {
            if v >= bar {
                return Selection { index: SignedIndex::new(j, false), value: v, sup };
            }
            if -v >= bar {
                return Selection { index: SignedIndex::new(j, true), value: -v, sup };
            }
        }
    }
    Selection { index: best.0, value: best.1, sup }
}

/// Greedy step (1): maximizes `F_r(g)` over `D^+-` for the norming
/// functional `F_r` of the residual.
pub fn select_atom(residual: &[f64], dict: &Dictionary, t: f64, mode: SelectionMode) -> Result<Selection> {
    let f = dict.space().norming_functional(residual)?;
    Ok(select_by_functional(f.coords(), dict, t, mode))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Wcga,
    Wgafr,
    Wga,
    Woga,
    Dga,
    Hybrid,
    WcgaCo,
    WgafrCo,
}

impl Algorithm {
    pub const ALL: [Algorithm; 8] = [
        Algorithm::Wcga,
        Algorithm::Wgafr,
        Algorithm::Wga,
        Algorithm::Woga,
        Algorithm::Dga,
        Algorithm::Hybrid,
        Algorithm::WcgaCo,
        Algorithm::WgafrCo,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::Wcga => "wcga",
            Algorithm::Wgafr => "wgafr",
            Algorithm::Wga => "wga",
            Algorithm::Woga => "woga",
            Algorithm::Dga => "dga",
            Algorithm::Hybrid => "hybrid",
            Algorithm::WcgaCo => "wcga_co",
            Algorithm::WgafrCo => "wgafr_co",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.as_str() == s)
    }

    /// Convex-optimization variant operating on an energy.
    pub fn is_descent(&self) -> bool {
        matches!(self, Algorithm::WcgaCo | Algorithm::WgafrCo)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Residual norm (or energy gap) reached `stop_norm`.
    StopNorm,
    MaxIter,
    /// No atom of `D^+-` has positive correlation with the residual.
    NoCorrelation,
    /// The residual stopped decreasing.
    Stagnation,
    /// The energy gradient does not exist at the iterate (minimum of a kinked energy).
    Kink,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::StopNorm => "stop_norm",
            Termination::MaxIter => "max_iter",
            Termination::NoCorrelation => "no_correlation",
            Termination::Stagnation => "stagnation",
            Termination::Kink => "kink",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub m: usize,
    pub selected: SignedIndex,
    /// Selection functional at `phi_m`.
    pub value: f64,
    /// Supremum of the selection functional over `D^+-` (`r_D` for the DGA).
    pub sup: f64,
    /// Coefficient of `phi_m` introduced at this step.
    pub step_coefficient: f64,
    pub residual_norm: f64,
    /// `l_1` norm of the aggregated column coefficients of `G_m`.
    pub coeff_l1: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub algorithm: Algorithm,
    pub initial_norm: f64,
    pub steps: Vec<Step>,
    pub termination: Termination,
    /// Column coefficients `a` with `G_m = sum_j a_j g^j` after the last step.
    pub expansion: Vec<f64>,
    pub contraction: Option<Contraction>,
    /// Number of orthogonal steps before a hybrid run switched to WGA.
    pub switch_at: Option<usize>,
}

impl Trace {
    /// `||f_m||` for `m = 0..=steps`.
    pub fn residual_norms(&self) -> Vec<f64> {
        core::iter::once(self.initial_norm).chain(self.steps.iter().map(|s| s.residual_norm)).collect()
    }

    pub fn selected(&self) -> Vec<SignedIndex> {
        self.steps.iter().map(|s| s.selected).collect()
    }

    pub fn final_norm(&self) -> f64 {
        self.steps.last().map_or(self.initial_norm, |s| s.residual_norm)
    }
}

/// Per-step contraction `||f_m|| <= (1 - kappa t beta) ||f_{m-1}||` with
/// `kappa = (t beta / (4 gamma))^{1/(q-1)} / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contraction {
    pub kappa: f64,
    pub factor: f64,
    pub t: f64,
    pub beta: f64,
}

impl Contraction {
    /// Step length `lambda_1 = 2 kappa ||f_{m-1}||` realizing the contraction.
    pub fn lambda1(&self, residual_norm: f64) -> f64 {
        2.0 * self.kappa * residual_norm
    }

    /// Guaranteed bound on `||f_m||` from `||f_0||`.
    pub fn bound(&self, initial: f64, m: usize) -> f64 {
        libm::pow(self.factor, m as f64) * initial
    }
}

pub fn guaranteed_contraction(sp: &SmoothSpace, beta_lower: f64, t: f64) -> Result<Contraction> {
    if !(beta_lower > 0.0) {
        return Err(invalid("beta", "a positive lower bound on beta is required"));
    }
    if !(t > 0.0 && t <= 1.0) {
        return Err(invalid("t", "weakness parameter must lie in (0, 1]"));
    }
    let kappa = 0.5 * libm::pow(t * beta_lower / (4.0 * sp.gamma()), 1.0 / (sp.q() - 1.0));
    let factor = 1.0 - kappa * t * beta_lower;
    if !(factor > 0.0 && factor < 1.0) {
        return Err(Error::InvalidParameter {
            name: "gamma",
            reason: alloc::format!("contraction factor {factor} outside (0, 1): inconsistent smoothness parameters"),
        });
    }
    Ok(Contraction { kappa, factor, t, beta: beta_lower })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::SmoothSpace;

    #[test]
    fn signed_index_roundtrip() {
        let i = SignedIndex::new(1, true);
        assert_eq!((i.get(), i.column(), i.sign()), (-2, 1, -1.0));
        assert_eq!(SignedIndex::from_signed(-2), Some(i));
        assert_eq!(SignedIndex::from_signed(0), None);
        assert_eq!(alloc::format!("{}", SignedIndex::new(0, false)), "1");
    }

    #[test]
    fn selection_examples() {
        let d = Dictionary::canonical(SmoothSpace::euclidean(2));
        let s = select_atom(&[3.0, 4.0], &d, 1.0, SelectionMode::Exact).unwrap();
        assert_eq!(s.index.get(), 2);
        assert!((s.value - 0.8).abs() < 1e-15);
        let s = select_atom(&[-1.0, 0.0], &d, 1.0, SelectionMode::Exact).unwrap();
        assert_eq!((s.index.get(), s.value), (-1, 1.0));
        assert_eq!(select_atom(&[0.0, 0.0], &d, 1.0, SelectionMode::Exact), Err(Error::ZeroVector));
    }

    #[test]
    fn ties_go_to_lowest_index() {
        let d = Dictionary::canonical(SmoothSpace::euclidean(2));
        let s = select_atom(&[1.0, 1.0], &d, 1.0, SelectionMode::Exact).unwrap();
        assert_eq!(s.index.get(), 1);
        let s = select_atom(&[-1.0, 1.0], &d, 1.0, SelectionMode::Exact).unwrap();
        assert_eq!(s.index.get(), -1);
    }

    #[test]
    fn first_acceptable_mode_uses_t() {
        let d = Dictionary::canonical(SmoothSpace::euclidean(3));
        let r = [0.5, 0.6, 1.0];
        assert_eq!(select_atom(&r, &d, 1.0, SelectionMode::FirstAcceptable).unwrap().index.get(), 3);
        assert_eq!(select_atom(&r, &d, 0.55, SelectionMode::FirstAcceptable).unwrap().index.get(), 2);
        assert_eq!(select_atom(&r, &d, 0.5, SelectionMode::FirstAcceptable).unwrap().index.get(), 1);
        assert_eq!(select_atom(&r, &d, 0.5, SelectionMode::Exact).unwrap().index.get(), 3);
    }

    #[test]
    fn selection_in_lp_matches_finite_difference_scan() {
        let sp = SmoothSpace::lp(2, 3.0).unwrap();
        let d = Dictionary::random_sphere(sp, 3, 2).unwrap();
        let r = [1.0, 2.0];
        let s = select_atom(&r, &d, 1.0, SelectionMode::Exact).unwrap();
        let mut best = (0i64, f64::NEG_INFINITY);
        for j in 0..3 {
            for sign in [1.0, -1.0] {
                let g: Vec<f64> = d.atom(j).iter().map(|v| sign * v).collect();
                let v = sp.directional_derivative(&r, &g, 1e-5).unwrap();
                if v > best.1 + 1e-9 {
                    best = ((j as i64 + 1) * sign as i64, v);
                }
            }
        }
        assert_eq!(s.index.get(), best.0);
        assert!((s.value - best.1).abs() < 1e-6);
    }

    #[test]
    fn contraction_examples() {
        let sp = SmoothSpace::euclidean(2);
        let c = guaranteed_contraction(&sp, core::f64::consts::FRAC_1_SQRT_2, 1.0).unwrap();
        assert!((c.kappa - core::f64::consts::FRAC_1_SQRT_2 / 4.0).abs() < 1e-15);
        assert!((c.factor - 0.875).abs() < 1e-15);
        for d in [4usize, 16, 64] {
            let c = guaranteed_contraction(&SmoothSpace::euclidean(d), 1.0 / libm::sqrt(d as f64), 1.0).unwrap();
            assert!((c.factor - (1.0 - 1.0 / (4.0 * d as f64))).abs() < 1e-15);
        }
        assert!(guaranteed_contraction(&sp, 1e-3, 1.0).unwrap().factor > 1.0 - 1e-6);
        assert!(guaranteed_contraction(&sp, 0.0, 1.0).is_err());
        assert!((c.lambda1(2.0) - 4.0 * c.kappa).abs() < 1e-15);
    }

    #[test]
    fn config_validation_names_field() {
        let bad = GreedyConfig { t: 1.5, ..GreedyConfig::default() };
        assert!(matches!(bad.validate(), Err(Error::InvalidParameter { name: "t", .. })));
        let bad = GreedyConfig { b: 1.0, ..GreedyConfig::default() };
        assert!(matches!(bad.validate(), Err(Error::InvalidParameter { name: "b", .. })));
        assert!(GreedyConfig::default().validate().is_ok());
        assert_eq!(Algorithm::parse("wgafr_co"), Some(Algorithm::WgafrCo));
    }
}
