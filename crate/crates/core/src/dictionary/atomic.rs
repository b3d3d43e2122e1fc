//! Brackets for the atomic norm `||x||_{A_1(D)} = inf { sum |c_j| : x = sum c_j g^j }`
//! and for `R_1(D) = max_{||x|| <= 1} ||x||_{A_1(D)}`.
//!
//! Upper bounds come from explicit representations of `x`: the dual greedy
//! expansion with a least-squares tail, and, when affordable, the best basic
//! representation found by support enumeration. Lower bounds come from weak
//! duality: for every covector `F`, `|F(x)| <= ||x||_A max_g |F(g)|`.

use alloc::vec;
use alloc::vec::Vec;

use super::beta::{beta_bruteforce, max_pairing};
use super::Dictionary;
use crate::error::{invalid, Error, Result};
use crate::greedy::{run_dga, GreedyConfig};
use crate::linalg::{binomial, dot, least_squares, norm1, norm2, solve_linear, Combinations, OrthoBasis};
use crate::sampling;

#[derive(Debug, Clone, PartialEq)]
pub struct AtomicConfig {
    /// Dual greedy expansion parameters.
    pub t: f64,
    pub b: f64,
    /// Target residual of the expansion, relative to `||x||`.
    pub eta: f64,
    pub max_iter: usize,
    /// Certified lower bound on `beta`, enabling the `||r|| / beta` tail bound.
    pub beta_lower: Option<f64>,
    /// Random unit covectors tried for the lower bound.
    pub n_covectors: usize,
    /// Additional covectors tried for the lower bound.
    pub covectors: Vec<Vec<f64>>,
    /// Cap on supports (upper bound) and on signed vertex systems (lower
    /// bound) enumerated; above it that part is skipped.
    pub enumeration_budget: u128,
    pub seed: u64,
}

impl Default for AtomicConfig {
    fn default() -> Self {
        Self {
            t: 1.0,
            b: 0.05,
            eta: 1e-9,
            max_iter: 100_000,
            beta_lower: None,
            n_covectors: 64,
            covectors: Vec::new(),
            enumeration_budget: 100_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtomicBounds {
    pub lower: f64,
    pub upper: f64,
    /// Aggregated `l_1` of the greedy expansion plus its tail bound.
    pub expansion_upper: f64,
    /// Best basic representation over all supports, when enumerated.
    pub enumerated_upper: Option<f64>,
    pub expansion_steps: usize,
}

/// Two-sided bracket `lower <= ||x||_{A_1(D)} <= upper`.
///
/// Fails with [`Error::OutsideSpan`] when the `l_2` least-squares residual
/// of `x` over the atoms exceeds `1e-8` (relative), where the atomic norm is
/// infinite.
pub fn atomic_norm_bounds(x: &[f64], dict: &Dictionary, cfg: &AtomicConfig) -> Result<AtomicBounds> {
    crate::error::check_dim(dict.dim(), x.len())?;
    if !(cfg.eta > 0.0) {
        return Err(invalid("eta", "expansion tolerance must be positive"));
    }
    let xn2 = norm2(x);
    if xn2 == 0.0 {
        return Ok(AtomicBounds { lower: 0.0, upper: 0.0, expansion_upper: 0.0, enumerated_upper: Some(0.0), expansion_steps: 0 });
    }
    let cols: Vec<&[f64]> = dict.atoms().iter().map(|a| a.as_slice()).collect();
    let ls = least_squares(&cols, x);
    if ls.residual_norm > 1e-8 * xn2.max(1.0) {
        return Err(Error::OutsideSpan { residual: ls.residual_norm });
    }

    let sp = dict.space();
    let xn = sp.norm_of(x);
    let gcfg = GreedyConfig {
        t: cfg.t,
        b: cfg.b,
        max_iter: cfg.max_iter,
        stop_norm: cfg.eta * xn,
        ..GreedyConfig::default()
    };
    let run = run_dga(x, dict, &gcfg)?;
    let head = norm1(&run.trace.expansion);
    let residual = crate::linalg::sub(x, &dict.combine(&run.trace.expansion));
    let mut tail = representation_l1(&residual, &cols);
    if let Some(beta) = cfg.beta_lower.filter(|b| *b > 0.0) {
        tail = tail.min(sp.norm_of(&residual) / beta);
    }
    let expansion_upper = head + tail;
    let enumerated_upper = exact_atomic_norm_within(x, &cols, ls.rank, cfg.enumeration_budget);
    let upper = enumerated_upper.map_or(expansion_upper, |e| e.min(expansion_upper));

    let mut lower = dual_lower_bound(x, dict, cfg, ls.rank);
    // weak duality makes lower <= upper exact; rounding may cross by a few ulps
    if lower > upper && lower - upper <= 1e-12 * upper {
        lower = upper;
    }
    Ok(AtomicBounds { lower, upper, expansion_upper, enumerated_upper, expansion_steps: run.trace.steps.len() })
}

// l_1 norm of a least-squares representation of r, refined once on its remainder
fn representation_l1(r: &[f64], cols: &[&[f64]]) -> f64 {
    if norm2(r) == 0.0 {
        return 0.0;
    }
    let first = least_squares(cols, r);
    let second = least_squares(cols, &first.residual);
    norm1(&first.coefficients) + norm1(&second.coefficients)
}

/// The atomic norm by support enumeration: the minimum `l_1` norm over all
/// exact representations supported on `rank(D)` independent atoms, which
/// includes every basic optimal solution of the `l_1` program.
pub fn exact_atomic_norm(x: &[f64], dict: &Dictionary, budget: u128) -> Result<f64> {
    crate::error::check_dim(dict.dim(), x.len())?;
    let cols: Vec<&[f64]> = dict.atoms().iter().map(|a| a.as_slice()).collect();
    let ls = least_squares(&cols, x);
    if ls.residual_norm > 1e-8 * norm2(x).max(1.0) {
        return Err(Error::OutsideSpan { residual: ls.residual_norm });
    }
    let required = binomial(cols.len(), ls.rank);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    Ok(exact_atomic_norm_within(x, &cols, ls.rank, budget).unwrap_or(f64::INFINITY))
}

fn exact_atomic_norm_within(x: &[f64], cols: &[&[f64]], rank: usize, budget: u128) -> Option<f64> {
    if norm2(x) == 0.0 {
        return Some(0.0);
    }
    if binomial(cols.len(), rank) > budget {
        return None;
    }
    let scale = norm2(x);
    let mut best = f64::INFINITY;
    for subset in Combinations::new(cols.len(), rank) {
        let sub: Vec<&[f64]> = subset.iter().map(|&j| cols[j]).collect();
        let ls = least_squares(&sub, x);
        if ls.rank == rank && ls.residual_norm <= 1e-10 * scale {
            best = best.min(norm1(&ls.coefficients));
        }
    }
    best.is_finite().then_some(best)
}

fn dual_lower_bound(x: &[f64], dict: &Dictionary, cfg: &AtomicConfig, rank: usize) -> f64 {
    let atoms = dict.atoms();
    let d = dict.dim();
    let ratio = |f: &[f64]| {
        let m = max_pairing(f, atoms);
        if m > 0.0 {
            dot(f, x).abs() / m
        } else {
            0.0
        }
    };
    let mut best: f64 = 0.0;
    if let Ok(f) = dict.space().norming_functional(x) {
        best = best.max(ratio(f.coords()));
    }
    best = best.max(ratio(x));
    for f in &cfg.covectors {
        if f.len() == d {
            best = best.max(ratio(f));
        }
    }
    let mut rng = sampling::substream(cfg.seed, 0xA70_u64);
    for _ in 0..cfg.n_covectors {
        best = best.max(ratio(&sampling::unit_sphere(&mut rng, d)));
    }
    // vertices of the polar polytope {F : |F(g)| <= 1}
    if rank == d && d <= 16 {
        let systems = binomial(atoms.len(), d).saturating_mul(1u128 << (d - 1));
        if systems <= cfg.enumeration_budget {
            for subset in Combinations::new(atoms.len(), d) {
                let mut basis = OrthoBasis::new(d);
                if !subset.iter().all(|&j| basis.push(j, &atoms[j])) {
                    continue;
                }
                let a: Vec<f64> = subset.iter().flat_map(|&j| atoms[j].iter().copied()).collect();
                for signs in 0..(1usize << (d - 1)) {
                    let rhs: Vec<f64> =
                        (0..d).map(|i| if i > 0 && signs >> (i - 1) & 1 == 1 { -1.0 } else { 1.0 }).collect();
                    if let Some(f) = solve_linear(&a, &rhs) {
                        best = best.max(ratio(&f));
                    }
                }
            }
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct R1BetaReport {
    pub r1_lower: f64,
    pub r1_upper: f64,
    pub beta_lower: f64,
    pub beta_upper: f64,
    /// `[r1_lower * beta_lower, r1_upper * beta_upper]`.
    pub product_lower: f64,
    pub product_upper: f64,
    /// `[r1_lower, r1_upper]` meets `[1 / beta_upper, 1 / beta_lower]`.
    pub brackets_intersect: bool,
    pub contains_one: bool,
    /// Covering radius of the grid used for the certified `R_1` upper bound.
    pub grid_radius: f64,
    pub points_evaluated: usize,
}

impl R1BetaReport {
    pub fn product_width(&self) -> f64 {
        self.product_upper - self.product_lower
    }
}

/// Brackets `R_1(D)` and `beta(D)` independently in `l_2^2` or `l_2^3`.
///
/// `R_1` is bounded above on a sphere grid of covering radius `delta`: any
/// unit `x` is `x_k + e` with `||e|| <= delta`, so
/// `R_1 <= max_k upper(x_k) + delta R_1`, i.e. `R_1 <= max_k upper(x_k) / (1 - delta)`.
/// The lower end is the largest dual lower bound seen over the grid, the
/// `beta` witness and `n_samples` random unit vectors.
pub fn check_r1_beta(dict: &Dictionary, n_samples: usize, seed: u64, r1_resolution: usize) -> Result<R1BetaReport> {
    let d = dict.dim();
    let beta_res = match d {
        2 => 100_000,
        3 => 600,
        _ => return Err(Error::Unsupported(alloc::format!("R_1 bracket is implemented for d in {{2, 3}}, got {d}"))),
    };
    let beta = beta_bruteforce(dict, beta_res)?;
    let beta_lo = beta.lower.unwrap_or(0.0);
    if beta_lo <= 0.0 {
        return Err(Error::Precondition("beta is not certified positive: the atoms may not span".into()));
    }
    let witness = beta.witness.clone().unwrap_or_default();
    let cfg = AtomicConfig { beta_lower: Some(beta_lo), covectors: vec![witness.clone()], seed, ..AtomicConfig::default() };

    let (grid, delta) = sphere_grid(d, r1_resolution);
    if delta >= 1.0 {
        return Err(invalid("r1_resolution", "grid too coarse for a finite R_1 bound"));
    }
    let mut up: f64 = 0.0;
    let mut lo: f64 = 0.0;
    for x in &grid {
        let b = atomic_norm_bounds(x, dict, &cfg)?;
        up = up.max(b.upper);
        lo = lo.max(b.lower);
    }
    let mut rng = sampling::substream(seed, 0x51_u64);
    let mut extra = vec![witness];
    for _ in 0..n_samples {
        extra.push(sampling::unit_sphere(&mut rng, d));
    }
    for x in &extra {
        if x.len() == d && norm2(x) > 0.0 {
            lo = lo.max(atomic_norm_bounds(x, dict, &cfg)?.lower);
        }
    }
    let r1_upper = up / (1.0 - delta);
    let (product_lower, product_upper) = (lo * beta_lo, r1_upper * beta.upper);
    Ok(R1BetaReport {
        r1_lower: lo,
        r1_upper,
        beta_lower: beta_lo,
        beta_upper: beta.upper,
        product_lower,
        product_upper,
        brackets_intersect: lo <= 1.0 / beta_lo && r1_upper >= 1.0 / beta.upper,
        contains_one: product_lower <= 1.0 && 1.0 <= product_upper,
        grid_radius: delta,
        points_evaluated: grid.len() + extra.len(),
    })
}

// unit vectors up to sign with covering radius delta (same grids as the beta oracle)
fn sphere_grid(d: usize, res: usize) -> (Vec<Vec<f64>>, f64) {
    let res = res.max(1);
    if d == 2 {
        let pts = (0..res)
            .map(|k| {
                let a = core::f64::consts::PI * k as f64 / res as f64;
                vec![libm::cos(a), libm::sin(a)]
            })
            .collect();
        (pts, 2.0 * libm::sin(core::f64::consts::PI / (4.0 * res as f64)))
    } else {
        let mut pts = Vec::new();
        for face in 0..3 {
            for i in 0..=res {
                for j in 0..=res {
                    let mut f = [0.0; 3];
                    f[face] = 1.0;
                    f[(face + 1) % 3] = -1.0 + 2.0 * i as f64 / res as f64;
                    f[(face + 2) % 3] = -1.0 + 2.0 * j as f64 / res as f64;
                    let n = norm2(&f);
                    pts.push(f.iter().map(|v| v / n).collect());
                }
            }
        }
        (pts, core::f64::consts::SQRT_2 / res as f64)
    }
}
