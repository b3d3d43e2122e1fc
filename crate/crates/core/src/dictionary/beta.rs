//! The parameter `beta(D, X) = min_{||F|| = 1} max_{g in D} |F(g)|`.
//!
//! For `l_2^d` with `d <= 3` a deterministic grid on the sphere gives a
//! certified bracket: `F -> max_g |F(g)|` is 1-Lipschitz because every
//! `||g|| <= 1`, so the grid minimum minus the grid covering radius is a
//! lower bound. Larger `d` only gets a multistart upper bound.

use alloc::vec;
use alloc::vec::Vec;

use super::Dictionary;
use crate::error::{invalid, Error, Result};
use crate::linalg::{axpy, dot, norm2};
use crate::sampling;
use crate::spaces::SmoothSpace;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BetaMethod {
    BruteforceGrid,
    MultistartDescent,
    CanonicalExact,
}

impl BetaMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            BetaMethod::BruteforceGrid => "bruteforce_grid",
            BetaMethod::MultistartDescent => "multistart_descent",
            BetaMethod::CanonicalExact => "canonical_exact",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BetaEstimate {
    pub upper: f64,
    pub lower: Option<f64>,
    pub method: BetaMethod,
    /// Covering radius of the evaluation grid (the Lipschitz slack).
    pub grid_tol: Option<f64>,
    /// Unit functional attaining `upper`.
    pub witness: Option<Vec<f64>>,
}

/// Largest absolute pairing of `f` with an atom.
pub(crate) fn max_pairing(f: &[f64], atoms: &[Vec<f64>]) -> f64 {
    atoms.iter().fold(0.0, |m, g| m.max(dot(f, g).abs()))
}

/// Grid resolution giving covering radius at most `tol` in [`beta_bruteforce`].
pub fn grid_resolution_for(d: usize, tol: f64) -> Result<usize> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(invalid("tol", "grid tolerance must lie in (0, 1)"));
    }
    match d {
        2 => Ok(libm::ceil(core::f64::consts::PI / (4.0 * libm::asin(tol / 2.0))) as usize),
        3 => Ok(libm::ceil(core::f64::consts::SQRT_2 / tol) as usize),
        _ => Err(Error::Unsupported(alloc::format!("grid beta is implemented for d in {{2, 3}}, got {d}"))),
    }
}

/// Certified grid bracket for `l_2^2` and `l_2^3`.
///
/// `d = 2`: `resolution` angles `pi k / n` on the half circle, covering
/// radius `2 sin(pi / 4n)`. `d = 3`: the faces `x_i = 1` of the cube split
/// into `resolution^2` cells and projected radially (which is 1-Lipschitz
/// outside the ball), covering radius `sqrt(2) / resolution`. Antipodal
/// functionals give the same value, so half the sphere suffices.
pub fn beta_bruteforce(dict: &Dictionary, resolution: usize) -> Result<BetaEstimate> {
    if !dict.space().is_euclidean() {
        return Err(Error::Unsupported("grid beta requires the l_2 ambient norm".into()));
    }
    if resolution == 0 {
        return Err(invalid("resolution", "must be positive"));
    }
    let atoms = dict.atoms();
    let mut best = f64::INFINITY;
    let mut witness = Vec::new();
    let slack = match dict.dim() {
        2 => {
            let n = resolution;
            for k in 0..n {
                let a = core::f64::consts::PI * k as f64 / n as f64;
                let f = [libm::cos(a), libm::sin(a)];
                let v = atoms.iter().fold(0.0f64, |m, g| m.max((f[0] * g[0] + f[1] * g[1]).abs()));
                if v < best {
                    best = v;
                    witness = f.to_vec();
                }
            }
            2.0 * libm::sin(core::f64::consts::PI / (4.0 * n as f64))
        }
        3 => {
            let k = resolution;
            let mut f = [0.0; 3];
            for face in 0..3 {
                for i in 0..=k {
                    let u = -1.0 + 2.0 * i as f64 / k as f64;
                    for j in 0..=k {
                        let v = -1.0 + 2.0 * j as f64 / k as f64;
                        let (a, b) = ((face + 1) % 3, (face + 2) % 3);
                        f[face] = 1.0;
                        f[a] = u;
                        f[b] = v;
                        let inv = 1.0 / libm::sqrt(1.0 + u * u + v * v);
                        let val = atoms
                            .iter()
                            .fold(0.0f64, |m, g| m.max((f[0] * g[0] + f[1] * g[1] + f[2] * g[2]).abs()))
                            * inv;
                        if val < best {
                            best = val;
                            witness = f.iter().map(|x| x * inv).collect();
                        }
                    }
                }
            }
            core::f64::consts::SQRT_2 / k as f64
        }
        d => return Err(Error::Unsupported(alloc::format!("grid beta is implemented for d in {{2, 3}}, got {d}"))),
    };
    Ok(BetaEstimate {
        upper: best,
        lower: Some((best - slack).max(0.0)),
        method: BetaMethod::BruteforceGrid,
        grid_tol: Some(slack),
        witness: Some(witness),
    })
}

/// Exact `beta` of the canonical basis of `l_p^d`: `d^{-1/p'}` (`d^{-1/2}` in `l_2`).
pub fn beta_canonical(space: &SmoothSpace) -> BetaEstimate {
    let d = space.dim();
    let v = libm::pow(d as f64, -1.0 / space.dual_exponent());
    BetaEstimate {
        upper: v,
        lower: Some(v),
        method: BetaMethod::CanonicalExact,
        grid_tol: None,
        witness: Some(vec![v; d]),
    }
}

/// Multistart upper bound on `beta` in `l_2^d`.
///
/// Each restart runs projected subgradient steps on the sphere, then
/// minimizes the soft maximum `tau^{-1} log sum_g 2 cosh(tau F(g))` along a
/// continuation in `tau` with Riemannian gradient steps. The true maximum is
/// tracked at every visited point, so the result is always a feasible value.
pub fn beta_upper(dict: &Dictionary, restarts: usize, seed: u64) -> Result<BetaEstimate> {
    if !dict.space().is_euclidean() {
        return Err(Error::Unsupported("beta estimation is implemented for the l_2 ambient norm only".into()));
    }
    let d = dict.dim();
    let atoms = dict.atoms();
    let mut best = f64::INFINITY;
    let mut witness = vec![0.0; d];
    for r in 0..restarts.max(1) {
        let mut rng = sampling::substream(seed, r as u64);
        let mut f = sampling::unit_sphere(&mut rng, d);
        let (v, w) = descend(&mut f, atoms);
        if v < best {
            best = v;
            witness = w;
        }
    }
    Ok(BetaEstimate {
        upper: best,
        lower: None,
        method: BetaMethod::MultistartDescent,
        grid_tol: None,
        witness: Some(witness),
    })
}

fn normalize(f: &mut [f64]) {
    let n = norm2(f);
    for x in f.iter_mut() {
        *x /= n;
    }
}

fn descend(f: &mut Vec<f64>, atoms: &[Vec<f64>]) -> (f64, Vec<f64>) {
    let d = f.len();
    let mut best = max_pairing(f, atoms);
    let mut best_f = f.clone();

    // subgradient phase
    for k in 0..200 {
        let (mut jmax, mut vmax) = (0, -1.0);
        for (j, g) in atoms.iter().enumerate() {
            let v = dot(f, g).abs();
            if v > vmax {
                jmax = j;
                vmax = v;
            }
        }
        let s = dot(f, &atoms[jmax]).signum();
        axpy(-s * 0.3 / libm::sqrt(k as f64 + 1.0), &atoms[jmax], f);
        if norm2(f) == 0.0 {
            break;
        }
        normalize(f);
        let v = max_pairing(f, atoms);
        if v < best {
            best = v;
            best_f.clone_from(f);
        }
    }
    f.clone_from(&best_f);

    // soft-max continuation
    let mut grad = vec![0.0; d];
    let mut trial = vec![0.0; d];
    let mut trial_grad = vec![0.0; d];
    let mut tau = 10.0;
    while tau <= 1.0e5 * 1.0001 {
        let mut val = soft_max(f, atoms, tau, &mut grad);
        project_tangent(&mut grad, f);
        let mut step = 1.0 / tau;
        for _ in 0..400 {
            let gn2 = dot(&grad, &grad);
            if gn2 < 1e-24 {
                break;
            }
            let mut accepted = false;
            for _ in 0..40 {
                for i in 0..d {
                    trial[i] = f[i] - step * grad[i];
                }
                normalize(&mut trial);
                let tv = soft_max(&trial, atoms, tau, &mut trial_grad);
                if tv <= val - 1e-4 * step * gn2 {
                    core::mem::swap(f, &mut trial);
                    core::mem::swap(&mut grad, &mut trial_grad);
                    project_tangent(&mut grad, f);
                    let improvement = val - tv;
                    val = tv;
                    accepted = true;
                    step *= 2.0;
                    if improvement < 1e-15 * val.abs().max(1e-300) {
                        accepted = false;
                    }
                    break;
                }
                step *= 0.5;
            }
            let v = max_pairing(f, atoms);
            if v < best {
                best = v;
                best_f.clone_from(f);
            }
            if !accepted {
                break;
            }
        }
        tau *= libm::sqrt(10.0);
    }
    (best, best_f)
}

// value and Euclidean gradient of tau^{-1} log sum_g (e^{tau F(g)} + e^{-tau F(g)})
fn soft_max(f: &[f64], atoms: &[Vec<f64>], tau: f64, grad: &mut [f64]) -> f64 {
    let pairs: Vec<f64> = atoms.iter().map(|g| dot(f, g)).collect();
    let m = pairs.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    let mut s = 0.0;
    for g in grad.iter_mut() {
        *g = 0.0;
    }
    for (a, g) in pairs.iter().zip(atoms) {
        let ep = libm::exp(tau * (a - m));
        let em = libm::exp(tau * (-a - m));
        s += ep + em;
        axpy(ep - em, g, grad);
    }
    for g in grad.iter_mut() {
        *g /= s;
    }
    m + libm::log(s) / tau
}

fn project_tangent(g: &mut [f64], f: &[f64]) {
    let c = dot(g, f);
    axpy(-c, f, g);
}

/// `(2 (a ln d + ln 2) / d)^{1/2}`: an upper bound on `beta` over
/// dictionaries of cardinality at most `d^a`. It is at least 1, hence
/// vacuous, for small `d`.
pub fn beta_cardinality_bound(d: usize, a: f64) -> Result<f64> {
    if !(a >= 1.0) {
        return Err(invalid("a", "exponent must satisfy a >= 1"));
    }
    if d < 2 {
        return Err(invalid("d", "dimension must be at least 2"));
    }
    let df = d as f64;
    Ok(libm::sqrt(2.0 * (a * libm::log(df) + core::f64::consts::LN_2) / df))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn e2() -> SmoothSpace {
        SmoothSpace::euclidean(2)
    }

    // beta in the plane from the largest angular gap between the directions of D^+-
    fn planar_gap_oracle(atoms: &[Vec<f64>]) -> f64 {
        let mut angles: Vec<f64> = atoms
            .iter()
            .flat_map(|g| {
                let a = libm::atan2(g[1], g[0]);
                [a, a + core::f64::consts::PI]
            })
            .map(|a| a.rem_euclid(2.0 * core::f64::consts::PI))
            .collect();
        angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut gap: f64 = angles[0] + 2.0 * core::f64::consts::PI - angles[angles.len() - 1];
        for w in angles.windows(2) {
            gap = gap.max(w[1] - w[0]);
        }
        libm::cos(gap / 2.0)
    }

    #[test]
    fn canonical_plane() {
        let b = beta_bruteforce(&Dictionary::canonical(e2()), 1_000_000).unwrap();
        let exact = core::f64::consts::FRAC_1_SQRT_2;
        assert!(b.lower.unwrap() <= exact && exact <= b.upper);
        assert!(b.upper - exact < 1e-4);
        assert!(b.grid_tol.unwrap() < 1e-5);
    }

    #[test]
    fn canonical_space() {
        let k = grid_resolution_for(3, 1e-3).unwrap();
        let b = beta_bruteforce(&Dictionary::canonical(SmoothSpace::euclidean(3)), k).unwrap();
        let exact = 1.0 / libm::sqrt(3.0);
        assert!(b.lower.unwrap() <= exact + 1e-15 && exact <= b.upper + 1e-15);
        assert!(b.upper - exact < 1e-3);
    }

    #[test]
    fn three_equiangular_atoms() {
        let d = Dictionary::equiangular_2d(3).unwrap();
        let b = beta_bruteforce(&d, 1_000_000).unwrap();
        let exact = libm::cos(core::f64::consts::PI / 6.0);
        assert!((b.upper - exact).abs() <= b.grid_tol.unwrap() + 1e-12);
        assert!((planar_gap_oracle(d.atoms()) - exact).abs() < 1e-12);
    }

    #[test]
    fn grid_agrees_with_gap_oracle() {
        for seed in 0..10 {
            let d = Dictionary::random_sphere(e2(), 2 + seed as usize, seed).unwrap();
            let b = beta_bruteforce(&d, 100_000).unwrap();
            let exact = planar_gap_oracle(d.atoms());
            assert!(b.lower.unwrap() <= exact + 1e-12 && exact <= b.upper + 1e-12, "seed {seed}");
        }
    }

    #[test]
    fn dense_circle_has_beta_near_one() {
        let d = Dictionary::random_sphere(e2(), 1000, 7).unwrap();
        assert!(beta_bruteforce(&d, 100_000).unwrap().lower.unwrap() >= 0.99);
    }

    #[test]
    fn grid_rejects_unsupported_inputs() {
        let d4 = Dictionary::canonical(SmoothSpace::euclidean(4));
        assert!(matches!(beta_bruteforce(&d4, 10), Err(Error::Unsupported(_))));
        let l3 = Dictionary::canonical(SmoothSpace::lp(2, 3.0).unwrap());
        assert!(matches!(beta_bruteforce(&l3, 10), Err(Error::Unsupported(_))));
    }

    #[test]
    fn multistart_on_canonical_bases() {
        for d in [4usize, 16] {
            let b = beta_upper(&Dictionary::canonical(SmoothSpace::euclidean(d)), 16, 1).unwrap();
            let exact = 1.0 / libm::sqrt(d as f64);
            assert!(b.upper >= exact - 1e-12 && b.upper <= exact + 1e-3, "d={d}: {}", b.upper);
        }
    }

    #[test]
    fn multistart_single_atom_is_zero() {
        let d = Dictionary::new(e2(), vec![vec![1.0, 0.0]], "e1").unwrap();
        assert!(beta_upper(&d, 4, 0).unwrap().upper < 1e-9);
    }

    #[test]
    fn multistart_matches_grid_in_three_dimensions() {
        let d = Dictionary::random_sphere(SmoothSpace::euclidean(3), 7, 9).unwrap();
        let g = beta_bruteforce(&d, 400).unwrap();
        let m = beta_upper(&d, 32, 9).unwrap();
        let tol = g.grid_tol.unwrap();
        assert!((m.upper - g.upper).abs() <= 2.0 * tol, "{} vs {}", m.upper, g.upper);
        assert!(m.upper >= g.lower.unwrap());
    }

    #[test]
    fn symmetrization_leaves_beta_unchanged() {
        let d = Dictionary::random_sphere(e2(), 5, 4).unwrap();
        let a = beta_bruteforce(&d, 10_000).unwrap();
        let b = beta_bruteforce(&d.symmetrized(), 10_000).unwrap();
        assert_eq!(a.upper, b.upper);
    }

    #[test]
    fn canonical_exact_values() {
        let b = beta_canonical(&SmoothSpace::euclidean(16));
        assert_eq!(b.upper, 0.25);
        let b3 = beta_canonical(&SmoothSpace::lp(8, 3.0).unwrap());
        assert!((b3.upper - libm::pow(8.0, -2.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn cardinality_bound_values() {
        assert!((beta_cardinality_bound(2, 1.0).unwrap() - libm::sqrt(2.0 * core::f64::consts::LN_2)).abs() < 1e-15);
        // (2 (2 ln 10^4 + ln 2) / 10^4)^{1/2} = 0.0618285...
        let v = beta_cardinality_bound(10_000, 2.0).unwrap();
        assert!((v - 0.061_828_517_57).abs() < 1e-10, "{v}");
        // vacuous at d = 3 for a = 2, 3
        assert!(beta_cardinality_bound(3, 2.0).unwrap() > 1.0);
        assert!(beta_cardinality_bound(1 << 30, 2.0).unwrap() < 1e-3);
        assert!(beta_cardinality_bound(3, 0.5).is_err());
    }
}
