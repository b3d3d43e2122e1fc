//! Dictionaries: finite sets of atoms `g^1, .., g^N` in `R^d` with
//! `||g^j|| <= 1` in the ambient norm.
//!
//! Algorithms always work with the symmetrized dictionary `D^+- = {+-g}`;
//! only the `N` columns are stored.

mod atomic;
mod beta;
mod covering;

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_dim, invalid, Error, Result};
use crate::linalg::{dot, norm2};
use crate::sampling;
use crate::spaces::SmoothSpace;

pub use atomic::{atomic_norm_bounds, check_r1_beta, exact_atomic_norm, AtomicBounds, AtomicConfig, R1BetaReport};
pub use beta::{
    beta_bruteforce, beta_canonical, beta_cardinality_bound, beta_upper, grid_resolution_for, BetaEstimate,
    BetaMethod,
};
pub use covering::{
    covering_from_beta, dictionary_from_covering, equispaced_circle_covering, min_circle_centers, verify_covering,
    CoverTarget, CoveringReport, CoveringSpec, BetaCovering, BETA_COVERING_CAP,
};

/// Slack allowed on `||g|| <= 1` for atoms produced by normalization.
pub const NORM_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Dictionary {
    space: SmoothSpace,
    atoms: Vec<Vec<f64>>,
    label: String,
    beta_claim: Option<f64>,
}

impl Dictionary {
    /// Builds a dictionary from columns, checking dimensions and
    /// `||g^j|| <= 1 + NORM_SLACK`.
    pub fn new(space: SmoothSpace, atoms: Vec<Vec<f64>>, label: impl Into<String>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(invalid("atoms", "a dictionary needs at least one atom"));
        }
        for (j, a) in atoms.iter().enumerate() {
            check_dim(space.dim(), a.len())?;
            if a.iter().any(|v| !v.is_finite()) {
                return Err(invalid("atoms", alloc::format!("column {j} has a non-finite entry")));
            }
            let n = space.norm_of(a);
            if n > 1.0 + NORM_SLACK {
                return Err(Error::NormExceeded { index: j, norm: n });
            }
        }
        Ok(Self { space, atoms, label: label.into(), beta_claim: None })
    }

    /// Canonical basis `e^1, .., e^d`.
    pub fn canonical(space: SmoothSpace) -> Self {
        let d = space.dim();
        let atoms = (0..d)
            .map(|j| {
                let mut e = vec![0.0; d];
                e[j] = 1.0;
                e
            })
            .collect();
        Self { space, atoms, label: "canonical".to_string(), beta_claim: None }
    }

    /// `n` Gaussian directions normalized onto the unit sphere of the ambient
    /// norm (uniform on the sphere for `p = 2`).
    pub fn random_sphere(space: SmoothSpace, n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "a dictionary needs at least one atom"));
        }
        let mut rng = sampling::seeded(seed);
        let atoms = (0..n).map(|_| space.random_unit(&mut rng)).collect();
        Ok(Self { space, atoms, label: alloc::format!("random-sphere(seed={seed})"), beta_claim: None })
    }

    /// `n` unit atoms of `l_2^2` at angles `k pi / n`, `k = 0..n`; `D^+-` is
    /// then `2n` equally spaced directions.
    pub fn equiangular_2d(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "a dictionary needs at least one atom"));
        }
        let atoms = (0..n)
            .map(|k| {
                let a = core::f64::consts::PI * k as f64 / n as f64;
                vec![libm::cos(a), libm::sin(a)]
            })
            .collect();
        Ok(Self { space: SmoothSpace::euclidean(2), atoms, label: alloc::format!("equiangular({n})"), beta_claim: None })
    }

    /// Sequential rejection packing in `l_2^d`: random unit vectors are kept
    /// when `|<candidate, kept>| <= mu` for every kept atom, until
    /// `n_target` atoms are kept or `max_attempts` candidates were drawn.
    pub fn incoherent(d: usize, n_target: usize, mu: f64, max_attempts: usize, seed: u64) -> Result<(Self, PackingReport)> {
        if d == 0 {
            return Err(invalid("d", "dimension must be positive"));
        }
        if !(mu > 0.0 && mu < 1.0) {
            return Err(invalid("mu", "coherence target must lie in (0, 1)"));
        }
        if n_target == 0 {
            return Err(invalid("n", "a dictionary needs at least one atom"));
        }
        let mut rng = sampling::seeded(seed);
        let mut atoms: Vec<Vec<f64>> = Vec::with_capacity(n_target);
        let mut attempts = 0;
        while atoms.len() < n_target && attempts < max_attempts.max(1) {
            attempts += 1;
            let c = sampling::unit_sphere(&mut rng, d);
            if atoms.iter().all(|a| dot(a, &c).abs() <= mu) {
                atoms.push(c);
            }
        }
        let report = PackingReport { target: n_target, achieved: atoms.len(), attempts, refinement_steps: 0, mu };
        let dict = Self {
            space: SmoothSpace::euclidean(d),
            atoms,
            label: alloc::format!("incoherent(mu={mu},seed={seed})"),
            beta_claim: None,
        };
        Ok((dict, report))
    }

    /// Rejection packing with `100 N` draws; if it falls short, the missing
    /// atoms are drawn at random and all atoms are refined by projected
    /// gradient steps on `sum_{i != j} (|<g_i, g_j>| - 0.97 mu)_+^2 / 2` over
    /// the sphere, at most `max_steps` times. Atoms of the worst pairs are
    /// dropped until the coherence is at most `mu`.
    pub fn incoherent_refined(d: usize, n_target: usize, mu: f64, max_steps: usize, seed: u64) -> Result<(Self, PackingReport)> {
        let (start, mut report) = Self::incoherent(d, n_target, mu, 100 * n_target, seed)?;
        if report.achieved == n_target {
            return Ok((start, report));
        }
        let mut rng = sampling::substream(seed, 1);
        let mut g = start.atoms;
        while g.len() < n_target {
            g.push(sampling::unit_sphere(&mut rng, d));
        }
        let target = 0.97 * mu;
        let n = g.len();
        let mut steps = 0;
        while steps < max_steps {
            let mut worst: f64 = 0.0;
            let mut grad = vec![vec![0.0; d]; n];
            for i in 0..n {
                for j in (i + 1)..n {
                    let c = dot(&g[i], &g[j]);
                    worst = worst.max(c.abs());
                    let excess = c.abs() - target;
                    if excess > 0.0 {
                        let w = excess * c.signum();
                        crate::linalg::axpy(w, &g[j], &mut grad[i]);
                        crate::linalg::axpy(w, &g[i], &mut grad[j]);
                    }
                }
            }
            if worst <= target {
                break;
            }
            for (a, da) in g.iter_mut().zip(&grad) {
                crate::linalg::axpy(-0.5, da, a);
                let s = norm2(a);
                a.iter_mut().for_each(|v| *v /= s);
            }
            steps += 1;
        }
        // drop an atom of the worst pair until the bound holds
        loop {
            let mut worst = (0.0, 0usize);
            for i in 0..g.len() {
                for j in (i + 1)..g.len() {
                    let c = dot(&g[i], &g[j]).abs();
                    if c > worst.0 {
                        worst = (c, j);
                    }
                }
            }
            if worst.0 <= mu {
                break;
            }
            g.remove(worst.1);
        }
        report.achieved = g.len();
        report.refinement_steps = steps;
        let dict = Self {
            space: SmoothSpace::euclidean(d),
            atoms: g,
            label: alloc::format!("incoherent-refined(mu={mu},seed={seed})"),
            beta_claim: None,
        };
        Ok((dict, report))
    }

    pub fn space(&self) -> &SmoothSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Number of stored columns `N` (half the size of `D^+-`).
    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atom(&self, j: usize) -> &[f64] {
        &self.atoms[j]
    }

    pub fn atoms(&self) -> &[Vec<f64>] {
        &self.atoms
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Lower bound on `beta` claimed by the construction, if any.
    pub fn beta_claim(&self) -> Option<f64> {
        self.beta_claim
    }

    pub(crate) fn with_beta_claim(mut self, beta: f64) -> Self {
        self.beta_claim = Some(beta);
        self
    }

    /// Same atoms in another ambient norm; fails if some atom leaves the unit ball.
    pub fn with_space(self, space: SmoothSpace) -> Result<Self> {
        let label = self.label.clone();
        let claim = self.beta_claim;
        let mut d = Self::new(space, self.atoms, label)?;
        d.beta_claim = claim;
        Ok(d)
    }

    /// Copy with one more atom appended.
    pub fn extended(&self, atom: Vec<f64>) -> Result<Self> {
        let mut atoms = self.atoms.clone();
        atoms.push(atom);
        Self::new(self.space, atoms, self.label.clone())
    }

    /// The `2N` atoms of `D^+-`, `+g^j` then `-g^j` per column.
    pub fn symmetrized(&self) -> Self {
        let atoms = self.atoms.iter().flat_map(|a| [a.clone(), a.iter().map(|v| -v).collect()]).collect();
        Self { space: self.space, atoms, label: alloc::format!("{}+-", self.label), beta_claim: self.beta_claim }
    }

    /// Ambient norms of the columns.
    pub fn column_norms(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| self.space.norm_of(a)).collect()
    }

    /// `sum_j c_j g^j`.
    pub fn combine(&self, coefficients: &[f64]) -> Vec<f64> {
        debug_assert_eq!(coefficients.len(), self.len());
        let mut out = vec![0.0; self.dim()];
        for (c, a) in coefficients.iter().zip(&self.atoms) {
            if *c != 0.0 {
                crate::linalg::axpy(*c, a, &mut out);
            }
        }
        out
    }

    /// Mutual coherence `max_{k != l} |<g^k, g^l>|` of the `l_2`-normalized atoms.
    pub fn coherence(&self) -> Coherence {
        let mut renormalized = false;
        let normed: Vec<Vec<f64>> = self
            .atoms
            .iter()
            .map(|a| {
                let n = norm2(a);
                if (n - 1.0).abs() > NORM_SLACK {
                    renormalized = true;
                }
                if n == 0.0 {
                    a.clone()
                } else {
                    a.iter().map(|v| v / n).collect()
                }
            })
            .collect();
        let mut value: f64 = 0.0;
        for k in 0..normed.len() {
            for l in (k + 1)..normed.len() {
                value = value.max(dot(&normed[k], &normed[l]).abs());
            }
        }
        Coherence { value, renormalized }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coherence {
    pub value: f64,
    /// Some atom was not `l_2`-unit and was rescaled before the inner products.
    pub renormalized: bool,
}

/// Outcome of [`Dictionary::incoherent`] and [`Dictionary::incoherent_refined`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PackingReport {
    pub target: usize,
    pub achieved: usize,
    /// Random candidates drawn by the rejection phase.
    pub attempts: usize,
    /// Projected-gradient iterations of the refinement phase.
    pub refinement_steps: usize,
    pub mu: f64,
}

impl PackingReport {
    pub fn shortfall(&self) -> usize {
        self.target - self.achieved
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refined_packing_reaches_targets_beyond_rejection() {
        for (d, n, mu) in [(20, 40, 0.25), (8, 12, 0.3), (16, 64, 0.3)] {
            let (plain, _) = Dictionary::incoherent(d, n, mu, 20_000, 1).unwrap();
            let (dict, rep) = Dictionary::incoherent_refined(d, n, mu, 20_000, 1).unwrap();
            assert!(plain.len() < n, "rejection alone already succeeds at {d} {n} {mu}");
            assert_eq!((dict.len(), rep.shortfall()), (n, 0), "{rep:?}");
            assert!(dict.coherence().value <= mu);
            assert!(dict.column_norms().iter().all(|v| (v - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn canonical_columns() {
        let d = Dictionary::canonical(SmoothSpace::euclidean(2));
        assert_eq!(d.atoms(), &[vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert_eq!(Dictionary::canonical(SmoothSpace::euclidean(3)).len(), 3);
        assert_eq!(d.coherence(), Coherence { value: 0.0, renormalized: false });
    }

    #[test]
    fn random_sphere_is_normalized_and_deterministic() {
        let sp = SmoothSpace::euclidean(4);
        let a = Dictionary::random_sphere(sp, 16, 1).unwrap();
        for n in a.column_norms() {
            assert!((n - 1.0).abs() < 1e-12);
        }
        assert_eq!(a, Dictionary::random_sphere(sp, 16, 1).unwrap());
        let l3 = SmoothSpace::lp(5, 3.0).unwrap();
        for n in Dictionary::random_sphere(l3, 8, 2).unwrap().column_norms() {
            assert!((n - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_atoms_outside_unit_ball() {
        let sp = SmoothSpace::euclidean(2);
        let err = Dictionary::new(sp, vec![vec![1.0, 0.0], vec![1.2, 0.0]], "x").unwrap_err();
        assert!(matches!(err, Error::NormExceeded { index: 1, .. }));
        assert!(Dictionary::new(sp, vec![], "x").is_err());
        assert!(matches!(Dictionary::new(sp, vec![vec![1.0]], "x"), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn coherence_of_two_atoms() {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let d = Dictionary::new(SmoothSpace::euclidean(2), vec![vec![1.0, 0.0], vec![s, s]], "x").unwrap();
        assert!((d.coherence().value - s).abs() < 1e-15);
        let single = Dictionary::new(SmoothSpace::euclidean(2), vec![vec![0.5, 0.0]], "x").unwrap();
        assert_eq!(single.coherence(), Coherence { value: 0.0, renormalized: true });
    }

    #[test]
    fn coherence_matches_pair_loop() {
        let d = Dictionary::random_sphere(SmoothSpace::euclidean(16), 64, 5).unwrap();
        let mut pairs = 0;
        let mut best: f64 = 0.0;
        for i in 0..64 {
            for j in 0..64 {
                if i < j {
                    pairs += 1;
                    let mut s = 0.0;
                    for k in 0..16 {
                        s += d.atom(i)[k] * d.atom(j)[k];
                    }
                    best = best.max(s.abs());
                }
            }
        }
        assert_eq!(pairs, 2016);
        assert!((d.coherence().value - best).abs() < 1e-15);
    }

    #[test]
    fn incoherent_packing_respects_mu() {
        let (d, rep) = Dictionary::incoherent(8, 16, 0.5, 100_000, 3).unwrap();
        assert_eq!(rep.achieved, 16);
        assert!(d.coherence().value <= 0.5);
    }

    #[test]
    fn incoherent_packing_reports_shortfall() {
        // in the plane |cos| <= 0.01 leaves room for at most two directions
        let (d, rep) = Dictionary::incoherent(2, 10, 0.01, 20_000, 1).unwrap();
        assert!(rep.achieved <= 2 && rep.shortfall() >= 8);
        for i in 0..d.len() {
            for j in (i + 1)..d.len() {
                let ang = libm::acos(dot(d.atom(i), d.atom(j)).clamp(-1.0, 1.0));
                assert!((ang - core::f64::consts::FRAC_PI_2).abs() <= libm::asin(0.01) + 1e-12);
            }
        }
    }
}
