//! Duality between coverings of the sphere or ball and dictionaries with
//! large `beta`:
//!
//! * centers `x^j` covering `S^{d-1}` at radius `r` give atoms
//!   `x^j / ||x^j||` with `beta >= sqrt(1 - r^2)`;
//! * a dictionary with `beta <= 2^{-1/2}` gives the covering of the unit
//!   ball by balls of radius `sqrt(1 - beta^2)` around `+-beta g^j`.

use alloc::string::ToString;
use alloc::vec::Vec;

use super::Dictionary;
use crate::error::{invalid, Error, Result};
use crate::linalg::norm2;
use crate::sampling;
use crate::spaces::SmoothSpace;

/// Largest `beta` for which the ball covering by `+-beta g^j` is claimed.
pub const BETA_COVERING_CAP: f64 = core::f64::consts::FRAC_1_SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverTarget {
    UnitSphere,
    UnitBall,
}

impl CoverTarget {
    pub fn as_str(&self) -> &'static str {
        match self {
            CoverTarget::UnitSphere => "sphere",
            CoverTarget::UnitBall => "ball",
        }
    }
}

/// Balls `B(x^j, radius)` in `l_2^d` meant to cover the unit sphere or ball.
#[derive(Debug, Clone, PartialEq)]
pub struct CoveringSpec {
    d: usize,
    centers: Vec<Vec<f64>>,
    radius: f64,
    target: CoverTarget,
}

impl CoveringSpec {
    /// Requires `0 < radius <= 1` and `||x^j||_2 <= 1`.
    pub fn new(d: usize, centers: Vec<Vec<f64>>, radius: f64, target: CoverTarget) -> Result<Self> {
        if d == 0 {
            return Err(invalid("d", "dimension must be positive"));
        }
        if !(radius > 0.0 && radius <= 1.0) {
            return Err(invalid("radius", "must lie in (0, 1]"));
        }
        if centers.is_empty() {
            return Err(invalid("centers", "a covering needs at least one center"));
        }
        for (j, c) in centers.iter().enumerate() {
            crate::error::check_dim(d, c.len())?;
            let n = norm2(c);
            if n > 1.0 + super::NORM_SLACK {
                return Err(Error::NormExceeded { index: j, norm: n });
            }
        }
        Ok(Self { d, centers, radius, target })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn centers(&self) -> &[Vec<f64>] {
        &self.centers
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn target(&self) -> CoverTarget {
        self.target
    }

    /// Euclidean distance from `x` to the nearest center.
    pub fn distance(&self, x: &[f64]) -> f64 {
        self.centers
            .iter()
            .map(|c| {
                let s: f64 = c.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
                libm::sqrt(s)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Smallest number of equispaced centers on the unit circle whose balls of
/// radius `r` cover it: the midpoint of an arc of angle `2 pi / n` is at
/// chord distance `2 sin(pi / 2n)` from its endpoints.
pub fn min_circle_centers(r: f64) -> Result<usize> {
    if !(r > 0.0 && r < 2.0) {
        return Err(invalid("radius", "must lie in (0, 2)"));
    }
    Ok((libm::ceil(core::f64::consts::PI / (2.0 * libm::asin(r / 2.0))) as usize).max(1))
}

/// `n` centers at angles `2 pi k / n` on the unit circle with radius `r`,
/// targeting the sphere. Fails if they do not cover it.
pub fn equispaced_circle_covering(n: usize, r: f64) -> Result<CoveringSpec> {
    let need = min_circle_centers(r)?;
    if n < need {
        return Err(invalid("n", alloc::format!("{n} centers cannot cover the circle at radius {r}, need {need}")));
    }
    let centers = (0..n)
        .map(|k| {
            let a = 2.0 * core::f64::consts::PI * k as f64 / n as f64;
            alloc::vec![libm::cos(a), libm::sin(a)]
        })
        .collect();
    CoveringSpec::new(2, centers, r, CoverTarget::UnitSphere)
}

/// Normalized centers of a sphere covering, carrying the claim
/// `beta >= sqrt(1 - r^2)` (see [`Dictionary::beta_claim`]).
pub fn dictionary_from_covering(cov: &CoveringSpec) -> Result<Dictionary> {
    if cov.target != CoverTarget::UnitSphere {
        return Err(Error::Precondition("the dictionary construction needs a covering of the sphere".into()));
    }
    let mut atoms = Vec::with_capacity(cov.centers.len());
    for c in &cov.centers {
        let n = norm2(c);
        if n == 0.0 {
            return Err(Error::ZeroVector);
        }
        atoms.push(c.iter().map(|v| v / n).collect());
    }
    let claim = libm::sqrt((1.0 - cov.radius * cov.radius).max(0.0));
    Ok(Dictionary::new(SmoothSpace::euclidean(cov.d), atoms, "from-covering".to_string())?.with_beta_claim(claim))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BetaCovering {
    pub covering: CoveringSpec,
    /// `beta` used for the centers, after capping.
    pub beta: f64,
    /// The supplied bound exceeded [`BETA_COVERING_CAP`] and was lowered to it.
    pub capped: bool,
}

/// Ball covering with centers `+-beta g^j` and radius `sqrt(1 - beta^2)`
/// from a certified lower bound `beta_lower` on `beta(D)`.
///
/// A bound above `2^{-1/2}` is capped: a smaller valid lower bound still
/// satisfies the hypothesis, so the covering stays valid.
pub fn covering_from_beta(dict: &Dictionary, beta_lower: f64) -> Result<BetaCovering> {
    if !dict.space().is_euclidean() {
        return Err(Error::Unsupported("the ball covering is constructed in l_2 only".into()));
    }
    if !(beta_lower > 0.0 && beta_lower <= 1.0) {
        return Err(invalid("beta", "lower bound must lie in (0, 1]"));
    }
    let capped = beta_lower > BETA_COVERING_CAP;
    let beta = beta_lower.min(BETA_COVERING_CAP);
    let centers = dict
        .atoms()
        .iter()
        .flat_map(|g| [g.iter().map(|v| beta * v).collect(), g.iter().map(|v| -beta * v).collect()])
        .collect();
    let covering = CoveringSpec::new(dict.dim(), centers, libm::sqrt(1.0 - beta * beta), CoverTarget::UnitBall)?;
    Ok(BetaCovering { covering, beta, capped })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoveringReport {
    pub samples: usize,
    pub covered: usize,
    /// Largest sampled distance to the nearest center.
    pub worst_distance: f64,
    /// `worst_distance - radius`; positive when some sample is uncovered.
    pub worst_gap: f64,
    pub worst_point: Vec<f64>,
}

impl CoveringReport {
    pub fn fraction(&self) -> f64 {
        self.covered as f64 / self.samples.max(1) as f64
    }

    pub fn pass(&self) -> bool {
        self.covered == self.samples
    }
}

/// Monte-Carlo membership test on uniform samples of the target set, with a
/// `1e-12` tolerance on the radius.
pub fn verify_covering(cov: &CoveringSpec, n_samples: usize, seed: u64) -> CoveringReport {
    let mut rng = sampling::seeded(seed);
    let mut covered = 0;
    let mut worst = (f64::NEG_INFINITY, Vec::new());
    for _ in 0..n_samples {
        let x = match cov.target {
            CoverTarget::UnitSphere => sampling::unit_sphere(&mut rng, cov.d),
            CoverTarget::UnitBall => sampling::unit_ball(&mut rng, cov.d),
        };
        let dist = cov.distance(&x);
        if dist <= cov.radius + 1e-12 {
            covered += 1;
        }
        if dist > worst.0 {
            worst = (dist, x);
        }
    }
    CoveringReport {
        samples: n_samples,
        covered,
        worst_distance: worst.0,
        worst_gap: worst.0 - cov.radius,
        worst_point: worst.1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dictionary::{beta_bruteforce, beta_canonical};
    use alloc::vec;

    #[test]
    fn canonical_plane_ball_covering() {
        let d = Dictionary::canonical(SmoothSpace::euclidean(2));
        let l = covering_from_beta(&d, core::f64::consts::FRAC_1_SQRT_2).unwrap();
        assert!(!l.capped);
        let s = core::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(l.covering.centers().len(), 4);
        assert!(l.covering.centers().contains(&vec![s, 0.0]) && l.covering.centers().contains(&vec![-0.0, -s]));
        assert!((l.covering.radius() - s).abs() < 1e-15);
        assert!(verify_covering(&l.covering, 100_000, 1).pass());
    }

    #[test]
    fn radius_formula_and_cap() {
        let d = Dictionary::random_sphere(SmoothSpace::euclidean(3), 4, 1).unwrap();
        assert!((covering_from_beta(&d, 0.1).unwrap().covering.radius() - libm::sqrt(0.99)).abs() < 1e-15);
        let l = covering_from_beta(&d, 0.9).unwrap();
        assert!(l.capped && l.beta == BETA_COVERING_CAP);
        assert!(covering_from_beta(&d, 0.0).is_err());
    }

    #[test]
    fn trivial_and_failing_coverings() {
        let all = CoveringSpec::new(3, vec![vec![0.0; 3]], 1.0, CoverTarget::UnitBall).unwrap();
        assert!(verify_covering(&all, 10_000, 2).pass());
        let one = CoveringSpec::new(2, vec![vec![1.0, 0.0]], 0.5, CoverTarget::UnitSphere).unwrap();
        let rep = verify_covering(&one, 10_000, 3);
        assert!(!rep.pass() && rep.fraction() < 1.0 && rep.worst_gap > 0.0);
    }

    #[test]
    fn circle_covering_center_counts() {
        // 2 sin(pi / 14) = 0.445 <= 0.5 < 2 sin(pi / 12) = 0.518
        assert_eq!(min_circle_centers(0.5).unwrap(), 7);
        assert!(equispaced_circle_covering(6, 0.5).is_err());
        for (n, r) in [(7, 0.5), (13, 0.5), (min_circle_centers(0.3).unwrap(), 0.3)] {
            let c = equispaced_circle_covering(n, r).unwrap();
            assert!(verify_covering(&c, 20_000, n as u64).pass(), "n={n} r={r}");
        }
    }

    #[test]
    fn covering_dictionary_has_claimed_beta() {
        let cov = equispaced_circle_covering(13, 0.5).unwrap();
        let d = dictionary_from_covering(&cov).unwrap();
        let claim = d.beta_claim().unwrap();
        assert!((claim - libm::sqrt(0.75)).abs() < 1e-15);
        let b = beta_bruteforce(&d, 100_000).unwrap();
        assert!(b.lower.unwrap() >= claim);
    }

    #[test]
    fn canonical_centers_reproduce_canonical_beta() {
        for dim in [2usize, 3, 5] {
            let sp = SmoothSpace::euclidean(dim);
            let centers = Dictionary::canonical(sp).atoms().to_vec();
            let r = libm::sqrt(1.0 - 1.0 / dim as f64);
            let d = dictionary_from_covering(&CoveringSpec::new(dim, centers, r, CoverTarget::UnitSphere).unwrap()).unwrap();
            assert!((d.beta_claim().unwrap() - beta_canonical(&sp).upper).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_center_is_rejected() {
        let cov = CoveringSpec::new(2, vec![vec![0.0, 0.0]], 0.9, CoverTarget::UnitSphere).unwrap();
        assert_eq!(dictionary_from_covering(&cov), Err(Error::ZeroVector));
        let ball = CoveringSpec::new(2, vec![vec![1.0, 0.0]], 0.9, CoverTarget::UnitBall).unwrap();
        assert!(matches!(dictionary_from_covering(&ball), Err(Error::Precondition(_))));
    }
}
