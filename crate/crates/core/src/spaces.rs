//! Finite-dimensional `l_p` geometry: norms, norming (peak) functionals and
//! the modulus of smoothness.
//!
//! A [`SmoothSpace`] carries the exponent `p` together with a *declared*
//! power-type majorant `rho(u) <= gamma * u^q` of its modulus of smoothness.
//! The declaration is what the convergence guarantees consume; it is checked
//! empirically by [`estimate_modulus`] rather than trusted.

use alloc::vec::Vec;

use crate::error::{check_dim, invalid, Error, Result};
use crate::linalg::{self, linear_regression};
use crate::sampling;

/// `R^d` with the `l_p` norm, `1 < p < infinity`, and declared smoothness
/// `rho(u) <= gamma * u^q`, `1 < q <= 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothSpace {
    d: usize,
    p: f64,
    q: f64,
    gamma: f64,
}

impl SmoothSpace {
    /// Euclidean space `l_2^d` with `q = 2`, `gamma = 1/2`; `d` must be positive.
    pub fn euclidean(d: usize) -> Self {
        assert!(d > 0, "dimension must be positive");
        Self { d, p: 2.0, q: 2.0, gamma: 0.5 }
    }

    /// `l_p^d` with the default smoothness declaration: `q = p`, `gamma = 1/p`
    /// for `p <= 2` and `q = 2`, `gamma = (p - 1)/2` for `p >= 2`.
    pub fn lp(d: usize, p: f64) -> Result<Self> {
        if d == 0 {
            return Err(invalid("d", "dimension must be positive"));
        }
        if !(p.is_finite() && p > 1.0) {
            return Err(invalid("p", "exponent must satisfy 1 < p < inf (uniform smoothness)"));
        }
        if p == 2.0 {
            return Ok(Self::euclidean(d));
        }
        let (q, gamma) = if p < 2.0 { (p, 1.0 / p) } else { (2.0, (p - 1.0) / 2.0) };
        Ok(Self { d, p, q, gamma })
    }

    /// Replaces the declared smoothness majorant.
    pub fn with_smoothness(self, q: f64, gamma: f64) -> Result<Self> {
        if !(q > 1.0 && q <= 2.0) {
            return Err(invalid("q", "smoothness power must lie in (1, 2]"));
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(invalid("gamma", "must be positive and finite"));
        }
        if self.p == 2.0 && (q != 2.0 || gamma != 0.5) {
            return Err(invalid("gamma", "l_2 has rho(u) <= u^2/2; declare q = 2, gamma = 0.5"));
        }
        Ok(Self { q, gamma, ..self })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn is_euclidean(&self) -> bool {
        self.p == 2.0
    }

    /// Conjugate exponent `p' = p / (p - 1)`.
    pub fn dual_exponent(&self) -> f64 {
        self.p / (self.p - 1.0)
    }

    /// Declared majorant `gamma * u^q`.
    pub fn modulus_bound(&self, u: f64) -> f64 {
        self.gamma * libm::pow(u, self.q)
    }

    pub fn norm(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.d, x.len())?;
        Ok(self.norm_of(x))
    }

    /// Norm without the dimension check; `x.len()` must equal the dimension.
    pub fn norm_of(&self, x: &[f64]) -> f64 {
        lp_norm(x, self.p)
    }

    /// `l_{p'}` norm of a covector in coordinates.
    pub fn dual_norm(&self, f: &Covector) -> f64 {
        lp_norm(&f.0, self.dual_exponent())
    }

    /// Norming functional `F_x = sign(x) |x|^{p-1} / ||x||^{p-1}`, with
    /// `F_x(x) = ||x||` and `||F_x||_{p'} = 1`. In `l_2` this is `x / ||x||`.
    pub fn norming_functional(&self, x: &[f64]) -> Result<Covector> {
        check_dim(self.d, x.len())?;
        let n = self.norm_of(x);
        if n == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(self.norming_functional_with_norm(x, n))
    }

    pub(crate) fn norming_functional_with_norm(&self, x: &[f64], n: f64) -> Covector {
        if self.p == 2.0 {
            return Covector(x.iter().map(|v| v / n).collect());
        }
        let e = self.p - 1.0;
        Covector(x.iter().map(|&v| libm::copysign(libm::pow(v.abs() / n, e), v)).collect())
    }

    /// Central difference `(||x + u y|| - ||x - u y||) / (2u)`, which tends
    /// to `F_x(y)` as `u -> 0`.
    pub fn directional_derivative(&self, x: &[f64], y: &[f64], u: f64) -> Result<f64> {
        check_dim(self.d, x.len())?;
        check_dim(self.d, y.len())?;
        if !(u > 0.0) {
            return Err(invalid("u", "step must be positive"));
        }
        if self.norm_of(x) == 0.0 {
            return Err(Error::ZeroVector);
        }
        let plus: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + u * b).collect();
        let minus: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - u * b).collect();
        Ok((self.norm_of(&plus) - self.norm_of(&minus)) / (2.0 * u))
    }

    /// Uniform direction on the Euclidean sphere rescaled onto the unit
    /// sphere of this norm.
    pub fn random_unit(&self, rng: &mut sampling::Rng) -> Vec<f64> {
        let mut v = sampling::unit_sphere(rng, self.d);
        let n = self.norm_of(&v);
        for x in v.iter_mut() {
            *x /= n;
        }
        v
    }
}

fn lp_norm(x: &[f64], p: f64) -> f64 {
    if p == 2.0 {
        return linalg::norm2(x);
    }
    let m = linalg::norm_inf(x);
    if m == 0.0 || !m.is_finite() {
        return m;
    }
    let s: f64 = x.iter().map(|v| libm::pow(v.abs() / m, p)).sum();
    m * libm::pow(s, 1.0 / p)
}

/// Linear functional on `R^d` in coordinates, acting through the standard
/// pairing.
#[derive(Debug, Clone, PartialEq)]
pub struct Covector(pub Vec<f64>);

impl Covector {
    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn apply(&self, x: &[f64]) -> f64 {
        linalg::dot(&self.0, x)
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// One row of an empirical modulus table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulusPoint {
    pub u: f64,
    /// Empirical maximum of the symmetric second difference over the samples
    /// (`(||x+uy|| + ||x-uy||)/2 - 1` for a norm).
    pub rho: f64,
    /// Declared majorant `gamma u^q`.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModulusTable {
    pub points: Vec<ModulusPoint>,
}

impl ModulusTable {
    /// Whether the declared majorant dominates every row (slack `1e-12`).
    pub fn dominated(&self) -> bool {
        self.points.iter().all(|p| p.rho <= p.bound + 1e-12)
    }

    /// Slope of `log rho` against `log u` over rows with `u, rho > 0`.
    pub fn fitted_exponent(&self) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .points
            .iter()
            .filter(|p| p.u > 0.0 && p.rho > 0.0)
            .map(|p| (libm::log(p.u), libm::log(p.rho)))
            .collect();
        linear_regression(&pts).map(|(s, _, _)| s)
    }
}

/// Empirical modulus of smoothness on a grid of `u` values.
///
/// The same `n_samples` random unit pairs are used for every `u`; for
/// `d >= 2` the pairs `(e1, e2)` and `((e1+e2), (e1-e2))` (normalized), which
/// are extremal for `l_p`, are always included. `u = 0` yields 0.
pub fn estimate_modulus(sp: &SmoothSpace, u_grid: &[f64], n_samples: usize, seed: u64) -> Result<ModulusTable> {
    if n_samples == 0 {
        return Err(invalid("n_samples", "at least one sample pair required"));
    }
    if let Some(&u) = u_grid.iter().find(|u| !(**u >= 0.0 && u.is_finite())) {
        return Err(invalid("u", alloc::format!("grid value {u} is not a non-negative number")));
    }
    let d = sp.dim();
    let mut rng = sampling::seeded(seed);
    let mut pairs: Vec<(Vec<f64>, Vec<f64>)> = Vec::with_capacity(n_samples + 2);
    if d >= 2 {
        let mut e1 = alloc::vec![0.0; d];
        let mut e2 = alloc::vec![0.0; d];
        e1[0] = 1.0;
        e2[1] = 1.0;
        let s = sp.norm_of(&linalg::sub(&e1, &e2));
        let plus: Vec<f64> = e1.iter().zip(&e2).map(|(a, b)| (a + b) / s).collect();
        let minus: Vec<f64> = e1.iter().zip(&e2).map(|(a, b)| (a - b) / s).collect();
        pairs.push((e1, e2));
        pairs.push((plus, minus));
    }
    for _ in 0..n_samples {
        let x = sp.random_unit(&mut rng);
        let y = sp.random_unit(&mut rng);
        pairs.push((x, y));
    }
    let mut buf_p = alloc::vec![0.0; d];
    let mut buf_m = alloc::vec![0.0; d];
    let points = u_grid
        .iter()
        .map(|&u| {
            let rho = if u == 0.0 {
                0.0
            } else {
                pairs.iter().fold(f64::NEG_INFINITY, |best, (x, y)| {
                    for i in 0..d {
                        buf_p[i] = x[i] + u * y[i];
                        buf_m[i] = x[i] - u * y[i];
                    }
                    let nx = sp.norm_of(x);
                    let v = 0.5 * (sp.norm_of(&buf_p) + sp.norm_of(&buf_m)) - nx;
                    best.max(v)
                })
            };
            ModulusPoint { u, rho, bound: sp.modulus_bound(u) }
        })
        .collect();
    Ok(ModulusTable { points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn sp(d: usize, p: f64) -> SmoothSpace {
        SmoothSpace::lp(d, p).unwrap()
    }

    // independent scalar-loop oracle for the l_p norm
    fn norm_oracle(x: &[f64], p: f64) -> f64 {
        let mut s = 0.0;
        for v in x {
            s += libm::pow(libm::fabs(*v), p);
        }
        libm::pow(s, 1.0 / p)
    }

    #[test]
    fn norms() {
        assert_eq!(sp(2, 2.0).norm(&[3.0, 4.0]).unwrap(), 5.0);
        assert!((sp(9, 2.0).norm(&[1.0; 9]).unwrap() - 3.0).abs() < 1e-15);
        let v = sp(3, 3.0).norm(&[1.0, -2.0, 2.0]).unwrap();
        assert!((v - libm::cbrt(17.0)).abs() < 1e-14);
        assert!((v - norm_oracle(&[1.0, -2.0, 2.0], 3.0)).abs() < 1e-14);
        assert_eq!(sp(2, 2.0).norm(&[0.0, 0.0]).unwrap(), 0.0);
        assert!(matches!(sp(2, 2.0).norm(&[1.0]), Err(Error::DimensionMismatch { expected: 2, found: 1 })));
    }

    #[test]
    fn rejects_non_smooth_exponents() {
        assert!(SmoothSpace::lp(3, 1.0).is_err());
        assert!(SmoothSpace::lp(3, f64::INFINITY).is_err());
        assert!(SmoothSpace::lp(3, 0.5).is_err());
        assert!(sp(3, 3.0).with_smoothness(2.5, 1.0).is_err());
        assert!(sp(3, 2.0).with_smoothness(2.0, 0.4).is_err());
        let s = sp(3, 1.5);
        assert_eq!((s.q(), s.gamma()), (1.5, 1.0 / 1.5));
        let s = sp(3, 4.0);
        assert_eq!((s.q(), s.gamma()), (2.0, 1.5));
    }

    #[test]
    fn norming_functional_examples() {
        let f = sp(2, 2.0).norming_functional(&[3.0, 4.0]).unwrap();
        assert_eq!(f.coords(), &[0.6, 0.8]);
        for p in [1.3, 2.0, 4.0, 7.5] {
            let f = sp(4, p).norming_functional(&[1.0, 0.0, 0.0, 0.0]).unwrap();
            assert_eq!(f.coords(), &[1.0, 0.0, 0.0, 0.0]);
        }
        assert_eq!(sp(2, 2.0).norming_functional(&[0.0, 0.0]), Err(Error::ZeroVector));
    }

    #[test]
    fn norming_functional_is_derivative_of_norm() {
        // x = (1, 2) in l_4 against a central-difference oracle on u -> ||x + u y||
        let s = sp(2, 4.0);
        let x = [1.0, 2.0];
        let f = s.norming_functional(&x).unwrap();
        assert!((f.apply(&x) - s.norm(&x).unwrap()).abs() < 1e-12);
        assert!((s.dual_norm(&f) - 1.0).abs() < 1e-12);
        for y in [[1.0, 0.0], [0.0, 1.0], [0.3, -0.7]] {
            let h = 1e-5;
            let fd = (norm_oracle(&[x[0] + h * y[0], x[1] + h * y[1]], 4.0)
                - norm_oracle(&[x[0] - h * y[0], x[1] - h * y[1]], 4.0))
                / (2.0 * h);
            assert!((fd - f.apply(&y)).abs() <= 1e-6 * fd.abs().max(1e-3), "{fd} vs {}", f.apply(&y));
        }
    }

    #[test]
    fn directional_derivative_examples() {
        let s = sp(2, 2.0);
        assert!((s.directional_derivative(&[1.0, 0.0], &[1.0, 0.0], 1e-4).unwrap() - 1.0).abs() < 1e-8);
        assert!(s.directional_derivative(&[1.0, 0.0], &[0.0, 1.0], 1e-4).unwrap().abs() < 1e-4);
        let s3 = sp(2, 3.0);
        let dd = s3.directional_derivative(&[1.0, 2.0], &[3.0, -1.0], 1e-5).unwrap();
        let pairing = s3.norming_functional(&[1.0, 2.0]).unwrap().apply(&[3.0, -1.0]);
        assert!((dd - pairing).abs() <= 1e-6 * pairing.abs());
        assert_eq!(s.directional_derivative(&[0.0, 0.0], &[1.0, 0.0], 1e-4), Err(Error::ZeroVector));
        assert!(s.directional_derivative(&[1.0, 0.0], &[1.0, 0.0], 0.0).is_err());
    }

    #[test]
    fn modulus_table_euclidean() {
        let s = sp(5, 2.0);
        let t = estimate_modulus(&s, &[0.0, 0.01, 0.1, 0.5], 200, 3).unwrap();
        assert_eq!(t.points[0].rho, 0.0);
        assert!(t.points[2].rho <= 0.005 + 1e-15);
        assert!(t.dominated());
        assert!(estimate_modulus(&s, &[-0.1], 10, 0).is_err());
        assert!(estimate_modulus(&s, &[0.1], 0, 0).is_err());
    }

    #[test]
    fn modulus_exponent_for_p_below_two() {
        let s = sp(8, 1.5);
        let grid: Vec<f64> = vec![0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5];
        let t = estimate_modulus(&s, &grid, 500, 11).unwrap();
        assert!(t.dominated(), "{:?}", t.points);
        let q = t.fitted_exponent().unwrap();
        assert!(q > 1.0 && q <= 2.0, "fitted exponent {q}");
    }

    #[test]
    fn too_optimistic_declaration_is_detected() {
        // l_4 has rho(u) ~ 3u^2/2 near the extremal pair; gamma = 0.5 is too small
        let s = sp(4, 4.0).with_smoothness(2.0, 0.5).unwrap();
        let t = estimate_modulus(&s, &[0.05, 0.1, 0.2], 50, 1).unwrap();
        assert!(!t.dominated());
    }
}
