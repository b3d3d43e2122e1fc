//! Greedy minimization of convex energies over dictionaries.
//!
//! An [`Energy`] is a Frechet-differentiable convex `E` on the ambient space
//! together with its smoothness data on the level set
//! `D = {x : E(x) <= E(0)}`: `rho(E, u) <= gamma u^q` and `||x|| <= C_0` on `D`.
//! Starting from `G_0 = 0`, WCGA(co) and WGAFR(co) select atoms by the
//! negative gradient `-E'(G_{m-1})` and then minimize `E` over the selected
//! span, respectively over `(1 - w) G_{m-1} + lambda phi_m`.

mod algorithms;
mod checks;
mod lasso;

use alloc::vec::Vec;

pub use algorithms::{proof_constant, run_wcga_co, run_wgafr_co, DescentStep, DescentTrace};
pub use checks::{
    check_energy, check_equivalence_co, check_rate_recursion, energy_modulus_estimate, sample_level_set, EnergyCheck,
    EnergyCheckConfig, EquivalenceReport, LevelSetSample, RecursionReport,
};
pub use lasso::{lasso_recast, LassoRecast};

use crate::error::{invalid, Result};
use crate::linalg::{norm2, sub};
use crate::spaces::{Covector, SmoothSpace};

/// Smoothness and boundedness data of an energy on its level set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyParams {
    /// Power in `rho(E, u) <= gamma u^q`, in `(1, 2]`.
    pub q: f64,
    pub gamma: f64,
    /// `||x|| <= C_0` on `D`.
    pub c0: f64,
    /// `inf_D E`, when known.
    pub known_min: Option<f64>,
}

impl EnergyParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.q > 1.0 && self.q <= 2.0) {
            return Err(invalid("q", alloc::format!("must lie in (1, 2], got {}", self.q)));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(invalid("gamma", "must be positive and finite"));
        }
        if !(self.c0 >= 0.0 && self.c0.is_finite()) {
            return Err(invalid("c0", "must be non-negative and finite"));
        }
        Ok(())
    }
}

/// Convex energy with its gradient as a covector of the ambient space.
pub trait Energy {
    fn space(&self) -> &SmoothSpace;

    fn value(&self, x: &[f64]) -> f64;

    /// `E'(x)`, or [`crate::Error::Kink`] where `E` is not differentiable.
    fn gradient(&self, x: &[f64]) -> Result<Covector>;

    fn params(&self) -> EnergyParams;

    /// `Some(y)` when `E(z) = ||y - z||_2^2 / 2`, so that minimization over a
    /// span reduces to an orthogonal projection.
    fn quadratic_target(&self) -> Option<&[f64]> {
        None
    }
}

/// `E(z) = ||y - z||_2^2 / 2` with `q = 2`, `gamma = 1/2`, `C_0 = 2 ||y||_2`
/// and minimum 0 at `z = y`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticEnergy {
    space: SmoothSpace,
    y: Vec<f64>,
}

impl QuadraticEnergy {
    pub fn new(y: Vec<f64>) -> Result<Self> {
        if y.is_empty() {
            return Err(invalid("y", "target must have at least one coordinate"));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(invalid("y", "entries must be finite"));
        }
        Ok(Self { space: SmoothSpace::euclidean(y.len()), y })
    }

    pub fn target(&self) -> &[f64] {
        &self.y
    }
}

impl Energy for QuadraticEnergy {
    fn space(&self) -> &SmoothSpace {
        &self.space
    }

    fn value(&self, x: &[f64]) -> f64 {
        let r = norm2(&sub(&self.y, x));
        0.5 * r * r
    }

    fn gradient(&self, x: &[f64]) -> Result<Covector> {
        crate::error::check_dim(self.y.len(), x.len())?;
        Ok(Covector(sub(x, &self.y)))
    }

    fn params(&self) -> EnergyParams {
        // D is the ball ||z - y|| <= ||y||
        EnergyParams { q: 2.0, gamma: 0.5, c0: 2.0 * norm2(&self.y), known_min: Some(0.0) }
    }

    fn quadratic_target(&self) -> Option<&[f64]> {
        Some(&self.y)
    }
}

/// Increasing profile `V` of a norm-composite energy `V(||x - f_0||)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Potential {
    /// `u^2 / 2`
    HalfSquare,
    /// `u`, not differentiable at `x = f_0`.
    Identity,
    /// `u^k` with `k >= 1`.
    Power(f64),
}

impl Potential {
    pub fn value(&self, u: f64) -> f64 {
        match *self {
            Potential::HalfSquare => 0.5 * u * u,
            Potential::Identity => u,
            Potential::Power(k) => libm::pow(u, k),
        }
    }

    pub fn derivative(&self, u: f64) -> f64 {
        match *self {
            Potential::HalfSquare => u,
            Potential::Identity => 1.0,
            Potential::Power(1.0) => 1.0,
            Potential::Power(k) => k * libm::pow(u, k - 1.0),
        }
    }
}

/// `E(x) = V(||x - f_0||)` with `E'(x) = V'(||x - f_0||) F_{x - f_0}`.
///
/// The level set is the ball `||x - f_0|| <= ||f_0||`, so `C_0 = 2 ||f_0||`
/// and the minimum `V(0)` is attained at `f_0`. `q` and `gamma` are declared
/// by the caller; [`check_energy`] and [`energy_modulus_estimate`] test them.
#[derive(Debug, Clone, PartialEq)]
pub struct NormCompositeEnergy {
    space: SmoothSpace,
    f0: Vec<f64>,
    potential: Potential,
    q: f64,
    gamma: f64,
}

impl NormCompositeEnergy {
    pub fn new(f0: Vec<f64>, potential: Potential, space: SmoothSpace, q: f64, gamma: f64) -> Result<Self> {
        crate::error::check_dim(space.dim(), f0.len())?;
        if f0.iter().any(|v| !v.is_finite()) {
            return Err(invalid("f0", "entries must be finite"));
        }
        if let Potential::Power(k) = potential {
            if !(k >= 1.0 && k.is_finite()) {
                return Err(invalid("potential", "power must be at least 1 for an increasing convex profile"));
            }
        }
        let e = Self { space, f0, potential, q, gamma };
        e.params().validate()?;
        Ok(e)
    }

    pub fn f0(&self) -> &[f64] {
        &self.f0
    }

    pub fn potential(&self) -> Potential {
        self.potential
    }
}

impl Energy for NormCompositeEnergy {
    fn space(&self) -> &SmoothSpace {
        &self.space
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.potential.value(self.space.norm_of(&sub(x, &self.f0)))
    }

    fn gradient(&self, x: &[f64]) -> Result<Covector> {
        crate::error::check_dim(self.f0.len(), x.len())?;
        let z = sub(x, &self.f0);
        let n = self.space.norm_of(&z);
        if n == 0.0 {
            return if self.potential.derivative(0.0) == 0.0 {
                Ok(Covector(alloc::vec![0.0; z.len()]))
            } else {
                Err(crate::Error::Kink)
            };
        }
        let s = self.potential.derivative(n);
        let f = self.space.norming_functional_with_norm(&z, n);
        Ok(Covector(f.into_inner().into_iter().map(|v| s * v).collect()))
    }

    fn params(&self) -> EnergyParams {
        EnergyParams {
            q: self.q,
            gamma: self.gamma,
            c0: 2.0 * self.space.norm_of(&self.f0),
            known_min: Some(self.potential.value(0.0)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use crate::Error;

    #[test]
    fn quadratic_examples() {
        let e = QuadraticEnergy::new(alloc::vec![1.0, 0.0]).unwrap();
        assert_eq!(e.value(&[0.0, 0.0]), 0.5);
        assert_eq!(e.gradient(&[0.0, 0.0]).unwrap().coords(), &[-1.0, 0.0]);
        let p = e.params();
        assert_eq!((p.q, p.gamma, p.c0, p.known_min), (2.0, 0.5, 2.0, Some(0.0)));
        let z = QuadraticEnergy::new(alloc::vec![0.0; 3]).unwrap();
        assert_eq!(z.value(&[0.0; 3]), 0.0);
        assert_eq!(z.value(&[1.0, 0.0, 0.0]), 0.5);
        assert!(QuadraticEnergy::new(Vec::new()).is_err());
    }

    #[test]
    fn half_square_composite_equals_quadratic() {
        let mut rng = sampling::seeded(1);
        let f0 = sampling::gaussian(&mut rng, 5);
        let q = QuadraticEnergy::new(f0.clone()).unwrap();
        let c = NormCompositeEnergy::new(f0, Potential::HalfSquare, SmoothSpace::euclidean(5), 2.0, 0.5).unwrap();
        for _ in 0..100 {
            let x = sampling::gaussian(&mut rng, 5);
            assert!((q.value(&x) - c.value(&x)).abs() <= 1e-12 * q.value(&x).max(1.0));
            let (gq, gc) = (q.gradient(&x).unwrap(), c.gradient(&x).unwrap());
            for (a, b) in gq.coords().iter().zip(gc.coords()) {
                assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
            }
        }
    }

    #[test]
    fn identity_composite_gradient_is_unit_and_kinks_at_target() {
        let sp = SmoothSpace::lp(4, 3.0).unwrap();
        let f0 = alloc::vec![0.5, -1.0, 2.0, 0.0];
        let e = NormCompositeEnergy::new(f0.clone(), Potential::Identity, sp, 2.0, 1.0).unwrap();
        let g = e.gradient(&[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert!((sp.dual_norm(&g) - 1.0).abs() < 1e-12);
        assert_eq!(e.gradient(&f0), Err(Error::Kink));
        let smooth = NormCompositeEnergy::new(f0.clone(), Potential::Power(4.0), sp, 2.0, 1.0).unwrap();
        assert!(smooth.gradient(&f0).unwrap().coords().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn parameter_validation() {
        let sp = SmoothSpace::euclidean(2);
        assert!(NormCompositeEnergy::new(alloc::vec![1.0, 0.0], Potential::Power(0.5), sp, 2.0, 0.5).is_err());
        assert!(NormCompositeEnergy::new(alloc::vec![1.0, 0.0], Potential::HalfSquare, sp, 2.5, 0.5).is_err());
        assert!(NormCompositeEnergy::new(alloc::vec![1.0, 0.0], Potential::HalfSquare, sp, 2.0, 0.0).is_err());
        assert!(NormCompositeEnergy::new(alloc::vec![1.0], Potential::HalfSquare, sp, 2.0, 0.5).is_err());
    }
}
