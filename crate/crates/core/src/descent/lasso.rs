use alloc::vec::Vec;

use super::QuadraticEnergy;
use crate::dictionary::Dictionary;
use crate::error::{check_dim, invalid, Error, Result};
use crate::linalg::norm2;
use crate::spaces::SmoothSpace;

/// `min ||y - Phi x||_2^2 / 2` over `x` with bounded `l_1` norm, recast as the
/// quadratic energy of `y` over the dictionary of normalized columns
/// `phi_j = Phi_j / s_j` in `R^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LassoRecast {
    pub dictionary: Dictionary,
    pub energy: QuadraticEnergy,
    /// Column norms `s_j = ||Phi_j||_2`.
    pub scales: Vec<f64>,
}

impl LassoRecast {
    /// `x_j = c_j / s_j`, so that `Phi x = sum_j c_j phi_j`.
    pub fn map_back(&self, coefficients: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.scales.len(), coefficients.len())?;
        Ok(coefficients.iter().zip(&self.scales).map(|(c, s)| c / s).collect())
    }
}

/// `phi` is given by rows (`k` rows of length `n`).
pub fn lasso_recast(phi: &[Vec<f64>], y: &[f64]) -> Result<LassoRecast> {
    let k = phi.len();
    if k == 0 {
        return Err(invalid("phi", "matrix has no rows"));
    }
    check_dim(k, y.len())?;
    let n = phi[0].len();
    if n == 0 {
        return Err(invalid("phi", "matrix has no columns"));
    }
    for row in phi {
        check_dim(n, row.len())?;
        if row.iter().any(|v| !v.is_finite()) {
            return Err(invalid("phi", "entries must be finite"));
        }
    }
    let mut atoms = Vec::with_capacity(n);
    let mut scales = Vec::with_capacity(n);
    for j in 0..n {
        let col: Vec<f64> = phi.iter().map(|row| row[j]).collect();
        let s = norm2(&col);
        if s == 0.0 {
            return Err(Error::ZeroColumn { index: j });
        }
        atoms.push(col.into_iter().map(|v| v / s).collect());
        scales.push(s);
    }
    let dictionary = Dictionary::new(SmoothSpace::euclidean(k), atoms, "lasso-columns")?;
    let energy = QuadraticEnergy::new(y.to_vec())?;
    Ok(LassoRecast { dictionary, energy, scales })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descent::run_wcga_co;
    use crate::greedy::{run_woga, GreedyConfig};
    use crate::linalg::least_squares;
    use crate::sampling;
    use alloc::vec;

    fn matvec(phi: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
        phi.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    #[test]
    fn identity_matrix() {
        let phi: Vec<Vec<f64>> = (0..3).map(|i| (0..3).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        let r = lasso_recast(&phi, &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(r.scales, vec![1.0; 3]);
        assert_eq!(r.dictionary.atoms(), Dictionary::canonical(SmoothSpace::euclidean(3)).atoms());
    }

    #[test]
    fn zero_column_rejected() {
        let phi = vec![vec![1.0, 0.0, 2.0], vec![3.0, 0.0, 1.0]];
        assert_eq!(lasso_recast(&phi, &[1.0, 1.0]), Err(Error::ZeroColumn { index: 1 }));
    }

    #[test]
    fn round_trip_reproduces_phi_x() {
        let mut rng = sampling::seeded(3);
        let phi: Vec<Vec<f64>> = (0..5).map(|_| sampling::gaussian(&mut rng, 8)).collect();
        let y = sampling::gaussian(&mut rng, 5);
        let r = lasso_recast(&phi, &y).unwrap();
        let c = sampling::gaussian(&mut rng, 8);
        let x = r.map_back(&c).unwrap();
        let lhs = matvec(&phi, &x);
        let rhs = r.dictionary.combine(&c);
        for (a, b) in lhs.iter().zip(&rhs) {
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn woga_recovers_sparse_support() {
        let (k, n) = (20, 50);
        let mut rng = sampling::seeded(11);
        let phi: Vec<Vec<f64>> = (0..k).map(|_| sampling::gaussian(&mut rng, n)).collect();
        let support = [4usize, 17, 33];
        let mut x = vec![0.0; n];
        for (i, &j) in support.iter().enumerate() {
            x[j] = [1.5, -0.8, 2.2][i];
        }
        let y = matvec(&phi, &x);
        let r = lasso_recast(&phi, &y).unwrap();
        let t = run_woga(&y, &r.dictionary, &GreedyConfig { max_iter: 3, ..Default::default() }).unwrap();
        let mut found: Vec<usize> = t.steps.iter().map(|s| s.selected.column()).collect();
        found.sort_unstable();
        assert_eq!(found, support);
        let xhat = r.map_back(&t.expansion).unwrap();
        // least squares on the true support
        let cols: Vec<Vec<f64>> = support.iter().map(|&j| phi.iter().map(|row| row[j]).collect()).collect();
        let refs: Vec<&[f64]> = cols.iter().map(|c| c.as_slice()).collect();
        let ls = least_squares(&refs, &y);
        let mut err = 0.0;
        for (i, &j) in support.iter().enumerate() {
            err += (xhat[j] - ls.coefficients[i]) * (xhat[j] - ls.coefficients[i]);
        }
        for (j, v) in xhat.iter().enumerate() {
            if !support.contains(&j) {
                err += v * v;
            }
        }
        assert!(libm::sqrt(err) <= 1e-8);
        let co = run_wcga_co(&r.energy, &r.dictionary, &GreedyConfig { max_iter: 3, ..Default::default() }).unwrap();
        assert_eq!(co.selected(), t.selected());
    }
}
