//! Small dense linear-algebra kernels used by the greedy algorithms.
//!
//! Vectors are plain `f64` slices. The dimensions involved are those of the
//! ambient space (tens of coordinates), so everything here is written for
//! clarity and numerical robustness rather than blocking or SIMD.

use alloc::vec;
use alloc::vec::Vec;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scaled(alpha: f64, x: &[f64]) -> Vec<f64> {
    x.iter().map(|v| alpha * v).collect()
}

pub fn norm1(a: &[f64]) -> f64 {
    a.iter().map(|v| v.abs()).sum()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Relative tolerance below which a new direction is treated as lying in the
/// span of the current basis.
pub const RANK_TOL: f64 = 1e-10;

/// Incrementally grown orthonormal basis with its triangular factor.
///
/// Each accepted vector `v_j` satisfies `v_j = sum_i r_{ij} q_i`, so
/// coefficients of a projection with respect to the accepted vectors are
/// recovered by back substitution. Vectors that are numerically dependent on
/// the current basis are rejected and leave the basis untouched.
#[derive(Debug, Clone)]
pub struct OrthoBasis {
    dim: usize,
    q: Vec<Vec<f64>>,
    // column j of R, length j + 1
    r: Vec<Vec<f64>>,
    tags: Vec<usize>,
    tol: f64,
}

impl OrthoBasis {
    pub fn new(dim: usize) -> Self {
        Self::with_tolerance(dim, RANK_TOL)
    }

    pub fn with_tolerance(dim: usize, tol: f64) -> Self {
        Self { dim, q: Vec::new(), r: Vec::new(), tags: Vec::new(), tol }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.q.len()
    }

    pub fn is_full(&self) -> bool {
        self.q.len() == self.dim
    }

    /// Caller-supplied tags of the accepted vectors, in insertion order.
    pub fn tags(&self) -> &[usize] {
        &self.tags
    }

    pub fn contains_tag(&self, tag: usize) -> bool {
        self.tags.contains(&tag)
    }

    /// Tries to extend the basis by `v`. Returns `false` when `v` is
    /// numerically in the current span.
    pub fn push(&mut self, tag: usize, v: &[f64]) -> bool {
        debug_assert_eq!(v.len(), self.dim);
        let scale = norm2(v);
        if scale == 0.0 || self.is_full() {
            return false;
        }
        let mut w = v.to_vec();
        let mut coeffs = vec![0.0; self.q.len() + 1];
        // two Gram-Schmidt passes keep the basis orthogonal to working precision
        for _ in 0..2 {
            for (i, qi) in self.q.iter().enumerate() {
                let h = dot(qi, &w);
                axpy(-h, qi, &mut w);
                coeffs[i] += h;
            }
        }
        let rest = norm2(&w);
        if rest <= self.tol * scale {
            return false;
        }
        for x in w.iter_mut() {
            *x /= rest;
        }
        coeffs[self.q.len()] = rest;
        self.q.push(w);
        self.r.push(coeffs);
        self.tags.push(tag);
        true
    }

    /// Orthogonal projection of `b` onto the span: returns `(Q^T b, b - Q Q^T b)`.
    pub fn project(&self, b: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut resid = b.to_vec();
        let mut y = vec![0.0; self.q.len()];
        for _ in 0..2 {
            for (i, qi) in self.q.iter().enumerate() {
                let h = dot(qi, &resid);
                axpy(-h, qi, &mut resid);
                y[i] += h;
            }
        }
        (y, resid)
    }

    /// Residual of the orthogonal projection of `b` onto the span.
    pub fn residual(&self, b: &[f64]) -> Vec<f64> {
        self.project(b).1
    }

    /// Coefficients `c` with `P b = sum_j c_j v_j` over the accepted vectors,
    /// together with the projection residual.
    pub fn solve(&self, b: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let (y, resid) = self.project(b);
        let k = y.len();
        let mut c = vec![0.0; k];
        for j in (0..k).rev() {
            let mut acc = y[j];
            for l in (j + 1)..k {
                acc -= self.r[l][j] * c[l];
            }
            c[j] = acc / self.r[j][j];
        }
        (c, resid)
    }
}

/// Result of a least-squares fit of `b` by a set of columns.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    /// One coefficient per input column; columns dependent on earlier ones get 0.
    pub coefficients: Vec<f64>,
    pub residual: Vec<f64>,
    pub residual_norm: f64,
    pub rank: usize,
}

/// Minimizes `||b - sum_j c_j col_j||_2`.
///
/// Columns that are numerically dependent on earlier columns are skipped and
/// receive a zero coefficient; the residual is the orthogonal projection
/// residual onto the full column span either way.
pub fn least_squares(columns: &[&[f64]], b: &[f64]) -> LeastSquares {
    let mut basis = OrthoBasis::new(b.len());
    for (j, col) in columns.iter().enumerate() {
        basis.push(j, col);
    }
    let (c, residual) = basis.solve(b);
    let mut coefficients = vec![0.0; columns.len()];
    for (&tag, v) in basis.tags().iter().zip(c) {
        coefficients[tag] = v;
    }
    let residual_norm = norm2(&residual);
    LeastSquares { coefficients, residual, residual_norm, rank: basis.rank() }
}

/// Solves the square system `a x = b` (row-major `a`) by Gaussian elimination
/// with partial pivoting. Returns `None` for numerically singular systems.
pub fn solve_linear(a: &[f64], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    debug_assert_eq!(a.len(), n * n);
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    let scale = norm_inf(a).max(f64::MIN_POSITIVE);
    for col in 0..n {
        let (piv, pval) = (col..n)
            .map(|row| (row, m[row * n + col].abs()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pval <= 1e-13 * scale {
            return None;
        }
        if piv != col {
            for k in 0..n {
                m.swap(col * n + k, piv * n + k);
            }
            x.swap(col, piv);
        }
        let d = m[col * n + col];
        for row in (col + 1)..n {
            let f = m[row * n + col] / d;
            if f != 0.0 {
                for k in col..n {
                    m[row * n + k] -= f * m[col * n + k];
                }
                x[row] -= f * x[col];
            }
        }
    }
    for row in (0..n).rev() {
        let mut acc = x[row];
        for k in (row + 1)..n {
            acc -= m[row * n + k] * x[k];
        }
        x[row] = acc / m[row * n + row];
    }
    Some(x)
}

/// Ordinary least-squares line through `(x, y)` points: `(slope, intercept, r^2)`.
///
/// Returns `None` with fewer than two points or no spread in `x`.
pub fn linear_regression(points: &[(f64, f64)]) -> Option<(f64, f64, f64)> {
    let n = points.len();
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in points {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy > 0.0 { (sxy * sxy) / (sxx * syy) } else { 1.0 };
    Some((slope, intercept, r2))
}

/// Binomial coefficient, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Lexicographic enumeration of the `k`-subsets of `0..n`.
#[derive(Debug, Clone)]
pub struct Combinations {
    n: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        Self { n, idx: (0..k).collect(), done: k > n }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.clone();
        let k = self.idx.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for j in (i + 1)..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gram_schmidt_rejects_dependent_vectors() {
        let mut b = OrthoBasis::new(3);
        assert!(b.push(0, &[1.0, 0.0, 0.0]));
        assert!(b.push(1, &[1.0, 1.0, 0.0]));
        assert!(!b.push(2, &[2.0, -3.0, 0.0]));
        assert_eq!(b.rank(), 2);
        let (c, r) = b.solve(&[3.0, 2.0, 5.0]);
        // 3 e1 + 2 e2 = 1*(1,0,0) + 2*(1,1,0)
        assert!((c[0] - 1.0).abs() < 1e-14 && (c[1] - 2.0).abs() < 1e-14);
        assert!((r[2] - 5.0).abs() < 1e-14 && r[0].abs() < 1e-14);
    }

    #[test]
    fn least_squares_zeroes_dependent_columns() {
        let c0 = [1.0, 0.0];
        let c1 = [2.0, 0.0];
        let ls = least_squares(&[&c0, &c1], &[4.0, 1.0]);
        assert_eq!(ls.rank, 1);
        assert_eq!(ls.coefficients[1], 0.0);
        assert!((ls.coefficients[0] - 4.0).abs() < 1e-14);
        assert!((ls.residual_norm - 1.0).abs() < 1e-14);
    }

    #[test]
    fn gaussian_elimination_with_pivoting() {
        let a = [0.0, 2.0, 1.0, 1.0];
        let x = solve_linear(&a, &[4.0, 3.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 2.0).abs() < 1e-14);
        assert!(solve_linear(&[1.0, 2.0, 2.0, 4.0], &[1.0, 1.0]).is_none());
    }

    #[test]
    fn combinations_count_matches_binomial() {
        for n in 0..8 {
            for k in 0..=n + 1 {
                assert_eq!(Combinations::new(n, k).count() as u128, binomial(n, k), "n={n} k={k}");
            }
        }
        assert_eq!(binomial(40, 3), 9880);
        assert_eq!(binomial(10, 2), 45);
    }
}
