use alloc::vec::Vec;

use crate::dictionary::Dictionary;
use crate::error::{check_dim, invalid, Error, Result};
use crate::linalg::{binomial, norm2, Combinations, OrthoBasis};

/// Parameters of the `l_1` incoherence property: `|A| <= k`,
/// `|A| + |Lambda| <= depth`, and the inequality
/// `sum_{i in A} |x_i| <= V |A|^r dist(f_A, span(g_i : i in Lambda))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncoherenceProfile {
    pub k: usize,
    pub depth: usize,
    /// Target constant; `None` only measures.
    pub v: Option<f64>,
    pub r: f64,
}

/// Hard cap on the number of `(A, Lambda)` pairs.
pub const PROPERTY_A_BUDGET: u128 = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyAReport {
    pub pairs: usize,
    /// Smallest `V` for which the inequality holds on every enumerated pair
    /// (infinite when some `f_A` lies in the span of its `Lambda`).
    pub min_v: f64,
    /// Pair attaining `min_v`, as column indices.
    pub worst: Option<(Vec<usize>, Vec<usize>)>,
    pub pass: bool,
}

/// Enumerates non-empty `A` inside the support of `coefficients` and all
/// `Lambda` among the remaining atoms; the infimum over `{c_i}` is the
/// orthogonal projection residual (`l_2`).
pub fn check_property_a(
    dict: &Dictionary,
    coefficients: &[f64],
    profile: &IncoherenceProfile,
    budget: u128,
) -> Result<PropertyAReport> {
    check_dim(dict.len(), coefficients.len())?;
    if !dict.space().is_euclidean() {
        return Err(Error::Unsupported("property A is evaluated by orthogonal projection in l_2".into()));
    }
    if profile.k == 0 || profile.k > profile.depth {
        return Err(invalid("k", "need 1 <= K <= depth"));
    }
    if !(profile.r >= 0.0 && profile.r <= 1.0) {
        return Err(invalid("r", "must lie in [0, 1]"));
    }
    let support: Vec<usize> = (0..dict.len()).filter(|&j| coefficients[j] != 0.0).collect();
    let n = dict.len();
    let mut required: u128 = 0;
    for a in 1..=profile.k.min(support.len()) {
        let lambdas: u128 = (0..=profile.depth - a).map(|l| binomial(n - a, l)).fold(0u128, |s, v| s.saturating_add(v));
        required = required.saturating_add(binomial(support.len(), a).saturating_mul(lambdas));
    }
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }

    let mut report = PropertyAReport { pairs: 0, min_v: 0.0, worst: None, pass: true };
    for a in 1..=profile.k.min(support.len()) {
        for pick in Combinations::new(support.len(), a) {
            let set_a: Vec<usize> = pick.iter().map(|&i| support[i]).collect();
            let lhs: f64 = set_a.iter().map(|&i| coefficients[i].abs()).sum();
            let mut f_a = alloc::vec![0.0; dict.dim()];
            for &i in &set_a {
                crate::linalg::axpy(coefficients[i], dict.atom(i), &mut f_a);
            }
            let rest: Vec<usize> = (0..n).filter(|j| !set_a.contains(j)).collect();
            let scale = libm::pow(a as f64, profile.r);
            for l in 0..=profile.depth - a {
                for lp in Combinations::new(rest.len(), l) {
                    let lambda: Vec<usize> = lp.iter().map(|&i| rest[i]).collect();
                    let mut basis = OrthoBasis::new(dict.dim());
                    for &j in &lambda {
                        basis.push(j, dict.atom(j));
                    }
                    let dist = norm2(&basis.residual(&f_a));
                    let v = if dist > 0.0 { lhs / (scale * dist) } else { f64::INFINITY };
                    if v > report.min_v || report.worst.is_none() {
                        report.min_v = report.min_v.max(v);
                        report.worst = Some((set_a.clone(), lambda));
                    }
                    report.pairs += 1;
                }
            }
        }
    }
    if let Some(target) = profile.v {
        report.pass = report.min_v <= target;
    }
    Ok(report)
}
