use crate::error::{invalid, Error, Result};
use crate::linalg::linear_regression;
use alloc::vec::Vec;

/// Minimum number of points of a rate fit.
pub const MIN_FIT_POINTS: usize = 8;

/// Least-squares line through `(log m, log value_m)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub m_lo: usize,
    pub m_hi: usize,
    pub points: usize,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Least-squares line through `(m, log value_m)`: `value_m ~ e^intercept factor^m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialFit {
    pub m_lo: usize,
    pub m_hi: usize,
    pub points: usize,
    /// `e^slope`.
    pub factor: f64,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

// (m, value_m) over the window, m >= 1, cut at the first non-positive value
fn window_points(values: &[f64], window: (usize, usize)) -> Result<(Vec<(usize, f64)>, usize, usize)> {
    let (lo, hi) = window;
    if lo > hi {
        return Err(invalid("window", "lower end exceeds upper end"));
    }
    let mut pts = Vec::new();
    for m in lo.max(1)..=hi.min(values.len().saturating_sub(1)) {
        let v = values[m];
        if !(v > 0.0) {
            break;
        }
        pts.push((m, v));
    }
    if pts.len() < MIN_FIT_POINTS {
        return Err(Error::WindowTooSmall { points: pts.len(), required: MIN_FIT_POINTS });
    }
    let (a, b) = (pts[0].0, pts[pts.len() - 1].0);
    Ok((pts, a, b))
}

/// Power-law fit of `values[m]` (indexed by iteration, `values[0]` the
/// initial value) over `m` in `window`.
pub fn fit_rate(values: &[f64], window: (usize, usize)) -> Result<RateFit> {
    let (pts, m_lo, m_hi) = window_points(values, window)?;
    let xy: Vec<(f64, f64)> = pts.iter().map(|&(m, v)| (libm::log(m as f64), libm::log(v))).collect();
    let (slope, intercept, r_squared) =
        linear_regression(&xy).ok_or(Error::WindowTooSmall { points: pts.len(), required: MIN_FIT_POINTS })?;
    Ok(RateFit { m_lo, m_hi, points: pts.len(), slope, intercept, r_squared })
}

/// Exponential fit of `values[m]` over `m` in `window`.
pub fn fit_exponential(values: &[f64], window: (usize, usize)) -> Result<ExponentialFit> {
    let (pts, m_lo, m_hi) = window_points(values, window)?;
    let xy: Vec<(f64, f64)> = pts.iter().map(|&(m, v)| (m as f64, libm::log(v))).collect();
    let (slope, intercept, r_squared) =
        linear_regression(&xy).ok_or(Error::WindowTooSmall { points: pts.len(), required: MIN_FIT_POINTS })?;
    Ok(ExponentialFit { m_lo, m_hi, points: pts.len(), factor: libm::exp(slope), slope, intercept, r_squared })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayModel {
    PowerLaw(RateFit),
    Exponential(ExponentialFit),
}

/// The model with the larger `r^2` (ties go to the power law).
pub fn choose_decay_model(values: &[f64], window: (usize, usize)) -> Result<DecayModel> {
    let p = fit_rate(values, window)?;
    let e = fit_exponential(values, window)?;
    Ok(if e.r_squared > p.r_squared { DecayModel::Exponential(e) } else { DecayModel::PowerLaw(p) })
}

/// Result of checking `value_m <= factor^m value_0 (1 + 1e-9)` at every `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialCheck {
    pub factor: f64,
    pub checked: usize,
    pub first_violation: Option<usize>,
    /// `max_m value_m / (factor^m value_0)`.
    pub worst_ratio: f64,
}

impl ExponentialCheck {
    pub fn pass(&self) -> bool {
        self.first_violation.is_none()
    }
}

pub fn check_exponential(values: &[f64], factor: f64) -> Result<ExponentialCheck> {
    if !(factor > 0.0 && factor < 1.0) {
        return Err(invalid("factor", alloc::format!("must lie in (0, 1), got {factor}")));
    }
    let mut report = ExponentialCheck { factor, checked: 0, first_violation: None, worst_ratio: 0.0 };
    let Some(&v0) = values.first() else {
        return Ok(report);
    };
    for (m, &v) in values.iter().enumerate().skip(1) {
        let bound = libm::pow(factor, m as f64) * v0;
        if v > bound * (1.0 + 1e-9) && report.first_violation.is_none() {
            report.first_violation = Some(m);
        }
        if bound > 0.0 {
            report.worst_ratio = report.worst_ratio.max(v / bound);
        }
        report.checked += 1;
    }
    Ok(report)
}

/// Decay assessment of a trace against a slope threshold, where a trace
/// that reaches `floor` before the window holds enough points counts as
/// exact recovery.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateAssessment {
    pub fit: Option<RateFit>,
    /// First `m` with `value_m <= floor`.
    pub exact_at: Option<usize>,
    pub max_slope: f64,
    pub pass: bool,
}

pub fn assess_rate(values: &[f64], window: (usize, usize), max_slope: f64, floor: f64) -> Result<RateAssessment> {
    let exact_at = values.iter().position(|&v| v <= floor);
    match fit_rate(values, window) {
        Ok(fit) => Ok(RateAssessment { fit: Some(fit), exact_at, max_slope, pass: fit.slope <= max_slope }),
        Err(Error::WindowTooSmall { .. }) if exact_at.is_some() => {
            Ok(RateAssessment { fit: None, exact_at, max_slope, pass: true })
        }
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn power(e: f64, n: usize) -> Vec<f64> {
        (0..=n).map(|m| if m == 0 { 1.0 } else { libm::pow(m as f64, e) }).collect()
    }

    #[test]
    fn recovers_synthetic_power_law() {
        let v = power(-0.5, 300);
        let f = fit_rate(&v, (16, 256)).unwrap();
        assert!((f.slope + 0.5).abs() < 1e-10);
        assert!(f.intercept.abs() < 1e-9);
        assert_eq!((f.m_lo, f.m_hi, f.points), (16, 256, 241));
    }

    #[test]
    fn exponential_sequence_prefers_exponential_model() {
        let v: Vec<f64> = (0..100).map(|m| libm::pow(0.9, m as f64)).collect();
        match choose_decay_model(&v, (1, 99)).unwrap() {
            DecayModel::Exponential(e) => assert!((e.factor - 0.9).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        assert!(matches!(choose_decay_model(&power(-1.0, 100), (1, 100)).unwrap(), DecayModel::PowerLaw(_)));
    }

    #[test]
    fn zeros_truncate_the_window() {
        let mut v = power(-1.0, 40);
        v[12] = 0.0;
        let f = fit_rate(&v, (2, 40)).unwrap();
        assert_eq!((f.m_lo, f.m_hi), (2, 11));
        v[6] = 0.0;
        assert_eq!(fit_rate(&v, (2, 40)), Err(Error::WindowTooSmall { points: 4, required: 8 }));
    }

    #[test]
    fn exponential_check_examples() {
        assert!(check_exponential(&[0.0; 10], 0.5).unwrap().pass());
        let v: Vec<f64> = (0..20).map(|m| libm::pow(0.9, m as f64)).collect();
        let r = check_exponential(&v, 0.8).unwrap();
        assert_eq!(r.first_violation, Some(1));
        assert!(check_exponential(&v, 0.9).unwrap().pass());
        assert!(check_exponential(&v, 1.0).is_err());
    }

    #[test]
    fn exact_recovery_counts_as_pass() {
        let mut v = power(-0.1, 20);
        for x in v.iter_mut().skip(16) {
            *x = 0.0;
        }
        let a = assess_rate(&v[..17], (16, 256), -0.4, 1e-12).unwrap();
        assert!(a.pass && a.fit.is_none() && a.exact_at == Some(16));
        let slow = power(-0.1, 300);
        assert!(!assess_rate(&slow, (16, 256), -0.4, 1e-12).unwrap().pass);
    }
}
