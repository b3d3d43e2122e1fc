//! Numerical verification of guarantees: rate fits, the exponential-decay
//! check, brute-force best `m`-term errors, Lebesgue-type comparisons and
//! the `l_1` incoherence property.

mod exploratory;
mod incoherence;
mod oracles;
mod rate;

pub use exploratory::{packing_trend, probe_sparse_recovery, PackingPoint, PackingTrend, SparseRecoveryProbe};
pub use incoherence::{check_property_a, IncoherenceProfile, PropertyAReport, PROPERTY_A_BUDGET};
pub use oracles::{check_lebesgue, sigma_m_bruteforce, LebesgueConfig, LebesgueReport, SIGMA_BUDGET};
pub use rate::{
    assess_rate, check_exponential, choose_decay_model, fit_exponential, fit_rate, DecayModel, ExponentialCheck,
    ExponentialFit, RateAssessment, RateFit, MIN_FIT_POINTS,
};
