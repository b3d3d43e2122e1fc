//! Experiment configuration: one strict JSON document. Unknown keys are
//! rejected and every validation error names the offending field.

use std::path::{Path, PathBuf};

use greedy_descent_core::greedy::SelectionMode;
use greedy_descent_core::{Error as CoreError, GreedyConfig, SmoothSpace};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmName {
    Wcga,
    Wgafr,
    Wga,
    Woga,
    Dga,
    Hybrid,
    WcgaCo,
    WgafrCo,
}

impl AlgorithmName {
    pub fn as_str(&self) -> &'static str {
        match self {
            AlgorithmName::Wcga => "wcga",
            AlgorithmName::Wgafr => "wgafr",
            AlgorithmName::Wga => "wga",
            AlgorithmName::Woga => "woga",
            AlgorithmName::Dga => "dga",
            AlgorithmName::Hybrid => "hybrid",
            AlgorithmName::WcgaCo => "wcga_co",
            AlgorithmName::WgafrCo => "wgafr_co",
        }
    }

    pub fn is_descent(&self) -> bool {
        matches!(self, AlgorithmName::WcgaCo | AlgorithmName::WgafrCo)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceConfig {
    pub d: usize,
    #[serde(default = "two")]
    pub p: f64,
    /// Overrides of the declared `rho(u) <= gamma u^q`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
}

fn two() -> f64 {
    2.0
}

impl SpaceConfig {
    pub fn build(&self) -> Result<SmoothSpace> {
        let sp = SmoothSpace::lp(self.d, self.p).map_err(|e| field_error("space", e))?;
        match (self.q, self.gamma) {
            (None, None) => Ok(sp),
            (q, gamma) => sp.with_smoothness(q.unwrap_or(sp.q()), gamma.unwrap_or(sp.gamma())).map_err(|e| field_error("space", e)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DictionaryRecipe {
    Canonical {},
    RandomSphere {
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    /// Rejection packing in `l_2^d`.
    Incoherent {
        n: usize,
        mu: f64,
        #[serde(default = "default_attempts")]
        max_attempts: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    /// Rejection packing completed by projected-gradient refinement.
    IncoherentRefined {
        n: usize,
        mu: f64,
        #[serde(default = "default_refine_steps")]
        max_steps: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    /// `n` atoms of `l_2^2` at angles `k pi / n`.
    Equiangular { n: usize },
    File { path: PathBuf },
}

pub fn default_attempts() -> usize {
    200_000
}

pub fn default_refine_steps() -> usize {
    20_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TargetConfig {
    /// `f_0` given explicitly.
    Vector { values: Vec<f64> },
    /// `f_0 = budget * sum_i w_i (+-g^{j_i})` over `atoms` distinct columns
    /// with random convex weights and signs, plus a perturbation of norm `noise`.
    AtomCombination {
        atoms: usize,
        #[serde(default = "one")]
        budget: f64,
        #[serde(default)]
        noise: f64,
    },
    /// `min ||Phi x - y||^2 / 2` over the normalized columns of `Phi`.
    Lasso { phi: PathBuf, y: PathBuf },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialConfig {
    HalfSquare,
    Identity,
    Power(f64),
}

/// `E(x) = V(||x - f_0||)`; the quadratic case in `l_2` needs no smoothness data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyConfig {
    #[serde(default = "half_square")]
    pub potential: PotentialConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
}

fn half_square() -> PotentialConfig {
    PotentialConfig::HalfSquare
}

impl Default for EnergyConfig {
    fn default() -> Self {
        Self { potential: PotentialConfig::HalfSquare, q: None, gamma: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SelectionConfig {
    #[default]
    Exact,
    FirstAcceptable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    #[serde(default = "one")]
    pub t: f64,
    #[serde(default = "half")]
    pub b: f64,
    #[serde(default = "inner_tol")]
    pub inner_tol: f64,
    #[serde(default = "inner_max_iter")]
    pub inner_max_iter: usize,
    #[serde(default = "stop_norm")]
    pub stop_norm: f64,
    #[serde(default)]
    pub selection: SelectionConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_lower: Option<f64>,
    /// Orthogonal steps of the hybrid before it switches to WGA.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub switch_iter: Option<usize>,
}

fn half() -> f64 {
    0.5
}
fn inner_tol() -> f64 {
    GreedyConfig::default().inner_tol
}
fn inner_max_iter() -> usize {
    GreedyConfig::default().inner_max_iter
}
fn stop_norm() -> f64 {
    GreedyConfig::default().stop_norm
}

impl Default for ParamsConfig {
    fn default() -> Self {
        Self {
            t: 1.0,
            b: 0.5,
            inner_tol: inner_tol(),
            inner_max_iter: inner_max_iter(),
            stop_norm: stop_norm(),
            selection: SelectionConfig::Exact,
            beta_lower: None,
            switch_iter: None,
        }
    }
}

impl ParamsConfig {
    pub fn greedy(&self, m_max: usize) -> Result<GreedyConfig> {
        let cfg = GreedyConfig {
            t: self.t,
            b: self.b,
            max_iter: m_max,
            inner_tol: self.inner_tol,
            inner_max_iter: self.inner_max_iter,
            stop_norm: self.stop_norm,
            selection: match self.selection {
                SelectionConfig::Exact => SelectionMode::Exact,
                SelectionConfig::FirstAcceptable => SelectionMode::FirstAcceptable,
            },
            beta_lower: self.beta_lower,
        };
        cfg.validate().map_err(|e| match e {
            CoreError::InvalidParameter { name: "max_iter", reason } => HarnessError::config("m_max", reason),
            e => field_error("params", e),
        })?;
        Ok(cfg)
    }
}

/// Rate assertion on the residual (or energy-gap) trace; a trace reaching
/// `floor * value_0` counts as exact recovery.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateCheck {
    pub window: (usize, usize),
    pub max_slope: f64,
    #[serde(default = "rate_floor")]
    pub floor: f64,
}

fn rate_floor() -> f64 {
    1e-12
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChecksConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<RateCheck>,
    /// Upper bound on the final residual norm (energy gap for descent).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_final: Option<f64>,
    /// `value_m <= factor^m value_0` at every step.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponential_factor: Option<f64>,
}

impl ChecksConfig {
    pub fn is_empty(&self) -> bool {
        self.rate.is_none() && self.max_final.is_none() && self.exponential_factor.is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(default = "all_formats")]
    pub formats: Vec<OutputFormat>,
}

fn all_formats() -> Vec<OutputFormat> {
    vec![OutputFormat::Csv, OutputFormat::Json]
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: None, formats: all_formats() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub space: SpaceConfig,
    /// Required except for lasso targets, which bring their own columns.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dictionary: Option<DictionaryRecipe>,
    pub algorithm: AlgorithmName,
    #[serde(default)]
    pub params: ParamsConfig,
    pub target: TargetConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<EnergyConfig>,
    pub m_max: usize,
    #[serde(default, skip_serializing_if = "ChecksConfig::is_empty")]
    pub checks: ChecksConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub verbosity: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

pub(crate) fn field_error(prefix: &str, e: CoreError) -> HarnessError {
    match e {
        CoreError::InvalidParameter { name, reason } => HarnessError::config(format!("{prefix}.{name}"), reason),
        e => HarnessError::config(prefix, e.to_string()),
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| {
            // serde names unknown and missing keys in the message
            HarnessError::config(json_field(&e.to_string()), e.to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&crate::formats::read_text(path).map_err(|e| HarnessError::config("config", e.to_string()))?)
    }

    /// Static checks that need no numerics beyond parameter ranges.
    pub fn validate(&self) -> Result<()> {
        self.space.build()?;
        self.params.greedy(self.m_max)?;
        let lasso = matches!(self.target, TargetConfig::Lasso { .. });
        match (&self.dictionary, lasso) {
            (None, false) => return Err(HarnessError::config("dictionary", "required unless the target is a lasso instance")),
            (Some(_), true) => return Err(HarnessError::config("dictionary", "a lasso target supplies its own columns")),
            _ => {}
        }
        if let Some(DictionaryRecipe::File { path }) = &self.dictionary {
            require_file("dictionary.path", path)?;
        }
        match &self.target {
            TargetConfig::Vector { values } if values.len() != self.space.d => {
                return Err(HarnessError::config("target.values", format!("expected {} entries, found {}", self.space.d, values.len())));
            }
            TargetConfig::Vector { values } if values.iter().any(|v| !v.is_finite()) => {
                return Err(HarnessError::config("target.values", "entries must be finite"));
            }
            TargetConfig::AtomCombination { atoms, budget, noise } => {
                if *atoms == 0 {
                    return Err(HarnessError::config("target.atoms", "must be at least 1"));
                }
                if !(budget.is_finite() && *budget > 0.0) {
                    return Err(HarnessError::config("target.budget", "must be positive"));
                }
                if !(noise.is_finite() && *noise >= 0.0) {
                    return Err(HarnessError::config("target.noise", "must be non-negative"));
                }
            }
            TargetConfig::Lasso { phi, y } => {
                require_file("target.phi", phi)?;
                require_file("target.y", y)?;
                if self.space.p != 2.0 {
                    return Err(HarnessError::config("space.p", "lasso instances live in l_2"));
                }
            }
            _ => {}
        }
        if self.energy.is_some() && !self.algorithm.is_descent() {
            return Err(HarnessError::config("energy", "only used by wcga_co and wgafr_co"));
        }
        if self.algorithm == AlgorithmName::Hybrid && self.params.switch_iter == Some(0) {
            return Err(HarnessError::config("params.switch_iter", "must be at least 1"));
        }
        if let Some(r) = &self.checks.rate {
            if r.window.0 >= r.window.1 {
                return Err(HarnessError::config("checks.rate.window", "need lo < hi"));
            }
        }
        if let Some(f) = self.checks.exponential_factor {
            if !(f > 0.0 && f < 1.0) {
                return Err(HarnessError::config("checks.exponential_factor", "must lie in (0, 1)"));
            }
        }
        if self.workers == Some(0) {
            return Err(HarnessError::config("workers", "must be at least 1"));
        }
        Ok(())
    }
}

fn require_file(field: &str, path: &Path) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(HarnessError::config(field, format!("file `{}` does not exist", path.display())))
    }
}

// best-effort field name from a serde_json message such as "unknown field `x`"
fn json_field(msg: &str) -> String {
    for marker in ["unknown field `", "missing field `", "unknown variant `"] {
        if let Some(i) = msg.find(marker) {
            let rest = &msg[i + marker.len()..];
            if let Some(j) = rest.find('`') {
                return rest[..j].to_string();
            }
        }
    }
    "config".to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "seed": 1,
        "space": {"d": 2},
        "dictionary": {"kind": "canonical"},
        "algorithm": "woga",
        "target": {"kind": "vector", "values": [1.0, 1.0]},
        "m_max": 10
    }"#;

    #[test]
    fn minimal_config_parses_with_defaults() {
        let c = RunConfig::from_json(MINIMAL).unwrap();
        assert_eq!(c.params, ParamsConfig::default());
        assert_eq!(c.output.formats, vec![OutputFormat::Csv, OutputFormat::Json]);
        assert_eq!(c.algorithm, AlgorithmName::Woga);
    }

    #[test]
    fn invalid_weakness_names_the_field() {
        let text = MINIMAL.replace("\"m_max\": 10", "\"m_max\": 10, \"params\": {\"t\": 1.5}");
        match RunConfig::from_json(&text) {
            Err(HarnessError::Config { field, .. }) => assert_eq!(field, "params.t"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = MINIMAL.replace("\"m_max\": 10", "\"m_max\": 10, \"colour\": 3");
        match RunConfig::from_json(&text) {
            Err(HarnessError::Config { field, .. }) => assert_eq!(field, "colour"),
            other => panic!("{other:?}"),
        }
        let text = MINIMAL.replace("{\"kind\": \"canonical\"}", "{\"kind\": \"canonical\", \"n\": 3}");
        assert!(RunConfig::from_json(&text).is_err());
    }

    #[test]
    fn seed_is_mandatory() {
        let text = MINIMAL.replace("\"seed\": 1,", "");
        match RunConfig::from_json(&text) {
            Err(HarnessError::Config { field, .. }) => assert_eq!(field, "seed"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_dictionary_file_is_a_config_error() {
        let text = MINIMAL.replace("{\"kind\": \"canonical\"}", "{\"kind\": \"file\", \"path\": \"/no/such/dict.csv\"}");
        let e = RunConfig::from_json(&text).unwrap_err();
        assert!(matches!(&e, HarnessError::Config { field, .. } if field == "dictionary.path"), "{e}");
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn target_length_is_checked() {
        let text = MINIMAL.replace("[1.0, 1.0]", "[1.0]");
        assert!(matches!(RunConfig::from_json(&text), Err(HarnessError::Config { field, .. }) if field == "target.values"));
    }

    #[test]
    fn serialization_round_trips() {
        let c = RunConfig::from_json(MINIMAL).unwrap();
        let again = RunConfig::from_json(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(c, again);
    }
}
