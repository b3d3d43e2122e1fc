//! One deterministic experiment: dictionary, target and algorithm from a
//! [`RunConfig`], then the configured checks on the resulting trace.

use std::path::{Path, PathBuf};

use greedy_descent_core::descent::{
    lasso_recast, run_wcga_co, run_wgafr_co, DescentTrace, Energy, NormCompositeEnergy, Potential, QuadraticEnergy,
};
use greedy_descent_core::dictionary::PackingReport;
use greedy_descent_core::greedy::{run_dga, run_hybrid, run_wcga, run_wga, run_wgafr, run_woga, DgaRun};
use greedy_descent_core::verify::{assess_rate, check_exponential};
use greedy_descent_core::{sampling, Dictionary, GreedyConfig, SmoothSpace, Trace};

use crate::config::{AlgorithmName, DictionaryRecipe, OutputFormat, PotentialConfig, RunConfig, TargetConfig};
use crate::error::{HarnessError, Result};
use crate::formats::{self, descent_to_csv, trace_to_csv};
use crate::report::{write_json, Metrics, MetricsExt, Report};

/// Random streams derived from the experiment seed.
const TARGET_STREAM: u64 = 1;
const NOISE_STREAM: u64 = 2;

pub fn build_dictionary(recipe: &DictionaryRecipe, space: SmoothSpace, seed: u64) -> Result<(Dictionary, Option<PackingReport>)> {
    let need_l2 = |kind: &str| -> Result<()> {
        if space.is_euclidean() {
            Ok(())
        } else {
            Err(HarnessError::config("dictionary.kind", format!("`{kind}` packings live in l_2")))
        }
    };
    let map = |e| crate::config::field_error("dictionary", e);
    Ok(match recipe {
        DictionaryRecipe::Canonical {} => (Dictionary::canonical(space), None),
        DictionaryRecipe::RandomSphere { n, seed: s } => (Dictionary::random_sphere(space, *n, s.unwrap_or(seed)).map_err(map)?, None),
        DictionaryRecipe::Incoherent { n, mu, max_attempts, seed: s } => {
            need_l2("incoherent")?;
            let (d, r) = Dictionary::incoherent(space.dim(), *n, *mu, *max_attempts, s.unwrap_or(seed)).map_err(map)?;
            (d, Some(r))
        }
        DictionaryRecipe::IncoherentRefined { n, mu, max_steps, seed: s } => {
            need_l2("incoherent_refined")?;
            let (d, r) = Dictionary::incoherent_refined(space.dim(), *n, *mu, *max_steps, s.unwrap_or(seed)).map_err(map)?;
            (d, Some(r))
        }
        DictionaryRecipe::Equiangular { n } => {
            if space.dim() != 2 || !space.is_euclidean() {
                return Err(HarnessError::config("dictionary.kind", "`equiangular` needs l_2 with d = 2"));
            }
            (Dictionary::equiangular_2d(*n).map_err(map)?, None)
        }
        DictionaryRecipe::File { path } => {
            let d = formats::read_dictionary(path)?;
            if d.dim() != space.dim() || d.space().p() != space.p() {
                return Err(HarnessError::config(
                    "dictionary.path",
                    format!("file holds l_{}^{}, config declares l_{}^{}", d.space().p(), d.dim(), space.p(), space.dim()),
                ));
            }
            (d.with_space(space)?, None)
        }
    })
}

/// Random convex combination of `atoms` distinct signed columns, times `budget`.
pub fn atom_combination(dict: &Dictionary, atoms: usize, budget: f64, seed: u64) -> Vec<f64> {
    let mut rng = sampling::substream(seed, TARGET_STREAM);
    let k = atoms.min(dict.len());
    let cols = sampling::distinct_indices(&mut rng, dict.len(), k);
    let w: Vec<f64> = (0..k).map(|_| sampling::uniform(&mut rng) + 1e-3).collect();
    let total: f64 = w.iter().sum();
    let mut coeffs = vec![0.0; dict.len()];
    for (&j, wj) in cols.iter().zip(&w) {
        let sign = if sampling::uniform(&mut rng) < 0.5 { -1.0 } else { 1.0 };
        coeffs[j] = sign * budget * wj / total;
    }
    dict.combine(&coeffs)
}

/// Perturbation of ambient norm `eps`.
pub fn noise(space: &SmoothSpace, eps: f64, seed: u64) -> Vec<f64> {
    let mut rng = sampling::substream(seed, NOISE_STREAM);
    space.random_unit(&mut rng).into_iter().map(|v| eps * v).collect()
}

pub struct Prepared {
    pub space: SmoothSpace,
    pub dict: Dictionary,
    pub f0: Vec<f64>,
    pub eps: f64,
    pub packing: Option<PackingReport>,
    /// Column scales of a lasso instance.
    pub lasso_scales: Option<Vec<f64>>,
    pub greedy: GreedyConfig,
}

pub fn prepare(cfg: &RunConfig) -> Result<Prepared> {
    cfg.validate()?;
    let space = cfg.space.build()?;
    let greedy = cfg.params.greedy(cfg.m_max)?;
    if let TargetConfig::Lasso { phi, y } = &cfg.target {
        let phi_rows = formats::parse_matrix(phi, &formats::read_text(phi)?)?;
        let y = formats::parse_vector(y, &formats::read_text(y)?)?;
        if y.len() != space.dim() || phi_rows.len() != space.dim() {
            return Err(HarnessError::config(
                "space.d",
                format!("lasso instance has {} rows and |y| = {}, config declares d = {}", phi_rows.len(), y.len(), space.dim()),
            ));
        }
        let lr = lasso_recast(&phi_rows, &y).map_err(|e| crate::config::field_error("target", e))?;
        return Ok(Prepared {
            space,
            dict: lr.dictionary,
            f0: y,
            eps: 0.0,
            packing: None,
            lasso_scales: Some(lr.scales),
            greedy,
        });
    }
    let recipe = cfg.dictionary.as_ref().expect("validated");
    let (dict, packing) = build_dictionary(recipe, space, cfg.seed)?;
    let (f0, eps) = match &cfg.target {
        TargetConfig::Vector { values } => (values.clone(), 0.0),
        TargetConfig::AtomCombination { atoms, budget, noise: eps } => {
            let mut f = atom_combination(&dict, *atoms, *budget, cfg.seed);
            if *eps > 0.0 {
                for (a, b) in f.iter_mut().zip(noise(&space, *eps, cfg.seed)) {
                    *a += b;
                }
            }
            (f, *eps)
        }
        TargetConfig::Lasso { .. } => unreachable!(),
    };
    if space.norm_of(&f0) == 0.0 && !cfg.algorithm.is_descent() {
        return Err(HarnessError::config("target", "f_0 is the zero vector"));
    }
    Ok(Prepared { space, dict, f0, eps, packing, lasso_scales: None, greedy })
}

fn energy_for(cfg: &RunConfig, p: &Prepared) -> Result<Box<dyn Energy>> {
    let ec = cfg.energy.clone().unwrap_or_default();
    if ec.potential == PotentialConfig::HalfSquare && p.space.is_euclidean() && ec.q.is_none() && ec.gamma.is_none() {
        return Ok(Box::new(QuadraticEnergy::new(p.f0.clone())?));
    }
    let potential = match ec.potential {
        PotentialConfig::HalfSquare => Potential::HalfSquare,
        PotentialConfig::Identity => Potential::Identity,
        PotentialConfig::Power(k) => Potential::Power(k),
    };
    let q = ec.q.ok_or_else(|| HarnessError::config("energy.q", "required for non-quadratic energies"))?;
    let gamma = ec.gamma.ok_or_else(|| HarnessError::config("energy.gamma", "required for non-quadratic energies"))?;
    let e = NormCompositeEnergy::new(p.f0.clone(), potential, p.space, q, gamma).map_err(|e| crate::config::field_error("energy", e))?;
    Ok(Box::new(e))
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunTrace {
    Greedy(Trace),
    Dga(DgaRun),
    Descent(DescentTrace),
}

impl RunTrace {
    /// Residual norms, or energy gaps (energies without a known minimum), by `m`.
    pub fn values(&self) -> Vec<f64> {
        match self {
            RunTrace::Greedy(t) => t.residual_norms(),
            RunTrace::Dga(r) => r.trace.residual_norms(),
            RunTrace::Descent(t) => t.gaps().unwrap_or_else(|| t.energies()),
        }
    }

    pub fn csv(&self) -> String {
        match self {
            RunTrace::Greedy(t) => trace_to_csv(t),
            RunTrace::Dga(r) => trace_to_csv(&r.trace),
            RunTrace::Descent(t) => descent_to_csv(t),
        }
    }

    pub fn steps(&self) -> usize {
        self.values().len() - 1
    }

    pub fn termination(&self) -> &'static str {
        match self {
            RunTrace::Greedy(t) => t.termination.as_str(),
            RunTrace::Dga(r) => r.trace.termination.as_str(),
            RunTrace::Descent(t) => t.termination.as_str(),
        }
    }

    pub fn expansion(&self) -> &[f64] {
        match self {
            RunTrace::Greedy(t) => &t.expansion,
            RunTrace::Dga(r) => &r.trace.expansion,
            RunTrace::Descent(t) => &t.expansion,
        }
    }

    pub fn selected(&self) -> Vec<i64> {
        match self {
            RunTrace::Greedy(t) => t.selected().iter().map(|s| s.get()).collect(),
            RunTrace::Dga(r) => r.trace.selected().iter().map(|s| s.get()).collect(),
            RunTrace::Descent(t) => t.selected().iter().map(|s| s.get()).collect(),
        }
    }
}

pub fn execute(cfg: &RunConfig, p: &Prepared) -> Result<RunTrace> {
    let g = &p.greedy;
    Ok(match cfg.algorithm {
        AlgorithmName::Wcga => RunTrace::Greedy(run_wcga(&p.f0, &p.dict, g)?),
        AlgorithmName::Wgafr => RunTrace::Greedy(run_wgafr(&p.f0, &p.dict, g)?),
        AlgorithmName::Wga => RunTrace::Greedy(run_wga(&p.f0, &p.dict, g)?),
        AlgorithmName::Woga => RunTrace::Greedy(run_woga(&p.f0, &p.dict, g)?),
        AlgorithmName::Hybrid => RunTrace::Greedy(run_hybrid(&p.f0, &p.dict, g, cfg.params.switch_iter)?),
        AlgorithmName::Dga => RunTrace::Dga(run_dga(&p.f0, &p.dict, g)?),
        AlgorithmName::WcgaCo => RunTrace::Descent(run_wcga_co(energy_for(cfg, p)?.as_ref(), &p.dict, g)?),
        AlgorithmName::WgafrCo => RunTrace::Descent(run_wgafr_co(energy_for(cfg, p)?.as_ref(), &p.dict, g)?),
    })
}

/// Metrics of a finished run and the verdict of the configured checks.
pub fn evaluate(cfg: &RunConfig, p: &Prepared, trace: &RunTrace) -> Result<(Metrics, bool)> {
    let values = trace.values();
    let mut m = Metrics::new();
    let mut pass = true;
    m.text("algorithm", cfg.algorithm.as_str());
    m.text("dictionary", p.dict.label());
    m.int("d", p.dict.dim());
    m.int("n_atoms", p.dict.len());
    m.int("steps", trace.steps());
    m.text("termination", trace.termination());
    m.num("initial", values[0]);
    m.num("final", *values.last().expect("non-empty"));
    m.text("trace_quantity", if matches!(trace, RunTrace::Descent(_)) { "energy_gap" } else { "residual_norm" });
    if p.eps > 0.0 {
        m.num("noise", p.eps);
        m.num("final_over_noise", values.last().copied().unwrap_or(0.0) / p.eps);
    }
    if let Some(r) = &p.packing {
        m.int("packing_achieved", r.achieved);
        m.num("coherence", p.dict.coherence().value);
    }
    match trace {
        RunTrace::Dga(r) => m.num("coefficient_sum", r.coefficient_sum),
        RunTrace::Greedy(t) => m.opt_int("switch_at", t.switch_at),
        RunTrace::Descent(t) => {
            if let Some(b) = t.proof_b {
                m.num("proof_b", b);
            }
        }
    }
    if let Some(scales) = &p.lasso_scales {
        let x: Vec<f64> = trace.expansion().iter().zip(scales).map(|(c, s)| c / s).collect();
        m.list("lasso_solution", &x);
    }
    if let Some(rc) = &cfg.checks.rate {
        let a = assess_rate(&values, rc.window, rc.max_slope, rc.floor * values[0])?;
        if let Some(f) = a.fit {
            m.num("rate_slope", f.slope);
            m.num("rate_r_squared", f.r_squared);
            m.int("rate_points", f.points);
        }
        m.opt_int("exact_at", a.exact_at);
        m.flag("rate_pass", a.pass);
        pass &= a.pass;
    }
    if let Some(bound) = cfg.checks.max_final {
        let ok = *values.last().expect("non-empty") <= bound;
        m.flag("max_final_pass", ok);
        pass &= ok;
    }
    if let Some(factor) = cfg.checks.exponential_factor {
        let r = check_exponential(&values, factor)?;
        m.opt_int("exponential_first_violation", r.first_violation);
        m.num("exponential_worst_ratio", r.worst_ratio);
        pass &= r.pass();
    }
    Ok((m, pass))
}

/// File names of a run's artifacts inside the output directory.
pub fn artifact_paths(dir: &Path, stem: &str, trace: &RunTrace) -> (PathBuf, PathBuf) {
    let kind = if matches!(trace, RunTrace::Descent(_)) { "descent" } else { "trace" };
    (dir.join(format!("{stem}.{kind}.csv")), dir.join(format!("{stem}.report.json")))
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Runs the experiment and, when `out` is given, writes the trace CSV and
/// report JSON selected by `output.formats`.
pub fn run_experiment(cfg: &RunConfig, suite: &str, out: Option<&Path>, stem: &str) -> Result<(Report, RunTrace)> {
    let p = prepare(cfg)?;
    let trace = execute(cfg, &p)?;
    let (metrics, pass) = evaluate(cfg, &p, &trace)?;
    let mut report = Report {
        suite: suite.to_string(),
        config: serde_json::to_value(cfg).expect("config serializes"),
        seed: cfg.seed,
        metrics,
        pass,
        artifacts: Vec::new(),
    };
    if let Some(dir) = out {
        let (csv_path, json_path) = artifact_paths(dir, stem, &trace);
        if cfg.output.formats.contains(&OutputFormat::Csv) {
            formats::write_text(&csv_path, &trace.csv())?;
            report.artifacts.push(file_name(&csv_path));
        }
        if cfg.output.formats.contains(&OutputFormat::Json) {
            write_json(&json_path, &report)?;
        }
    }
    Ok((report, trace))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> RunConfig {
        RunConfig::from_json(text).unwrap()
    }

    #[test]
    fn atom_combination_lies_in_the_scaled_hull() {
        let d = Dictionary::random_sphere(SmoothSpace::euclidean(5), 12, 1).unwrap();
        let f = atom_combination(&d, 4, 2.0, 9);
        // ||f|| <= budget since every atom has norm 1
        assert!(greedy_descent_core::linalg::norm2(&f) <= 2.0 + 1e-12);
        assert_eq!(f, atom_combination(&d, 4, 2.0, 9));
    }

    #[test]
    fn noise_has_requested_norm() {
        let sp = SmoothSpace::lp(6, 3.0).unwrap();
        assert!((sp.norm_of(&noise(&sp, 1e-3, 4)) - 1e-3).abs() < 1e-15);
    }

    #[test]
    fn minimal_woga_run() {
        let c = cfg(r#"{"seed": 1, "space": {"d": 2}, "dictionary": {"kind": "canonical"},
            "algorithm": "woga", "target": {"kind": "vector", "values": [1.0, 1.0]}, "m_max": 10}"#);
        let (r, t) = run_experiment(&c, "run", None, "x").unwrap();
        assert!(r.pass);
        assert_eq!(t.values(), vec![2f64.sqrt(), 1.0, 0.0]);
        assert_eq!(t.csv().lines().count(), 3);
    }

    #[test]
    fn quadratic_descent_reports_gaps() {
        let c = cfg(r#"{"seed": 2, "space": {"d": 3}, "dictionary": {"kind": "canonical"},
            "algorithm": "wcga_co", "target": {"kind": "vector", "values": [1.0, -2.0, 0.5]}, "m_max": 10,
            "checks": {"max_final": 1e-20}}"#);
        let (r, t) = run_experiment(&c, "run", None, "x").unwrap();
        assert!(matches!(t, RunTrace::Descent(_)));
        assert_eq!(r.metrics["trace_quantity"], "energy_gap");
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn non_quadratic_energy_needs_smoothness() {
        let c = cfg(r#"{"seed": 2, "space": {"d": 3, "p": 3.0}, "dictionary": {"kind": "canonical"},
            "algorithm": "wcga_co", "target": {"kind": "vector", "values": [1.0, -2.0, 0.5]}, "m_max": 10}"#);
        let p = prepare(&c).unwrap();
        assert!(matches!(execute(&c, &p), Err(HarnessError::Config { field, .. }) if field == "energy.q"));
    }

    #[test]
    fn failing_check_reports_failure() {
        let c = cfg(r#"{"seed": 1, "space": {"d": 4}, "dictionary": {"kind": "random_sphere", "n": 9},
            "algorithm": "wga", "target": {"kind": "atom_combination", "atoms": 3}, "m_max": 3,
            "checks": {"max_final": 1e-30}}"#);
        let (r, _) = run_experiment(&c, "run", None, "x").unwrap();
        assert!(!r.pass);
        assert_eq!(r.metrics["max_final_pass"], false);
    }
}
