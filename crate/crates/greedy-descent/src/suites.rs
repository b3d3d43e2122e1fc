//! Verification suites. Each suite runs seeded trials in parallel, merges
//! them in seed order and aggregates pass counts; trial failures and errors
//! are report contents, never aborts.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use greedy_descent_core::descent::{
    check_energy, check_equivalence_co, check_rate_recursion, energy_modulus_estimate, run_wcga_co, run_wgafr_co,
    sample_level_set,
    EnergyCheckConfig, QuadraticEnergy,
};
use greedy_descent_core::dictionary::{
    beta_bruteforce, beta_canonical, beta_cardinality_bound, beta_upper, check_r1_beta, covering_from_beta,
    dictionary_from_covering, equispaced_circle_covering, grid_resolution_for, min_circle_centers, verify_covering,
};
use greedy_descent_core::greedy::{guaranteed_contraction, run_dga};
use greedy_descent_core::spaces::estimate_modulus;
use greedy_descent_core::verify::{check_lebesgue, LebesgueConfig};
use greedy_descent_core::{sampling, Dictionary, GreedyConfig, SmoothSpace};
use rayon::prelude::*;
use serde_json::Value;

use crate::config::{AlgorithmName, ChecksConfig, DictionaryRecipe, ParamsConfig, RateCheck, RunConfig, SpaceConfig, TargetConfig};
use crate::error::{HarnessError, Result};
use crate::experiment::run_experiment;
use crate::report::{write_json, Metrics, MetricsExt, Report, SuiteReport};

/// Suite identifiers accepted by [`run_suite`].
pub const SUITES: [&str; 13] = [
    "T1_1",
    "T1_2",
    "T2_4",
    "T3_1",
    "T3_3",
    "eq_2_6",
    "eq_2_8",
    "lemma_2_1",
    "lemma_2_2",
    "sec_3_1_equiv",
    "beta_canonical",
    "dga",
    "self_checks",
];

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    /// Number of seeded trials; each suite has its own default.
    pub seeds: Option<usize>,
    /// Trials not started within this wall-clock budget are reported as skipped.
    pub budget_secs: f64,
    /// Directory for the suite report and trace artifacts.
    pub out: Option<PathBuf>,
    /// Worker threads; `None` uses the rayon default.
    pub workers: Option<usize>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { seeds: None, budget_secs: 600.0, out: None, workers: None }
    }
}

struct Ctx {
    suite: &'static str,
    out: Option<PathBuf>,
    deadline: Instant,
}

impl Ctx {
    fn dir(&self) -> Option<PathBuf> {
        self.out.as_ref().map(|d| d.join(self.suite))
    }

    /// Runs `f` for every seed, in parallel, keeping seed order.
    fn trials<F>(&self, seeds: &[u64], f: F) -> Vec<Report>
    where
        F: Fn(u64) -> Result<Report> + Sync,
    {
        seeds
            .par_iter()
            .map(|&s| {
                if Instant::now() > self.deadline {
                    let mut m = Metrics::new();
                    m.flag("skipped", true);
                    return self.bare(s, m, false);
                }
                f(s).unwrap_or_else(|e| {
                    let mut m = Metrics::new();
                    m.text("error", e.to_string());
                    self.bare(s, m, false)
                })
            })
            .collect()
    }

    fn bare(&self, seed: u64, metrics: Metrics, pass: bool) -> Report {
        Report { suite: self.suite.to_string(), config: Value::Null, seed, metrics, pass, artifacts: Vec::new() }
    }

    /// Runs a configured experiment with artifacts under the suite directory.
    fn experiment(&self, cfg: &RunConfig, stem: &str) -> Result<Report> {
        Ok(run_experiment(cfg, self.suite, self.dir().as_deref(), stem)?.0)
    }
}

/// Joins experiment reports of one trial under `name.` prefixes.
fn combine(suite: &str, seed: u64, parts: Vec<(&str, Report)>, mut metrics: Metrics, pass: bool) -> Report {
    let mut config = serde_json::Map::new();
    let mut artifacts = Vec::new();
    for (name, r) in parts {
        config.insert(name.to_string(), r.config);
        for (k, v) in r.metrics {
            metrics.insert(format!("{name}.{k}"), v);
        }
        metrics.insert(format!("{name}.pass"), Value::from(r.pass));
        artifacts.extend(r.artifacts);
    }
    Report { suite: suite.to_string(), config: Value::Object(config), seed, metrics, pass, artifacts }
}

fn flag(r: &Report, key: &str) -> bool {
    r.metrics.get(key).and_then(Value::as_bool).unwrap_or(false)
}

fn count(trials: &[Report], key: &str) -> usize {
    trials.iter().filter(|r| flag(r, key)).count()
}

fn required(n: usize, fraction: f64) -> usize {
    (fraction * n as f64).ceil() as usize
}

fn seeds(opts: &SuiteOptions, default: usize) -> Vec<u64> {
    (0..opts.seeds.unwrap_or(default) as u64).collect()
}

fn run_config(seed: u64, d: usize, dictionary: DictionaryRecipe, algorithm: AlgorithmName, target: TargetConfig, m_max: usize) -> RunConfig {
    RunConfig {
        seed,
        space: SpaceConfig { d, p: 2.0, q: None, gamma: None },
        dictionary: Some(dictionary),
        algorithm,
        params: ParamsConfig::default(),
        target,
        energy: None,
        m_max,
        checks: ChecksConfig::default(),
        output: Default::default(),
        verbosity: 0,
        workers: None,
    }
}

pub fn run_suite(name: &str, opts: &SuiteOptions) -> Result<SuiteReport> {
    let suite = SUITES.iter().copied().find(|s| *s == name).ok_or_else(|| HarnessError::UnknownSuite(name.to_string()))?;
    if !(opts.budget_secs > 0.0) {
        return Err(HarnessError::config("budget_secs", "must be positive"));
    }
    if opts.seeds == Some(0) {
        return Err(HarnessError::config("seeds", "must be at least 1"));
    }
    let ctx = Ctx {
        suite,
        out: opts.out.clone(),
        deadline: Instant::now() + Duration::from_secs_f64(opts.budget_secs.min(1e9)),
    };
    let body = || -> (Vec<Report>, Metrics, bool) {
        match suite {
            "T1_1" => greedy_rates(&ctx, opts),
            "T1_2" => wgafr_descent_rate(&ctx, opts),
            "T2_4" => cardinality_bound(&ctx, opts),
            "T3_1" => descent_rates(&ctx, opts),
            "T3_3" => radius_times_beta(&ctx, opts),
            "eq_2_6" => exponential_decay(&ctx, opts),
            "eq_2_8" => lebesgue(&ctx, opts),
            "lemma_2_1" => covering_to_beta(&ctx),
            "lemma_2_2" => beta_to_covering(&ctx),
            "sec_3_1_equiv" => equivalence(&ctx, opts),
            "beta_canonical" => canonical_beta(&ctx),
            "dga" => dual_greedy(&ctx, opts),
            "self_checks" => self_checks(&ctx),
            _ => unreachable!(),
        }
    };
    let (trials, mut metrics, pass) = match opts.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| HarnessError::config("workers", e.to_string()))?
            .install(body),
        None => body(),
    };
    let skipped = count(&trials, "skipped");
    metrics.int("trials", trials.len());
    metrics.int("skipped", skipped);
    metrics.int("errors", trials.iter().filter(|r| r.metrics.contains_key("error")).count());
    let report = SuiteReport { suite: suite.to_string(), pass: pass && skipped == 0, metrics, trials };
    if let Some(dir) = &opts.out {
        write_json(&suite_report_path(dir, suite), &report)?;
    }
    Ok(report)
}

pub fn suite_report_path(dir: &Path, suite: &str) -> PathBuf {
    dir.join(format!("{suite}.json"))
}

type SuiteOut = (Vec<Report>, Metrics, bool);

// --- rates in A_1(D) -----------------------------------------------------

const RATE_D: usize = 16;
const RATE_N: usize = 64;
const RATE_M: usize = 256;
const RATE_ATOMS: usize = 20;
const NOISE_EPS: f64 = 1e-3;

fn rate_config(seed: u64, alg: AlgorithmName, noise: f64, max_slope: f64) -> RunConfig {
    let mut c = run_config(
        seed,
        RATE_D,
        DictionaryRecipe::RandomSphere { n: RATE_N, seed: None },
        alg,
        TargetConfig::AtomCombination { atoms: RATE_ATOMS, budget: 1.0, noise },
        RATE_M,
    );
    c.params.stop_norm = 0.0;
    if noise > 0.0 {
        c.checks.max_final = Some(2.0 * noise * 1.5);
    } else {
        c.checks.rate = Some(RateCheck { window: (16, 256), max_slope, floor: 1e-12 });
    }
    c
}

fn greedy_rates(ctx: &Ctx, opts: &SuiteOptions) -> SuiteOut {
    let algs = [AlgorithmName::Wcga, AlgorithmName::Wgafr, AlgorithmName::Woga];
    let seeds = seeds(opts, 10);
    let trials = ctx.trials(&seeds, |s| {
        let mut parts = Vec::new();
        let (mut rate_ok, mut noise_ok) = (true, true);
        for alg in algs {
            let r = ctx.experiment(&rate_config(s, alg, 0.0, -0.4), &format!("seed-{s:03}-{}", alg.as_str()))?;
            rate_ok &= r.pass;
            parts.push((alg.as_str(), r));
        }
        for (alg, key) in algs.iter().zip(["wcga_noise", "wgafr_noise", "woga_noise"]) {
            let r = ctx.experiment(&rate_config(s, *alg, NOISE_EPS, -0.4), &format!("seed-{s:03}-{key}"))?;
            noise_ok &= r.pass;
            parts.push((key, r));
        }
        let mut m = Metrics::new();
        m.flag("rate_pass", rate_ok);
        m.flag("noise_pass", noise_ok);
        Ok(combine(ctx.suite, s, parts, m, rate_ok && noise_ok))
    });
    let need = required(seeds.len(), 0.8);
    let (rate, noise) = (count(&trials, "rate_pass"), count(&trials, "noise_pass"));
    let mut m = Metrics::new();
    m.int("rate_pass_seeds", rate);
    m.int("noise_pass_seeds", noise);
    m.int("required_seeds", need);
    (trials, m, rate >= need && noise >= need)
}

fn descent_rate_suite(ctx: &Ctx, opts: &SuiteOptions, algs: &[AlgorithmName]) -> (Vec<Report>, usize, usize) {
    let seeds = seeds(opts, 10);
    let trials = ctx.trials(&seeds, |s| {
        let mut parts = Vec::new();
        let mut ok = true;
        for &alg in algs {
            let r = ctx.experiment(&rate_config(s, alg, 0.0, -0.8), &format!("seed-{s:03}-{}", alg.as_str()))?;
            ok &= r.pass;
            parts.push((alg.as_str(), r));
        }
        let mut m = Metrics::new();
        m.flag("rate_pass", ok);
        Ok(combine(ctx.suite, s, parts, m, ok))
    });
    let need = required(seeds.len(), 0.8);
    let passed = count(&trials, "rate_pass");
    (trials, passed, need)
}

fn wgafr_descent_rate(ctx: &Ctx, opts: &SuiteOptions) -> SuiteOut {
    let (trials, passed, need) = descent_rate_suite(ctx, opts, &[AlgorithmName::WgafrCo]);
    let mut m = Metrics::new();
    m.int("rate_pass_seeds", passed);
    m.int("required_seeds", need);
    (trials, m, passed >= need)
}

fn descent_rates(ctx: &Ctx, opts: &SuiteOptions) -> SuiteOut {
    let (mut trials, passed, need) = descent_rate_suite(ctx, opts, &[AlgorithmName::WcgaCo, AlgorithmName::WgafrCo]);
    // one-step recursion with the certified beta of canonical bases
    let dims = [2usize, 4, 8];
    let rec = ctx.trials(&[0, 1, 2], |i| {
        let d = dims[i as usize];
        let dict = Dictionary::canonical(SmoothSpace::euclidean(d));
        let beta = beta_canonical(dict.space()).lower.expect("exact");
        let y = sampling::gaussian(&mut sampling::substream(i, 3), d);
        let e = QuadraticEnergy::new(y)?;
        let cfg = GreedyConfig { max_iter: 64, stop_norm: 0.0, beta_lower: Some(beta), ..GreedyConfig::default() };
        let mut m = Metrics::new();
        m.int("d", d);
        let mut ok = true;
        for (name, t) in [("wcga_co", run_wcga_co(&e, &dict, &cfg)?), ("wgafr_co", run_wgafr_co(&e, &dict, &cfg)?)] {
            let r = check_rate_recursion(&t)?;
            m.num(&format!("{name}.b"), r.b);
            m.int(&format!("{name}.checked"), r.checked);
            m.num(&format!("{name}.worst_bound_ratio"), r.worst_bound_ratio);
            ok &= r.pass();
        }
        m.flag("recursion_pass", ok);
        Ok(ctx.bare(1000 + i, m, ok))
    });
    let rec_ok = count(&rec, "recursion_pass");
    trials.extend(rec);
    let mut m = Metrics::new();
    m.int("rate_pass_seeds", passed);
    m.int("required_seeds", need);
    m.int("recursion_pass", rec_ok);
    (trials, m, passed >= need && rec_ok == dims.len())
}

// --- beta and coverings ---------------------------------------------------

fn canonical_beta(ctx: &Ctx) -> SuiteOut {
    // (d, method, tolerance)
    let cases: [(usize, &str, f64); 5] =
        [(2, "grid", 1e-4), (3, "grid", 1e-3), (4, "multistart", 1e-3), (16, "multistart", 1e-3), (64, "multistart", 1e-3)];
    let trials = ctx.trials(&[0, 1, 2, 3, 4], |i| {
        let (d, method, tol) = cases[i as usize];
        let dict = Dictionary::canonical(SmoothSpace::euclidean(d));
        let est = match method {
            "grid" => beta_bruteforce(&dict, if d == 2 { 1_000_000 } else { grid_resolution_for(3, tol)? })?,
            _ => beta_upper(&dict, 64, i)?,
        };
        let exact = 1.0 / (d as f64).sqrt();
        let err = (est.upper - exact).abs();
        let mut m = Metrics::new();
        m.int("d", d);
        m.text("method", est.method.as_str());
        m.num("upper", est.upper);
        if let Some(lo) = est.lower {
            m.num("lower", lo);
        }
        m.num("exact", exact);
        m.num("deviation", err);
        m.num("tolerance", tol);
        let ok = err <= tol && est.lower.is_none_or(|lo| lo <= exact + 1e-12);
        Ok(ctx.bare(i, m, ok))
    });
    let ok = trials.iter().all(|r| r.pass);
    (trials, Metrics::new(), ok)
}

fn covering_to_beta(ctx: &Ctx) -> SuiteOut {
    let radii = [0.3, 0.5, 0.7];
    let trials = ctx.trials(&[0, 1, 2], |i| {
        let r = radii[i as usize];
        let n = min_circle_centers(r)?;
        let cov = equispaced_circle_covering(n, r)?;
        let rep = verify_covering(&cov, 100_000, i);
        let dict = dictionary_from_covering(&cov)?;
        let beta = beta_bruteforce(&dict, grid_resolution_for(2, 1e-4)?)?;
        let claim = (1.0 - r * r).sqrt();
        let lower = beta.lower.unwrap_or(0.0);
        let mut m = Metrics::new();
        m.num("radius", r);
        m.int("centers", n);
        m.flag("covering_verified", rep.pass());
        m.num("beta_lower", lower);
        m.num("beta_upper", beta.upper);
        m.num("claimed", claim);
        Ok(ctx.bare(i, m, rep.pass() && lower >= claim - 1e-3))
    });
    let ok = trials.iter().all(|r| r.pass);
    (trials, Metrics::new(), ok)
}

fn beta_to_covering(ctx: &Ctx) -> SuiteOut {
    let trials = ctx.trials(&[2, 3], |d| {
        let dict = Dictionary::canonical(SmoothSpace::euclidean(d as usize));
        let beta = beta_canonical(dict.space()).lower.expect("exact");
        let lc = covering_from_beta(&dict, beta)?;
        let rep = verify_covering(&lc.covering, 100_000, d);
        let mut m = Metrics::new();
        m.int("d", d as usize);
        m.num("beta", lc.beta);
        m.flag("capped", lc.capped);
        m.num("radius", lc.covering.radius());
        m.int("samples", rep.samples);
        m.int("covered", rep.covered);
        m.num("worst_gap", rep.worst_gap);
        Ok(ctx.bare(d, m, rep.pass()))
    });
    let ok = trials.iter().all(|r| r.pass);
    (trials, Metrics::new(), ok)
}

const HIGH_DIM: usize = 16;
const HIGH_DIM_TRIALS: u64 = 10;

fn cardinality_bound(ctx: &Ctx, opts: &SuiteOptions) -> SuiteOut {
    let seeds = seeds(opts, 100);
    let res = grid_resolution_for(3, 1e-3).expect("d = 3");
    let mut trials = ctx.trials(&seeds, |s| {
        let a = if s % 2 == 0 { 2.0 } else { 3.0 };
        let cap = 3f64.powf(a) as usize;
        let n = 3 + sampling::index(&mut sampling::substream(s, 5), cap - 2);
        let dict = Dictionary::random_sphere(SmoothSpace::euclidean(3), n, s)?;
        let bound = beta_cardinality_bound(3, a)?;
        let beta = beta_bruteforce(&dict, res)?;
        let applies = bound < 1.0;
        let mut m = Metrics::new();
        m.num("a", a);
        m.int("n_atoms", n);
        m.num("bound", bound);
        m.flag("bound_applies", applies);
        m.num("beta_upper", beta.upper);
        m.num("beta_lower", beta.lower.unwrap_or(0.0));
        Ok(ctx.bare(s, m, !applies || beta.upper <= bound + 1e-3))
    });
    // d = 16, N = d^2: the bound is below 1 and the multistart value, an
    // upper bound on beta, is checked against it
    let high_seeds: Vec<u64> = (0..HIGH_DIM_TRIALS).map(|s| 10_000 + s).collect();
    let high = ctx.trials(&high_seeds, |s| {
        let n = HIGH_DIM * HIGH_DIM;
        let dict = Dictionary::random_sphere(SmoothSpace::euclidean(HIGH_DIM), n, s)?;
        let bound = beta_cardinality_bound(HIGH_DIM, 2.0)?;
        let beta = beta_upper(&dict, 16, s)?;
        let mut m = Metrics::new();
        m.int("d", HIGH_DIM);
        m.int("n_atoms", n);
        m.num("bound", bound);
        m.flag("bound_applies", bound < 1.0);
        m.num("beta_upper", beta.upper);
        m.flag("high_dim", true);
        Ok(ctx.bare(s, m, beta.upper <= bound + 1e-3))
    });
    let low_ok = trials.iter().filter(|r| r.pass).count();
    let high_ok = high.iter().filter(|r| r.pass).count();
    let applicable = count(&trials, "bound_applies");
    trials.extend(high);
    let mut m = Metrics::new();
    m.int("d3_pass", low_ok);
    m.int("d3_bound_applies", applicable);
    m.int("d16_pass", high_ok);
    (trials, m, low_ok == seeds.len() && high_ok == HIGH_DIM_TRIALS as usize)
}

fn radius_times_beta(ctx: &Ctx, opts: &SuiteOptions) -> SuiteOut {
    let random = opts.seeds.unwrap_or(5) as u64;
    let ids: Vec<u64> = (0..random + 2).collect();
    let trials = ctx.trials(&ids, |i| {
        let dict = match i {
            0 => Dictionary::canonical(SmoothSpace::euclidean(2)),
            1 => Dictionary::equiangular_2d(3)?,
            s => Dictionary::random_sphere(SmoothSpace::euclidean(2), 3 + (s as usize % 3), s)?,
        };
        let r = check_r1_beta(&dict, 64, i, 400)?;
        let mut m = Metrics::new();
        m.text("dictionary", dict.label());
        m.num("r1_lower", r.r1_lower);
        m.num("r1_upper", r.r1_upper);
        m.num("beta_lower", r.beta_lower);
        m.num("beta_upper", r.beta_upper);
        m.num("product_lower", r.product_lower);
        m.num("product_upper", r.product_upper);
        m.num("product_width", r.product_width());
        m.flag("contains_one", r.contains_one);
        Ok(ctx.bare(i, m, r.contains_one && r.product_width() <= 0.1))
    });
    let ok = trials.iter().all(|r| r.pass);
    (trials, Metrics::new(), ok)
}

// --- exponential decay, Lebesgue inequality, equivalence ------------------

fn exponential_decay(ctx: &Ctx, opts: &SuiteOptions) -> SuiteOut {
    let sp = SmoothSpace::euclidean(2);
    let beta = beta_canonical(&sp).lower.expect("exact");
    let factor = guaranteed_contraction(&sp, beta, 1.0).expect("valid").factor;
    let seeds = seeds(opts, 20);
    let trials = ctx.trials(&seeds, |s| {
        let f0 = sampling::gaussian(&mut sampling::substream(s, 1), 2);
        let mut parts = Vec::new();
        let mut ok = true;
        for alg in [AlgorithmName::Woga, AlgorithmName::Wcga] {
            let mut c = run_config(s, 2, DictionaryRecipe::Canonical {}, alg, TargetConfig::Vector { values: f0.clone() }, 50);
            c.params.stop_norm = 0.0;
            c.params.beta_lower = Some(beta);
            c.checks.exponential_factor = Some(factor);
            let r = ctx.experiment(&c, &format!("seed-{s:03}-{}", alg.as_str()))?;
            ok &= r.pass;
            parts.push((alg.as_str(), r));
        }
        let mut m = Metrics::new();
        m.num("factor", factor);
        Ok(combine(ctx.suite, s, parts, m, ok))
    });
    let passed = trials.iter().filter(|r| r.pass).count();
    let mut m = Metrics::new();
    m.num("factor", factor);
    m.int("pass_seeds", passed);
    (trials, m, passed == seeds.len())
}

const LEBESGUE_D: usize = 20;
const LEBESGUE_N: usize = 40;
const LEBESGUE_MU: f64 = 0.25;

fn lebesgue(ctx: &Ctx, opts: &SuiteOptions) -> SuiteOut {
    let seeds = seeds(opts, 20);
    // m = 3 at mu = 0.25 needs C3 >= 0.75
    let cfg = LebesgueConfig { c3: 0.75, ..LebesgueConfig::default() };
    let trials = ctx.trials(&seeds, |s| {
        let (dict, packing) = Dictionary::incoherent_refined(LEBESGUE_D, LEBESGUE_N, LEBESGUE_MU, 20_000, s)?;
        let mu = dict.coherence().value;
        let mut m = Metrics::new();
        m.int("n_atoms", packing.achieved);
        m.num("coherence", mu);
        let mut exact = packing.achieved == LEBESGUE_N && mu <= LEBESGUE_MU;
        let mut rng = sampling::substream(s, 1);
        for k in 1..=3usize {
            let cols = sampling::distinct_indices(&mut rng, dict.len(), k);
            let mut x = vec![0.0; dict.len()];
            for &j in &cols {
                let sign = if sampling::uniform(&mut rng) < 0.5 { -1.0 } else { 1.0 };
                x[j] = sign * (0.5 + sampling::uniform(&mut rng));
            }
            let r = check_lebesgue(&dict, &dict.combine(&x), k, &cfg)?;
            m.num(&format!("sparse_{k}.sigma"), r.sigma);
            m.num(&format!("sparse_{k}.residual"), r.residual);
            m.int(&format!("sparse_{k}.steps"), r.steps);
            exact &= r.sigma < 1e-12 && r.residual <= 1e-8;
        }
        // generic target: raw ratio against the configured C2
        let f0 = sampling::gaussian(&mut rng, LEBESGUE_D);
        let r = check_lebesgue(&dict, &f0, 2, &cfg)?;
        m.num("generic.sigma", r.sigma);
        m.num("generic.residual", r.residual);
        m.num("generic.ratio", r.ratio.unwrap_or(0.0));
        m.flag("generic_pass", r.pass);
        m.flag("exact_pass", exact);
        Ok(ctx.bare(s, m, exact))
    });
    let exact = count(&trials, "exact_pass");
    let generic = count(&trials, "generic_pass");
    let mut m = Metrics::new();
    m.int("exact_pass_seeds", exact);
    m.int("ratio_pass_seeds", generic);
    m.int("ratio_required_seeds", required(seeds.len(), 0.9));
    (trials, m, exact == seeds.len() && generic >= required(seeds.len(), 0.9))
}

fn equivalence(ctx: &Ctx, opts: &SuiteOptions) -> SuiteOut {
    let seeds = seeds(opts, 50);
    let trials = ctx.trials(&seeds, |s| {
        let d = 2 + (s as usize % 15);
        let n = d + 1 + (s as usize * 7) % (2 * d);
        let dict = Dictionary::random_sphere(SmoothSpace::euclidean(d), n, s)?;
        let f0 = sampling::gaussian(&mut sampling::substream(s, 7), d);
        let r = check_equivalence_co(&f0, &dict, &GreedyConfig { max_iter: 3 * d, ..GreedyConfig::default() })?;
        let mut m = Metrics::new();
        m.int("d", d);
        m.int("n_atoms", n);
        m.int("compared", r.compared);
        m.flag("identical", r.identical());
        m.opt_int("first_divergence", r.first_divergence);
        m.int("near_ties", r.near_ties);
        m.int("trailing_steps", r.trailing_steps);
        m.num("max_energy_error", r.max_energy_error);
        Ok(ctx.bare(s, m, r.pass()))
    });
    let passed = trials.iter().filter(|r| r.pass).count();
    let mut m = Metrics::new();
    m.int("pass_seeds", passed);
    (trials, m, passed == seeds.len())
}

// --- dual greedy expansion ------------------------------------------------

fn dual_greedy(ctx: &Ctx, opts: &SuiteOptions) -> SuiteOut {
    let seeds = seeds(opts, 20);
    let (t, b) = (1.0, 0.5);
    let mut trials = ctx.trials(&seeds, |s| {
        let d = 8;
        let dict = Dictionary::random_sphere(SmoothSpace::euclidean(d), 16, s)?;
        let f0 = sampling::gaussian(&mut sampling::substream(s, 1), d);
        let n0 = dict.space().norm_of(&f0);
        let cfg = GreedyConfig { t, b, max_iter: 10_000, stop_norm: 1e-3 * n0, ..GreedyConfig::default() };
        let run = run_dga(&f0, &dict, &cfg)?;
        let norms = run.trace.residual_norms();
        let mut worst: f64 = f64::NEG_INFINITY;
        for (k, st) in run.trace.steps.iter().enumerate() {
            let slack = t * (1.0 - b) * st.step_coefficient * st.sup - (norms[k] - norms[k + 1]);
            worst = worst.max(slack);
        }
        let converged = run.trace.final_norm() <= 1e-3 * n0;
        let decrease = worst <= 1e-10;
        let mut m = Metrics::new();
        m.int("steps", run.trace.steps.len());
        m.num("relative_final", run.trace.final_norm() / n0);
        m.num("worst_decrease_slack", worst);
        m.flag("converged", converged);
        m.flag("decrease_pass", decrease);
        Ok(ctx.bare(s, m, converged && decrease))
    });
    let sum_seeds: Vec<u64> = (0..4).map(|i| 5_000 + i).collect();
    let sums = ctx.trials(&sum_seeds, |s| {
        let dict = Dictionary::canonical(SmoothSpace::euclidean(2));
        let f0 = sampling::gaussian(&mut sampling::substream(s, 1), 2);
        let n0 = dict.space().norm_of(&f0);
        let run = run_dga(&f0, &dict, &GreedyConfig { t, b, max_iter: 10_000, stop_norm: 1e-14 * n0, ..GreedyConfig::default() })?;
        let bound = n0 * std::f64::consts::SQRT_2 / (t * (1.0 - b)) + 1e-6;
        let mut m = Metrics::new();
        m.num("coefficient_sum", run.coefficient_sum);
        m.num("bound", bound);
        m.flag("sum_pass", run.coefficient_sum <= bound);
        Ok(ctx.bare(s, m, run.coefficient_sum <= bound))
    });
    let converged = trials.iter().filter(|r| r.pass).count();
    let sum_ok = sums.iter().filter(|r| r.pass).count();
    trials.extend(sums);
    let mut m = Metrics::new();
    m.int("pass_seeds", converged);
    m.int("sum_pass", sum_ok);
    (trials, m, converged == seeds.len() && sum_ok == sum_seeds.len())
}

// --- numerical self-checks ------------------------------------------------

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

fn self_checks(ctx: &Ctx) -> SuiteOut {
    let exponents = [1.2, 1.5, 2.0, 3.0, 6.0];
    let trials = ctx.trials(&[0, 1, 2, 3], |i| {
        let mut m = Metrics::new();
        let ok = match i {
            0 => {
                // dual norm 1 and F_x(x) = ||x||
                let mut worst: f64 = 0.0;
                for (k, &p) in exponents.iter().enumerate() {
                    for d in [2usize, 5, 16] {
                        let sp = SmoothSpace::lp(d, p)?;
                        let mut rng = sampling::substream(k as u64, d as u64);
                        for _ in 0..200 {
                            let x = sampling::gaussian(&mut rng, d);
                            let f = sp.norming_functional(&x)?;
                            let n = sp.norm_of(&x);
                            worst = worst.max((sp.dual_norm(&f) - 1.0).abs()).max((f.apply(&x) - n).abs() / n.max(1.0));
                        }
                    }
                }
                m.text("check", "norming_functional");
                m.num("worst_error", worst);
                worst <= 1e-10
            }
            1 => {
                // central differences of the norm against F_x(y) at u = 1e-5
                let mut worst: f64 = 0.0;
                for (k, &p) in exponents.iter().enumerate() {
                    for d in [2usize, 5, 16] {
                        let sp = SmoothSpace::lp(d, p)?;
                        let mut rng = sampling::substream(100 + k as u64, d as u64);
                        for _ in 0..200 {
                            let x = sp.random_unit(&mut rng);
                            let y = sp.random_unit(&mut rng);
                            let fd = sp.directional_derivative(&x, &y, 1e-5)?;
                            worst = worst.max((fd - sp.norming_functional(&x)?.apply(&y)).abs());
                        }
                    }
                }
                m.text("check", "directional_derivative");
                m.num("worst_error", worst);
                worst <= 1e-4
            }
            2 => {
                // gradient, convexity and sandwich on quadratic energies
                let (mut grad, mut sandwich, mut convex): (f64, f64, f64) = (0.0, 0.0, 0.0);
                let mut c0 = 0;
                for d in [3usize, 8, 16] {
                    let y = sampling::gaussian(&mut sampling::substream(200, d as u64), d);
                    let e = QuadraticEnergy::new(y)?;
                    let r = check_energy(&e, &EnergyCheckConfig::default(), d as u64)?;
                    grad = grad.max(r.gradient);
                    sandwich = sandwich.max(r.sandwich_lower).max(r.sandwich_upper);
                    convex = convex.max(r.convexity);
                    c0 += sample_level_set(&e, 200, d as u64)?.c0_violations;
                }
                m.text("check", "energy");
                m.num("gradient_error", grad);
                m.num("sandwich_violation", sandwich);
                m.num("convexity_violation", convex);
                m.int("c0_violations", c0);
                grad <= 1e-5 && sandwich <= 1e-9 && convex <= 1e-9 && c0 == 0
            }
            _ => {
                // empirical moduli under the declared gamma u^q
                let grid = log_grid(1e-3, 1.0, 16);
                let mut all = true;
                let mut rows = 0;
                for &p in &exponents {
                    for d in [2usize, 8] {
                        let t = estimate_modulus(&SmoothSpace::lp(d, p)?, &grid, 2000, 7)?;
                        rows += t.points.len();
                        all &= t.dominated();
                    }
                }
                let e = QuadraticEnergy::new(sampling::gaussian(&mut sampling::seeded(300), 6))?;
                let t = energy_modulus_estimate(&e, &grid, 500, 8)?;
                rows += t.points.len();
                all &= t.dominated();
                m.text("check", "modulus");
                m.int("rows", rows);
                all
            }
        };
        Ok(ctx.bare(i, m, ok))
    });
    let ok = trials.iter().all(|r| r.pass);
    (trials, Metrics::new(), ok)
}

/// Per-trial verdicts keyed by seed, for compact printing.
pub fn verdicts(report: &SuiteReport) -> BTreeMap<u64, bool> {
    report.trials.iter().map(|r| (r.seed, r.pass)).collect()
}
