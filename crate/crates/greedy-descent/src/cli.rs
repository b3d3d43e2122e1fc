//! Command-line front end. [`main_with`] parses arguments and maps every
//! outcome to an exit code: 0 success, 1 failed check or invariant, 2 bad
//! arguments or configuration.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use greedy_descent_core::dictionary::{beta_bruteforce, beta_upper, grid_resolution_for};
use greedy_descent_core::{Dictionary, SmoothSpace};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::{HarnessError, Result};
use crate::experiment::run_experiment;
use crate::formats::{dictionary_to_csv, parse_dictionary_raw, read_text, write_text};
use crate::report::{float_value, to_json};
use crate::suites::{run_suite, suite_report_path, SuiteOptions, SUITES};

#[derive(Debug, Parser)]
#[command(name = "greedy-descent", version, about = "Greedy approximation and greedy convex descent experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one experiment from a JSON configuration; writes the trace CSV and report JSON.
    Run {
        /// Experiment configuration (JSON).
        config: PathBuf,
        /// Output directory; overrides `output.dir` of the configuration.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build or inspect dictionary CSV files.
    Dict {
        #[command(subcommand)]
        command: DictCommand,
    },
    /// Run a verification suite; exit 0 iff every assertion passes.
    Verify(VerifyArgs),
}

#[derive(Debug, Subcommand)]
pub enum DictCommand {
    /// Build a dictionary and write it as CSV.
    Build(BuildArgs),
    /// Print dimension, size, coherence, beta bracket and column-norm range as JSON.
    Inspect {
        /// Dictionary CSV.
        file: PathBuf,
        /// Multistart restarts for the beta upper bound when d > 3.
        #[arg(long, default_value_t = 16)]
        restarts: usize,
        /// Seed of the multistart search.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DictKind {
    Canonical,
    RandomSphere,
    Incoherent,
    IncoherentRefined,
    Equiangular,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// Dictionary family.
    #[arg(value_enum)]
    pub kind: DictKind,
    /// Dimension.
    #[arg(long)]
    pub d: Option<usize>,
    /// Number of atoms (all kinds except canonical).
    #[arg(long)]
    pub n: Option<usize>,
    /// Coherence cap for incoherent kinds.
    #[arg(long)]
    pub mu: Option<f64>,
    /// Exponent of the ambient `l_p` norm.
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    /// Seed for random kinds.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Rejection attempts (incoherent) or refinement steps (incoherent-refined).
    #[arg(long)]
    pub budget: Option<usize>,
    /// Output CSV; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Suite name; see the list printed for an unknown name.
    pub suite: String,
    /// Number of seeded trials (suite default when omitted).
    #[arg(long)]
    pub seeds: Option<usize>,
    /// Wall-clock budget; trials not started in time are reported as skipped.
    #[arg(long, default_value_t = 600.0)]
    pub budget_secs: f64,
    /// Directory for the suite report and per-trial artifacts.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (results do not depend on it).
    #[arg(long, env = "GREEDY_DESCENT_WORKERS")]
    pub workers: Option<usize>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Run { config, out } => cmd_run(&config, out),
        Command::Dict { command: DictCommand::Build(a) } => cmd_build(&a),
        Command::Dict { command: DictCommand::Inspect { file, restarts, seed } } => cmd_inspect(&file, restarts, seed),
        Command::Verify(a) => cmd_verify(&a),
    }
}

fn verdict(pass: bool) -> i32 {
    if pass {
        0
    } else {
        1
    }
}

fn cmd_run(path: &Path, out: Option<PathBuf>) -> Result<i32> {
    let cfg = RunConfig::load(path)?;
    let dir = out
        .or_else(|| cfg.output.dir.clone())
        .ok_or_else(|| HarnessError::config("output.dir", "no output directory; set output.dir or pass --out"))?;
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "run".into());
    let (report, trace) = run_experiment(&cfg, "run", Some(&dir), &stem)?;
    if cfg.verbosity > 0 {
        eprintln!("{} steps, termination {}", trace.steps(), trace.termination());
    }
    print!("{}", to_json(&report));
    Ok(verdict(report.pass))
}

fn required<T: Copy>(v: Option<T>, flag: &'static str) -> Result<T> {
    v.ok_or_else(|| HarnessError::config(flag, "required for this dictionary kind"))
}

fn build_dictionary(a: &BuildArgs) -> Result<Dictionary> {
    let space = |d| SmoothSpace::lp(d, a.p).map_err(|e| crate::config::field_error("--p", e));
    let dict = match a.kind {
        DictKind::Canonical => Dictionary::canonical(space(required(a.d, "--d")?)?),
        DictKind::RandomSphere => Dictionary::random_sphere(space(required(a.d, "--d")?)?, required(a.n, "--n")?, a.seed)?,
        DictKind::Equiangular => Dictionary::equiangular_2d(required(a.n, "--n")?)?.with_space(space(2)?)?,
        DictKind::Incoherent | DictKind::IncoherentRefined => {
            let (d, n, mu) = (required(a.d, "--d")?, required(a.n, "--n")?, required(a.mu, "--mu")?);
            let (dict, rep) = if a.kind == DictKind::Incoherent {
                Dictionary::incoherent(d, n, mu, a.budget.unwrap_or(crate::config::default_attempts()), a.seed)?
            } else {
                Dictionary::incoherent_refined(d, n, mu, a.budget.unwrap_or(crate::config::default_refine_steps()), a.seed)?
            };
            if rep.achieved < rep.target {
                eprintln!("warning: packed {} of {} atoms at coherence {mu}", rep.achieved, rep.target);
            }
            dict.with_space(space(d)?)?
        }
    };
    Ok(dict)
}

fn cmd_build(a: &BuildArgs) -> Result<i32> {
    let text = dictionary_to_csv(&build_dictionary(a)?);
    match &a.out {
        Some(p) => write_text(p, &text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| HarnessError::Io { path: PathBuf::from("<stdout>"), source: e })?;
        }
    }
    Ok(0)
}

/// Beta bracket: exact grid search for `d <= 3`, multistart upper bound otherwise.
fn beta_json(dict: &Dictionary, restarts: usize, seed: u64) -> Result<Value> {
    let est = match dict.dim() {
        2 => beta_bruteforce(dict, grid_resolution_for(2, 1e-4)?)?,
        3 => beta_bruteforce(dict, grid_resolution_for(3, 1e-3)?)?,
        _ => beta_upper(dict, restarts, seed)?,
    };
    Ok(json!({
        "method": est.method.as_str(),
        "lower": est.lower.map_or(Value::Null, float_value),
        "upper": float_value(est.upper),
        "grid_tol": est.grid_tol.map_or(Value::Null, float_value),
    }))
}

fn cmd_inspect(path: &Path, restarts: usize, seed: u64) -> Result<i32> {
    let raw = parse_dictionary_raw(path, &read_text(path)?)?;
    let norms: Vec<f64> = raw.atoms.iter().map(|a| raw.space.norm_of(a)).collect();
    let dict = raw.into_dictionary()?;
    let (lo, hi) = norms.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &n| (l.min(n), h.max(n)));
    let report = json!({
        "d": dict.dim(),
        "N": dict.len(),
        "p": float_value(dict.space().p()),
        "label": dict.label(),
        "coherence": float_value(dict.coherence().value),
        "beta": beta_json(&dict, restarts, seed)?,
        "column_norms": { "min": float_value(lo), "max": float_value(hi) },
    });
    print!("{}", to_json(&report));
    Ok(0)
}

fn cmd_verify(a: &VerifyArgs) -> Result<i32> {
    if !SUITES.contains(&a.suite.as_str()) {
        eprintln!("known suites: {}", SUITES.join(", "));
        return Err(HarnessError::UnknownSuite(a.suite.clone()));
    }
    let opts = SuiteOptions { seeds: a.seeds, budget_secs: a.budget_secs, out: a.out.clone(), workers: a.workers };
    let report = run_suite(&a.suite, &opts)?;
    let passed = report.trials.iter().filter(|r| r.pass).count();
    println!("{} {}: {passed}/{} trials pass", if report.pass { "PASS" } else { "FAIL" }, report.suite, report.trials.len());
    for (k, v) in &report.metrics {
        println!("  {k} = {v}");
    }
    if let Some(dir) = &a.out {
        println!("  report: {}", suite_report_path(dir, &report.suite).display());
    }
    Ok(verdict(report.pass))
}
