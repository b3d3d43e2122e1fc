//! Files, configured experiments, verification suites and the command line
//! for `greedy-descent-core`.
//!
//! * [`config`]: the JSON run configuration and its validation;
//! * [`formats`]: CSV readers and writers for dictionaries, coverings and traces;
//! * [`experiment`]: building, running and evaluating one configured run;
//! * [`suites`]: seeded, parallel verification suites with aggregate verdicts;
//! * [`report`]: deterministic JSON reports.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
mod error;
pub mod experiment;
pub mod formats;
pub mod report;
pub mod suites;

pub use error::{HarnessError, Result};
pub use report::{Report, SuiteReport};
pub use suites::{run_suite, SuiteOptions, SUITES};
