//! Experiment harness: flat key–value configuration, experiment
//! orchestration (runs and condition-number sweeps), the verification-check
//! catalog, and CSV emission.

pub mod checks;
pub mod config;
pub mod csv;
pub mod experiment;

pub use checks::{list_checks, run_check, CheckResult};
pub use config::Config;
pub use csv::{read_csv, write_csv, CsvRow, Metric};
pub use experiment::{run_experiment, sweep_experiment, RunOutput};
