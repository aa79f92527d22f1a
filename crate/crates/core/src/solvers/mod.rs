//! Online first-order methods as single-step state machines, plus
//! trace-recording runners.
//!
//! All methods consume only the start point and observed gradients (they are
//! first-order in the oracle sense; `problems::Instrumented` can assert
//! this). Divergence is a measured outcome, not an error: runners stop once
//! the iterate norm passes a configurable cap and record the step index.

mod alg;
mod olnm;
mod orgd;
mod runner;

pub use alg::{AlgParams, AlgPreset, AlgState};
pub use olnm::{olnm_restart_length, OlnmParams, OlnmState};
pub use orgd::{OrgdParams, OrgdState};
pub use runner::{
    run_abstain, run_alg, run_alg_from, run_olnm, run_orgd, RunOptions, Trace,
};
