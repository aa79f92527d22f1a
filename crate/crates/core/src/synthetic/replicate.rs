//! Replication: run an experiment `n` times with derived seeds and average
//! the per-replication limit-supremum estimates.

use crate::analysis::TrackingReport;
use crate::error::TvError;
use crate::scalar::{fp, Scalar};
use crate::Result;

/// Sample mean with its standard error (`0` for a single replication).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanStderr<S> {
    pub mean: S,
    pub stderr: S,
    pub n: usize,
}

/// Mean and standard error of a sample (standard error uses the `n−1`
/// sample variance divided by `n`).
pub fn mean_stderr<S: Scalar>(values: &[S]) -> MeanStderr<S> {
    let n = values.len();
    assert!(n >= 1, "mean of an empty sample");
    let nf = fp::<S>(n as f64);
    let mean = values.iter().cloned().sum::<S>() / nf;
    let stderr = if n >= 2 {
        let var = values
            .iter()
            .map(|&v| (v - mean) * (v - mean))
            .sum::<S>()
            / fp::<S>((n - 1) as f64);
        (var / nf).sqrt()
    } else {
        S::zero()
    };
    MeanStderr { mean, stderr, n }
}

/// Aggregated replications of one experiment.
#[derive(Debug, Clone)]
pub struct ReplicatedTracking<S> {
    pub per_rep: Vec<TrackingReport<S>>,
    /// Mean ± stderr of the per-replication iterate-error limsups (present
    /// when every replication recorded that metric).
    pub iterate: Option<MeanStderr<S>>,
    pub function: Option<MeanStderr<S>>,
    pub gradient: Option<MeanStderr<S>>,
    /// Any replication hit the divergence cap.
    pub any_diverged: bool,
    /// Every replication's limsup estimator reported convergence (vacuously
    /// false when no metric was recorded).
    pub all_converged: bool,
}

/// Run `n_reps` independent replications; replication `i` receives seed
/// `seed + i`. Divergence flags propagate; means are taken per metric.
pub fn replicate<S, F>(n_reps: usize, seed: u64, run: F) -> Result<ReplicatedTracking<S>>
where
    S: Scalar,
    F: Fn(u64, usize) -> Result<TrackingReport<S>>,
{
    if n_reps == 0 {
        return Err(TvError::invalid("replication needs n_reps >= 1"));
    }
    let mut per_rep = Vec::with_capacity(n_reps);
    for i in 0..n_reps {
        per_rep.push(run(seed.wrapping_add(i as u64), i)?);
    }

    let collect = |get: &dyn Fn(&TrackingReport<S>) -> Option<(S, bool)>| {
        let vals: Vec<(S, bool)> = per_rep.iter().filter_map(|r| get(r)).collect();
        if vals.len() == per_rep.len() {
            let values: Vec<S> = vals.iter().map(|&(v, _)| v).collect();
            let converged = vals.iter().all(|&(_, c)| c);
            Some((mean_stderr(&values), converged))
        } else {
            None
        }
    };
    let it = collect(&|r| r.limsup_iterate.map(|e| (e.value, e.converged)));
    let fu = collect(&|r| r.limsup_function.map(|e| (e.value, e.converged)));
    let gr = collect(&|r| r.limsup_gradient.map(|e| (e.value, e.converged)));

    let any_diverged = per_rep.iter().any(|r| r.diverged_at.is_some());
    let mut all_converged = it.is_some() || fu.is_some() || gr.is_some();
    for opt in [&it, &fu, &gr] {
        if let Some((_, c)) = opt {
            all_converged &= *c;
        }
    }
    Ok(ReplicatedTracking {
        iterate: it.map(|(m, _)| m),
        function: fu.map(|(m, _)| m),
        gradient: gr.map(|(m, _)| m),
        per_rep,
        any_diverged,
        all_converged,
    })
}
