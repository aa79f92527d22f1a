//! Limit-supremum estimation from error series, per-run tracking reports,
//! and the through-origin slope fit used by condition-number sweeps.

use crate::error::TvError;
use crate::scalar::Scalar;
use crate::solvers::Trace;
use crate::Result;

/// A trailing-window estimate of `limsup_t` of an error series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimsupEstimate<S> {
    pub value: S,
    /// The maxima over the last two disjoint windows agree to `rel_tol`.
    pub converged: bool,
}

/// Default estimation window: one restart period, but at least 100 steps.
pub fn default_window(t_period: Option<usize>) -> usize {
    t_period.unwrap_or(0).max(100)
}

/// Maximum over the trailing `window` entries, with a convergence flag set
/// when the maxima over the last two disjoint windows agree to within
/// `rel_tol` (relative to their larger magnitude).
pub fn estimate_limsup<S: Scalar>(
    series: &[S],
    window: usize,
    rel_tol: S,
) -> Result<LimsupEstimate<S>> {
    if series.is_empty() {
        return Err(TvError::invalid("limsup estimation needs a nonempty series"));
    }
    if window == 0 {
        return Err(TvError::invalid("limsup window must be at least 1"));
    }
    let n = series.len();
    let max_over = |range: &[S]| range.iter().cloned().fold(S::neg_infinity(), S::max);
    let last = max_over(&series[n.saturating_sub(window)..]);
    let converged = if n >= 2 * window {
        let prev = max_over(&series[n - 2 * window..n - window]);
        let scale = last.abs().max(prev.abs());
        let stable = (last - prev).abs() <= rel_tol * scale;
        // A series that has decayed below tolerance of its previous window
        // has (to tolerance) reached its limit as well.
        let decayed = last.abs() <= rel_tol * prev.abs();
        stable || decayed
    } else {
        false
    };
    Ok(LimsupEstimate {
        value: last,
        converged,
    })
}

/// Per-metric limsup summary of one run.
#[derive(Debug, Clone)]
pub struct TrackingReport<S> {
    pub iterate_errors: Option<Vec<S>>,
    pub function_errors: Option<Vec<S>>,
    pub gradient_errors: Option<Vec<S>>,
    pub limsup_iterate: Option<LimsupEstimate<S>>,
    pub limsup_function: Option<LimsupEstimate<S>>,
    pub limsup_gradient: Option<LimsupEstimate<S>>,
    pub window_length: usize,
    pub diverged_at: Option<usize>,
}

impl<S: Scalar> TrackingReport<S> {
    /// Summarize a recorded trace. A diverged run keeps its (truncated)
    /// series but reports no limsup convergence.
    pub fn from_trace(trace: &Trace<S>, window: usize, rel_tol: S) -> Result<Self> {
        let summarize = |series: &Option<Vec<S>>| -> Result<Option<LimsupEstimate<S>>> {
            match series {
                Some(s) if !s.is_empty() => {
                    let mut est = estimate_limsup(s, window, rel_tol)?;
                    if trace.diverged_at.is_some() {
                        est.converged = false;
                    }
                    Ok(Some(est))
                }
                _ => Ok(None),
            }
        };
        Ok(TrackingReport {
            limsup_iterate: summarize(&trace.iterate_errors)?,
            limsup_function: summarize(&trace.function_errors)?,
            limsup_gradient: summarize(&trace.gradient_errors)?,
            iterate_errors: trace.iterate_errors.clone(),
            function_errors: trace.function_errors.clone(),
            gradient_errors: trace.gradient_errors.clone(),
            window_length: window,
            diverged_at: trace.diverged_at,
        })
    }
}

/// Least-squares slope of `y ≈ slope·x` through the origin.
///
/// Rejects fewer than two points (a sweep with a single grid value cannot
/// support a fit) and degenerate abscissae.
pub fn fit_through_origin<S: Scalar>(xs: &[S], ys: &[S]) -> Result<S> {
    if xs.len() != ys.len() {
        return Err(TvError::invalid(format!(
            "fit needs matching lengths, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 2 {
        return Err(TvError::invalid("insufficient points for a slope fit"));
    }
    let sxx: S = xs.iter().map(|&x| x * x).sum();
    if !(sxx > S::zero()) {
        return Err(TvError::invalid("degenerate abscissae in slope fit"));
    }
    let sxy: S = xs.iter().zip(ys).map(|(&x, &y)| x * y).sum();
    Ok(sxy / sxx)
}
