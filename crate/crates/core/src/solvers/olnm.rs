//! Long-step restarted accelerated method `OLNM(T)`.
//!
//! The method holds the objective fixed for `T` consecutive accelerated
//! steps — gradients between restarts are taken on the *stale* function
//! `f_{T⌊t/T⌋}` — then catches up and restarts the momentum:
//!
//! ```text
//! z_{t+1} = y_t − (1/L)·∇f_{T⌊t/T⌋}(y_t)
//! if T ∤ (t+1):  a_{t+1} = (1+√(1+4a_t²))/2,
//!                y_{t+1} = z_{t+1} + ((a_t−1)/a_{t+1})(z_{t+1} − z_t),
//!                x_{t+1} = x_t
//! else:          a_{t+1} = 1, y_{t+1} = z_{t+1}, x_{t+1} = z_{t+1}
//! ```
//!
//! Two practical switches are provided beyond the faithful algorithm:
//!
//! * `every_step` — publish `x_{t+1} = z_{t+1}` at every step instead of only
//!   at restarts. Works better in practice; the long-step guarantee no longer
//!   applies.
//! * `refresh_every_step` — evaluate gradients on the *current* `f_t` instead
//!   of the stale one, turning the method into an accelerated method with
//!   periodic momentum restarts. Also guarantee-free; kept because comparison
//!   experiments in the literature appear to use it (see the repository
//!   notes).

use crate::error::TvError;
use crate::problems::FunctionSequence;
use crate::scalar::{fp, Scalar};
use crate::Result;

/// Restart length `T = ⌊(2+√2)·√κ⌋`.
///
/// The long-step bound needs `T > 2√κ`, which this choice satisfies for all
/// `κ ≥ 1`; the returned length is always ≥ 3.
pub fn olnm_restart_length<S: Scalar>(kappa: S) -> Result<usize> {
    if kappa < S::one() {
        return Err(TvError::invalid(format!(
            "condition number must be >= 1, got {kappa}"
        )));
    }
    let c = fp::<S>(2.0) + fp::<S>(2.0).sqrt();
    let t = (c * kappa.sqrt()).floor();
    let t = t
        .to_usize()
        .ok_or_else(|| TvError::invalid(format!("restart length overflow for kappa={kappa}")))?;
    if t < 3 {
        return Err(TvError::invalid(format!(
            "restart length {t} < 3 for kappa={kappa}"
        )));
    }
    Ok(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OlnmParams {
    /// Long-step length `T ≥ 1`.
    pub t_period: usize,
    /// Publish the inner iterate every step (guarantee-free practical mode).
    pub every_step: bool,
    /// Take gradients on the current function instead of the stale one
    /// (guarantee-free; momentum restarts are kept on the `T` grid).
    pub refresh_every_step: bool,
}

impl OlnmParams {
    pub fn faithful(t_period: usize) -> Self {
        OlnmParams {
            t_period,
            every_step: false,
            refresh_every_step: false,
        }
    }

    pub fn every_step(t_period: usize) -> Self {
        OlnmParams {
            t_period,
            every_step: true,
            refresh_every_step: false,
        }
    }
}

/// Mutable iteration state of `OLNM`.
#[derive(Debug, Clone)]
pub struct OlnmState<S> {
    /// Published iterate.
    pub x: Vec<S>,
    pub y: Vec<S>,
    pub z: Vec<S>,
    /// Momentum scalar `a_t` (resets to 1 at restarts).
    pub a: S,
    pub t: usize,
    grad: Vec<S>,
}

impl<S: Scalar> OlnmState<S> {
    pub fn new(x0: Vec<S>) -> Self {
        let dim = x0.len();
        OlnmState {
            x: x0.clone(),
            y: x0.clone(),
            z: x0,
            a: S::one(),
            t: 0,
            grad: vec![S::zero(); dim],
        }
    }

    /// Function index the next gradient call will use.
    pub fn stale_index(&self, params: &OlnmParams) -> usize {
        if params.refresh_every_step {
            self.t
        } else {
            params.t_period * (self.t / params.t_period)
        }
    }

    /// One update. The smoothness constant for the `1/L` inner step comes
    /// from the problem profile.
    pub fn step<P: FunctionSequence<S>>(&mut self, problem: &P, params: &OlnmParams) {
        assert!(params.t_period >= 1, "restart length must be >= 1");
        let l = problem.profile().l;
        let stale = self.stale_index(params);
        problem.gradient_into(stale, &self.y, &mut self.grad);
        let inv_l = S::one() / l;
        let restart = (self.t + 1) % params.t_period == 0;
        if !restart {
            let four = fp::<S>(4.0);
            let a_new = (S::one() + (S::one() + four * self.a * self.a).sqrt()) / fp::<S>(2.0);
            let mw = (self.a - S::one()) / a_new;
            for i in 0..self.y.len() {
                let z_new = self.y[i] - inv_l * self.grad[i];
                self.y[i] = z_new + mw * (z_new - self.z[i]);
                self.z[i] = z_new;
                if params.every_step {
                    self.x[i] = z_new;
                }
            }
            self.a = a_new;
        } else {
            for i in 0..self.y.len() {
                let z_new = self.y[i] - inv_l * self.grad[i];
                self.y[i] = z_new;
                self.z[i] = z_new;
                self.x[i] = z_new;
            }
            self.a = S::one();
        }
        self.t += 1;
    }
}
