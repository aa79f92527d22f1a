//! Online regularized gradient descent `ORGD(δ, x_c)`:
//!
//! ```text
//! x_{t+1} = x_t − (2/(L+2δ))·(∇f_t(x_t) + δ(x_t − x_c))
//! ```
//!
//! This is exactly plain online gradient descent with step `2/((L+δ)+(δ))`…
//! i.e. step `2/(μ̃+L̃)` on the regularized sequence
//! `f_t + (δ/2)‖·−x_c‖²`, whose constants are `μ̃ = μ+δ`, `L̃ = L+δ` (for
//! convex-only `f_t`, `μ = 0`). The equivalence is asserted in tests.

use crate::error::TvError;
use crate::problems::FunctionSequence;
use crate::scalar::{fp, Scalar};
use crate::Result;

#[derive(Debug, Clone)]
pub struct OrgdParams<S> {
    /// Regularization weight; `0` degenerates to plain gradient descent with
    /// step `2/L`.
    pub delta: S,
    /// Regularization center.
    pub x_c: Vec<S>,
}

impl<S: Scalar> OrgdParams<S> {
    pub fn new(delta: S, x_c: Vec<S>) -> Result<Self> {
        if delta < S::zero() {
            return Err(TvError::invalid(format!(
                "regularization weight must be >= 0, got {delta}"
            )));
        }
        Ok(OrgdParams { delta, x_c })
    }

    /// Step size `2/(L+2δ)`.
    pub fn step_size(&self, l: S) -> S {
        fp::<S>(2.0) / (l + fp::<S>(2.0) * self.delta)
    }
}

/// Mutable iteration state of `ORGD`.
#[derive(Debug, Clone)]
pub struct OrgdState<S> {
    pub x: Vec<S>,
    pub t: usize,
    grad: Vec<S>,
}

impl<S: Scalar> OrgdState<S> {
    pub fn new(x0: Vec<S>) -> Self {
        let dim = x0.len();
        OrgdState {
            x: x0,
            t: 0,
            grad: vec![S::zero(); dim],
        }
    }

    /// One update; the smoothness constant comes from the problem profile.
    pub fn step<P: FunctionSequence<S>>(&mut self, problem: &P, params: &OrgdParams<S>) {
        assert_eq!(self.x.len(), params.x_c.len(), "center dimension mismatch");
        let step = params.step_size(problem.profile().l);
        problem.gradient_into(self.t, &self.x, &mut self.grad);
        for i in 0..self.x.len() {
            let pull = params.delta * (self.x[i] - params.x_c[i]);
            self.x[i] = self.x[i] - step * (self.grad[i] + pull);
        }
        self.t += 1;
    }
}
