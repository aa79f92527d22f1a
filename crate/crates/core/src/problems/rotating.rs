//! Rotating quadratic: a two-dimensional static-minimizer sequence whose
//! curvature axes swap every step.
//!
//! `f_t(x) = ½ xᵀ A_t x` with `A_{2t} = diag(L, μ)` and
//! `A_{2t+1} = diag(μ, L)`. The minimizer is the origin at every step, so any
//! error growth is purely a stability phenomenon of the method; see
//! `analysis::stability` for the spectral treatment.

use super::{FunctionSequence, SmoothnessProfile};
use crate::error::TvError;
use crate::scalar::{fp, Scalar};
use crate::Result;

#[derive(Debug, Clone)]
pub struct RotatingQuadratic<S> {
    mu: S,
    l: S,
}

impl<S: Scalar> RotatingQuadratic<S> {
    pub fn new(mu: S, l: S) -> Result<Self> {
        if !(mu > S::zero()) || mu > l {
            return Err(TvError::invalid(format!(
                "rotating quadratic needs 0 < mu <= l, got mu={mu} l={l}"
            )));
        }
        Ok(RotatingQuadratic { mu, l })
    }

    /// Diagonal of `A_t`: `(L, μ)` at even `t`, `(μ, L)` at odd `t`.
    #[inline]
    pub fn curvatures(&self, t: usize) -> (S, S) {
        if t % 2 == 0 {
            (self.l, self.mu)
        } else {
            (self.mu, self.l)
        }
    }
}

impl<S: Scalar> FunctionSequence<S> for RotatingQuadratic<S> {
    fn dimension(&self) -> usize {
        2
    }

    fn profile(&self) -> SmoothnessProfile<S> {
        // The minimizer never moves: drift bound zero.
        SmoothnessProfile {
            l: self.l,
            mu: self.mu,
            sigma: S::zero(),
        }
    }

    fn value(&self, t: usize, x: &[S]) -> S {
        assert_eq!(x.len(), 2, "dimension mismatch");
        let (c0, c1) = self.curvatures(t);
        fp::<S>(0.5) * (c0 * x[0] * x[0] + c1 * x[1] * x[1])
    }

    fn gradient_into(&self, t: usize, x: &[S], out: &mut [S]) {
        assert_eq!(x.len(), 2, "dimension mismatch");
        assert_eq!(out.len(), 2, "dimension mismatch");
        let (c0, c1) = self.curvatures(t);
        out[0] = c0 * x[0];
        out[1] = c1 * x[1];
    }

    fn minimizer(&self, _t: usize) -> Option<Vec<S>> {
        Some(vec![S::zero(), S::zero()])
    }

    fn optimal_value(&self, _t: usize) -> Option<S> {
        Some(S::zero())
    }
}
