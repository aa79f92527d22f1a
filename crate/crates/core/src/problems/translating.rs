//! Translating quadratic adversary.
//!
//! The minimizer moves along the first canonical direction with constant
//! speed `σ`, offset so that a given method `ALG(α,β,η)` trails it at the
//! fixed distance `ξ = ((1−β)/(αμ) + η)·σ` forever. The curvature along the
//! translation direction is `μ` and `L` along all others.

use super::{FunctionSequence, SmoothnessProfile};
use crate::error::TvError;
use crate::scalar::{fp, Scalar};
use crate::solvers::AlgParams;
use crate::Result;

#[derive(Debug, Clone)]
pub struct TranslatingQuadratic<S> {
    profile: SmoothnessProfile<S>,
    x0: Vec<S>,
    /// Trailing distance added to the minimizer offset; zero for the
    /// "pure translation" mode used in figure sweeps.
    xi: S,
}

impl<S: Scalar> TranslatingQuadratic<S> {
    /// Construct the adversary tuned against `ALG(α,β,η)` started at `x0`:
    /// the minimizer is `x*_t = x0 + (tσ + ξ)e₁` with
    /// `ξ = ((1−β)/(αμ) + η)·σ`.
    pub fn for_alg(
        profile: SmoothnessProfile<S>,
        params: &AlgParams<S>,
        x0: Vec<S>,
    ) -> Result<Self> {
        profile.validate()?;
        if !(profile.mu > S::zero()) {
            return Err(TvError::invalid(
                "translating adversary needs mu > 0 (trailing distance undefined otherwise)",
            ));
        }
        if !(params.alpha > S::zero()) {
            return Err(TvError::invalid(format!(
                "step size must be > 0, got {}",
                params.alpha
            )));
        }
        let xi = ((S::one() - params.beta) / (params.alpha * profile.mu) + params.eta)
            * profile.sigma;
        Self::with_offset(profile, x0, xi)
    }

    /// Construct with an explicit trailing offset `xi` (use `xi = 0` for the
    /// pure translation `x*_t = x0 + tσe₁` used when comparing solvers).
    pub fn with_offset(profile: SmoothnessProfile<S>, x0: Vec<S>, xi: S) -> Result<Self> {
        profile.validate()?;
        if x0.is_empty() {
            return Err(TvError::invalid("dimension must be >= 1"));
        }
        Ok(TranslatingQuadratic { profile, x0, xi })
    }

    /// Trailing distance `ξ`.
    pub fn xi(&self) -> S {
        self.xi
    }

    /// Offset of the minimizer from `x0` along `e₁` at time `t`.
    fn offset(&self, t: usize) -> S {
        fp::<S>(t as f64) * self.profile.sigma + self.xi
    }

    /// Pre-history start `(x₀, x₋₁)` for which `ALG(α,β,η)` trails exactly
    /// from the very first step: `x₋₁ = x₀ − σe₁`.
    ///
    /// Plain gradient descent (`β = η = 0`) does not read `x₋₁`, so the
    /// default `x₋₁ = x₀` works there; the momentum variants need the
    /// aligned pre-history for the trailing identity to hold at every `t`.
    pub fn aligned_prehistory(&self) -> (Vec<S>, Vec<S>) {
        let x0 = self.x0.clone();
        let mut x_prev = self.x0.clone();
        x_prev[0] -= self.profile.sigma;
        (x0, x_prev)
    }

    pub fn x0(&self) -> &[S] {
        &self.x0
    }
}

impl<S: Scalar> FunctionSequence<S> for TranslatingQuadratic<S> {
    fn dimension(&self) -> usize {
        self.x0.len()
    }

    fn profile(&self) -> SmoothnessProfile<S> {
        self.profile
    }

    fn value(&self, t: usize, x: &[S]) -> S {
        assert_eq!(x.len(), self.x0.len(), "dimension mismatch");
        let half = fp::<S>(0.5);
        let mut acc = S::zero();
        for (i, (&xi_coord, &x0i)) in x.iter().zip(&self.x0).enumerate() {
            let center = if i == 0 { x0i + self.offset(t) } else { x0i };
            let z = xi_coord - center;
            let curv = if i == 0 { self.profile.mu } else { self.profile.l };
            acc += curv * z * z;
        }
        half * acc
    }

    fn gradient_into(&self, t: usize, x: &[S], out: &mut [S]) {
        assert_eq!(x.len(), self.x0.len(), "dimension mismatch");
        assert_eq!(out.len(), self.x0.len(), "dimension mismatch");
        for (i, ((o, &xi_coord), &x0i)) in out.iter_mut().zip(x).zip(&self.x0).enumerate() {
            let center = if i == 0 { x0i + self.offset(t) } else { x0i };
            let curv = if i == 0 { self.profile.mu } else { self.profile.l };
            *o = curv * (xi_coord - center);
        }
    }

    fn minimizer(&self, t: usize) -> Option<Vec<S>> {
        let mut m = self.x0.clone();
        m[0] += self.offset(t);
        Some(m)
    }

    fn optimal_value(&self, _t: usize) -> Option<S> {
        Some(S::zero())
    }
}
