//! Time-varying problem oracles.
//!
//! A problem is a sequence of smooth convex functions `f_t`, presented through
//! the [`FunctionSequence`] trait: deterministic evaluation of values and
//! gradients at any time index, plus the minimizer trajectory when it is
//! analytically known. Oracles are immutable after construction and safe to
//! share across concurrent solver runs.

mod online_nesterov;
mod rotating;
mod translating;

pub use online_nesterov::OnlineNesterovFunction;
pub use rotating::RotatingQuadratic;
pub use translating::TranslatingQuadratic;

use crate::error::TvError;
use crate::scalar::{fp, Scalar};
use crate::Result;
use std::sync::Mutex;

/// Smoothness / strong-convexity / drift constants of a function sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothnessProfile<S> {
    /// Strong-smoothness (gradient Lipschitz) constant, > 0.
    pub l: S,
    /// Strong-convexity constant, 0 ≤ mu ≤ l.
    pub mu: S,
    /// Per-step minimizer drift bound: ‖x*_{t+1} − x*_t‖ ≤ sigma.
    pub sigma: S,
}

impl<S: Scalar> SmoothnessProfile<S> {
    pub fn new(mu: S, l: S, sigma: S) -> Result<Self> {
        let p = SmoothnessProfile { l, mu, sigma };
        p.validate()?;
        Ok(p)
    }

    /// Convenience constructor from a condition number: `mu = l / kappa`.
    pub fn from_kappa(kappa: S, l: S, sigma: S) -> Result<Self> {
        if kappa < S::one() {
            return Err(TvError::invalid(format!(
                "condition number must be >= 1, got {kappa}"
            )));
        }
        Self::new(l / kappa, l, sigma)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.l > S::zero()) {
            return Err(TvError::invalid(format!("l must be > 0, got {}", self.l)));
        }
        if self.mu < S::zero() || self.mu > self.l {
            return Err(TvError::invalid(format!(
                "mu must satisfy 0 <= mu <= l, got mu={} l={}",
                self.mu, self.l
            )));
        }
        if self.sigma < S::zero() {
            return Err(TvError::invalid(format!(
                "sigma must be >= 0, got {}",
                self.sigma
            )));
        }
        Ok(())
    }

    /// Condition number `l/mu`; `None` when the sequence is not strongly
    /// convex.
    pub fn kappa(&self) -> Option<S> {
        if self.mu > S::zero() {
            Some(self.l / self.mu)
        } else {
            None
        }
    }
}

/// A deterministic sequence of smooth convex functions `f_t`.
///
/// All methods must be pure: the same `(t, x)` always produces the same
/// output. Gradients must be Lipschitz with constant `profile().l` and, when
/// `profile().mu > 0`, strongly monotone with constant `profile().mu`.
pub trait FunctionSequence<S: Scalar>: Send + Sync {
    /// Ambient dimension (finite truncation if the construction is naturally
    /// infinite-dimensional).
    fn dimension(&self) -> usize;

    /// The constants (L, μ, σ) the sequence is certified for.
    fn profile(&self) -> SmoothnessProfile<S>;

    /// Function value `f_t(x)`.
    fn value(&self, t: usize, x: &[S]) -> S;

    /// Gradient `∇f_t(x)` written into `out`.
    fn gradient_into(&self, t: usize, x: &[S], out: &mut [S]);

    fn gradient(&self, t: usize, x: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); self.dimension()];
        self.gradient_into(t, x, &mut out);
        out
    }

    /// Exact minimizer `x*_t` when the trajectory is analytic, else `None`.
    fn minimizer(&self, t: usize) -> Option<Vec<S>>;

    /// Optimal value `f_t(x*_t)` when the minimizer is analytic.
    fn optimal_value(&self, t: usize) -> Option<S> {
        self.minimizer(t).map(|m| self.value(t, &m))
    }
}

/// Every `&P` where `P: FunctionSequence` is itself a function sequence, so
/// wrappers and solvers can borrow freely.
impl<S: Scalar, P: FunctionSequence<S> + ?Sized> FunctionSequence<S> for &P {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }
    fn profile(&self) -> SmoothnessProfile<S> {
        (**self).profile()
    }
    fn value(&self, t: usize, x: &[S]) -> S {
        (**self).value(t, x)
    }
    fn gradient_into(&self, t: usize, x: &[S], out: &mut [S]) {
        (**self).gradient_into(t, x, out)
    }
    fn minimizer(&self, t: usize) -> Option<Vec<S>> {
        (**self).minimizer(t)
    }
    fn optimal_value(&self, t: usize) -> Option<S> {
        (**self).optimal_value(t)
    }
}

/// Tikhonov-regularized view of a sequence: `f_t(x) + (δ/2)‖x − x_c‖²`.
///
/// The reported profile shifts both curvature constants by `δ`; the drift
/// bound of the regularized minimizers is kept from the inner sequence (the
/// regularized trajectory is estimated numerically where needed, see
/// `analysis::regularization`).
pub struct Regularized<'a, S, P> {
    inner: &'a P,
    delta: S,
    x_c: Vec<S>,
}

impl<'a, S: Scalar, P: FunctionSequence<S>> Regularized<'a, S, P> {
    pub fn new(inner: &'a P, delta: S, x_c: Vec<S>) -> Result<Self> {
        if delta < S::zero() {
            return Err(TvError::invalid(format!("delta must be >= 0, got {delta}")));
        }
        if x_c.len() != inner.dimension() {
            return Err(TvError::invalid(format!(
                "regularization center has dimension {}, problem has {}",
                x_c.len(),
                inner.dimension()
            )));
        }
        Ok(Regularized { inner, delta, x_c })
    }

    pub fn delta(&self) -> S {
        self.delta
    }

    pub fn center(&self) -> &[S] {
        &self.x_c
    }
}

impl<S: Scalar, P: FunctionSequence<S>> FunctionSequence<S> for Regularized<'_, S, P> {
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    fn profile(&self) -> SmoothnessProfile<S> {
        let p = self.inner.profile();
        SmoothnessProfile {
            l: p.l + self.delta,
            mu: p.mu + self.delta,
            sigma: p.sigma,
        }
    }

    fn value(&self, t: usize, x: &[S]) -> S {
        let half = fp::<S>(0.5);
        let reg: S = x
            .iter()
            .zip(&self.x_c)
            .map(|(&xi, &ci)| (xi - ci) * (xi - ci))
            .sum();
        self.inner.value(t, x) + half * self.delta * reg
    }

    fn gradient_into(&self, t: usize, x: &[S], out: &mut [S]) {
        self.inner.gradient_into(t, x, out);
        for ((o, &xi), &ci) in out.iter_mut().zip(x).zip(&self.x_c) {
            *o += self.delta * (xi - ci);
        }
    }

    fn minimizer(&self, _t: usize) -> Option<Vec<S>> {
        // Regularized minimizers are generally not closed-form; the analysis
        // module computes them with a batch subsolver.
        None
    }
}

/// Call counters recorded by [`Instrumented`].
#[derive(Debug, Default, Clone)]
pub struct OracleCallLog {
    /// `(t, call count)` for gradient evaluations, keyed by time index.
    pub gradient_calls: Vec<(usize, usize)>,
    /// Number of `minimizer`/`optimal_value` calls (solvers must never make
    /// any: they are first-order methods).
    pub trajectory_calls: usize,
    /// Number of `value` calls.
    pub value_calls: usize,
}

impl OracleCallLog {
    fn bump_gradient(&mut self, t: usize) {
        match self.gradient_calls.iter_mut().find(|(ti, _)| *ti == t) {
            Some((_, c)) => *c += 1,
            None => self.gradient_calls.push((t, 1)),
        }
    }

    /// Distinct time indices with at least one gradient call, ascending.
    pub fn gradient_indices(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = self.gradient_calls.iter().map(|&(t, _)| t).collect();
        idx.sort_unstable();
        idx
    }
}

/// Wrapper that records which oracle entry points a solver touches, used to
/// assert gradient staleness patterns and first-order membership.
pub struct Instrumented<'a, S, P> {
    inner: &'a P,
    log: Mutex<OracleCallLog>,
    _marker: std::marker::PhantomData<S>,
}

impl<'a, S: Scalar, P: FunctionSequence<S>> Instrumented<'a, S, P> {
    pub fn new(inner: &'a P) -> Self {
        Instrumented {
            inner,
            log: Mutex::new(OracleCallLog::default()),
            _marker: std::marker::PhantomData,
        }
    }

    pub fn take_log(&self) -> OracleCallLog {
        std::mem::take(&mut *self.log.lock().expect("instrumentation lock"))
    }
}

impl<S: Scalar, P: FunctionSequence<S>> FunctionSequence<S> for Instrumented<'_, S, P> {
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    fn profile(&self) -> SmoothnessProfile<S> {
        self.inner.profile()
    }

    fn value(&self, t: usize, x: &[S]) -> S {
        self.log.lock().expect("instrumentation lock").value_calls += 1;
        self.inner.value(t, x)
    }

    fn gradient_into(&self, t: usize, x: &[S], out: &mut [S]) {
        self.log
            .lock()
            .expect("instrumentation lock")
            .bump_gradient(t);
        self.inner.gradient_into(t, x, out)
    }

    fn minimizer(&self, t: usize) -> Option<Vec<S>> {
        self.log
            .lock()
            .expect("instrumentation lock")
            .trajectory_calls += 1;
        self.inner.minimizer(t)
    }
}
