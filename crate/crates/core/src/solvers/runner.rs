//! Trace-recording runners: drive a solver state machine for a fixed number
//! of steps against a problem, recording error series and divergence.

use super::{AlgParams, AlgState, OlnmParams, OlnmState, OrgdParams, OrgdState};
use crate::linalg::{dist2, norm2};
use crate::problems::FunctionSequence;
use crate::scalar::{fp, Scalar};

/// What to record and when to stop.
#[derive(Debug, Clone, Copy)]
pub struct RunOptions<S> {
    /// Number of solver updates; series have `steps + 1` entries (the start
    /// point is index 0) unless the run stops early on divergence.
    pub steps: usize,
    /// Stop once `‖x_t‖` exceeds this cap and flag the step.
    pub divergence_cap: S,
    /// Record `f_t(x_t) − f_t*` (needs an analytic trajectory).
    pub record_function_errors: bool,
    /// Record `‖∇f_t(x_t)‖`.
    pub record_gradient_errors: bool,
}

impl<S: Scalar> RunOptions<S> {
    pub fn new(steps: usize) -> Self {
        RunOptions {
            steps,
            divergence_cap: fp::<S>(1.0e9),
            record_function_errors: false,
            record_gradient_errors: false,
        }
    }

    pub fn with_gradient_errors(mut self) -> Self {
        self.record_gradient_errors = true;
        self
    }

    pub fn with_function_errors(mut self) -> Self {
        self.record_function_errors = true;
        self
    }

    pub fn with_divergence_cap(mut self, cap: S) -> Self {
        self.divergence_cap = cap;
        self
    }
}

/// Recorded outcome of a run.
#[derive(Debug, Clone)]
pub struct Trace<S> {
    /// `‖x_t − x*_t‖` for `t = 0..`, when the trajectory is analytic.
    pub iterate_errors: Option<Vec<S>>,
    /// `f_t(x_t) − f_t*` when requested and available.
    pub function_errors: Option<Vec<S>>,
    /// `‖∇f_t(x_t)‖` when requested.
    pub gradient_errors: Option<Vec<S>>,
    /// First step index at which the iterate norm passed the cap.
    pub diverged_at: Option<usize>,
    /// Final published iterate.
    pub final_x: Vec<S>,
}

impl<S: Scalar> Trace<S> {
    /// The iterate-error series, panicking when the problem had no analytic
    /// trajectory (caller bug).
    pub fn iterate_errors(&self) -> &[S] {
        self.iterate_errors
            .as_deref()
            .expect("problem has no analytic minimizer trajectory")
    }

    pub fn diverged(&self) -> bool {
        self.diverged_at.is_some()
    }
}

struct Recorder<'p, S, P> {
    problem: &'p P,
    opts: RunOptions<S>,
    has_trajectory: bool,
    iterate_errors: Vec<S>,
    function_errors: Vec<S>,
    gradient_errors: Vec<S>,
    diverged_at: Option<usize>,
    grad_buf: Vec<S>,
}

impl<'p, S: Scalar, P: FunctionSequence<S>> Recorder<'p, S, P> {
    fn new(problem: &'p P, opts: RunOptions<S>) -> Self {
        let has_trajectory = problem.minimizer(0).is_some();
        Recorder {
            problem,
            opts,
            has_trajectory,
            iterate_errors: Vec::with_capacity(opts.steps + 1),
            function_errors: Vec::new(),
            gradient_errors: Vec::new(),
            diverged_at: None,
            grad_buf: vec![S::zero(); problem.dimension()],
        }
    }

    /// Record metrics of iterate `x` at time `t`; returns `false` once the
    /// divergence cap is passed.
    fn observe(&mut self, t: usize, x: &[S]) -> bool {
        if self.has_trajectory {
            let m = self
                .problem
                .minimizer(t)
                .expect("trajectory availability must not depend on t");
            self.iterate_errors.push(dist2(x, &m));
            if self.opts.record_function_errors {
                let fstar = self
                    .problem
                    .optimal_value(t)
                    .expect("optimal value follows from the minimizer");
                self.function_errors.push(self.problem.value(t, x) - fstar);
            }
        }
        if self.opts.record_gradient_errors {
            self.problem.gradient_into(t, x, &mut self.grad_buf);
            self.gradient_errors.push(norm2(&self.grad_buf));
        }
        let xn = norm2(x);
        if !(xn <= self.opts.divergence_cap) {
            self.diverged_at = Some(t);
            return false;
        }
        true
    }

    fn finish(self, final_x: Vec<S>) -> Trace<S> {
        Trace {
            iterate_errors: self.has_trajectory.then_some(self.iterate_errors),
            function_errors: (self.has_trajectory && self.opts.record_function_errors)
                .then_some(self.function_errors),
            gradient_errors: self
                .opts
                .record_gradient_errors
                .then_some(self.gradient_errors),
            diverged_at: self.diverged_at,
            final_x,
        }
    }
}

/// Run `ALG(α,β,η)` from `x0` with the default pre-history `x₋₁ = x₀`.
pub fn run_alg<S: Scalar, P: FunctionSequence<S>>(
    problem: &P,
    params: &AlgParams<S>,
    x0: Vec<S>,
    opts: RunOptions<S>,
) -> Trace<S> {
    run_alg_from(problem, params, x0, None, opts)
}

/// Run `ALG(α,β,η)` with an explicit pre-history `x₋₁` (used by the
/// translating adversary's aligned start).
pub fn run_alg_from<S: Scalar, P: FunctionSequence<S>>(
    problem: &P,
    params: &AlgParams<S>,
    x0: Vec<S>,
    x_prev: Option<Vec<S>>,
    opts: RunOptions<S>,
) -> Trace<S> {
    let mut state = AlgState::new(x0, x_prev, params.eta);
    let mut rec = Recorder::new(problem, opts);
    if rec.observe(0, &state.x) {
        for t in 0..opts.steps {
            state.step(problem, params);
            if !rec.observe(t + 1, &state.x) {
                break;
            }
        }
    }
    rec.finish(state.x)
}

/// Run `OLNM(T)` from `x0`.
pub fn run_olnm<S: Scalar, P: FunctionSequence<S>>(
    problem: &P,
    params: &OlnmParams,
    x0: Vec<S>,
    opts: RunOptions<S>,
) -> Trace<S> {
    let mut state = OlnmState::new(x0);
    let mut rec = Recorder::new(problem, opts);
    if rec.observe(0, &state.x) {
        for t in 0..opts.steps {
            state.step(problem, params);
            if !rec.observe(t + 1, &state.x) {
                break;
            }
        }
    }
    rec.finish(state.x)
}

/// Run `ORGD(δ, x_c)` from `x0`. Metrics are measured against the *base*
/// problem (`∇f_t`, `x*_t`), not the regularized surrogate.
pub fn run_orgd<S: Scalar, P: FunctionSequence<S>>(
    problem: &P,
    params: &OrgdParams<S>,
    x0: Vec<S>,
    opts: RunOptions<S>,
) -> Trace<S> {
    let mut state = OrgdState::new(x0);
    let mut rec = Recorder::new(problem, opts);
    if rec.observe(0, &state.x) {
        for t in 0..opts.steps {
            state.step(problem, params);
            if !rec.observe(t + 1, &state.x) {
                break;
            }
        }
    }
    rec.finish(state.x)
}

/// The abstaining baseline: never move from `x_c`, just measure.
pub fn run_abstain<S: Scalar, P: FunctionSequence<S>>(
    problem: &P,
    x_c: &[S],
    opts: RunOptions<S>,
) -> Trace<S> {
    let mut rec = Recorder::new(problem, opts);
    for t in 0..=opts.steps {
        if !rec.observe(t, x_c) {
            break;
        }
    }
    rec.finish(x_c.to_vec())
}
