//! Regularization machinery: batch minimization of `f_t + (δ/2)‖·−x_c‖²`,
//! estimation of the drift/radius curves `σ(δ)` and `R(δ)`, and the
//! fixed-point condition `h(δ) = σ(δ)/R(δ) − 2(δ/L)² = 0` whose root is the
//! tuning `δ* = L√(σ(δ*)/(2R(δ*)))`.

use crate::error::TvError;
use crate::linalg::dist2;
use crate::problems::{FunctionSequence, Regularized};
use crate::scalar::{fp, Scalar};
use crate::Result;

/// Gradient-norm tolerance for batch minimizers used as ground truth.
pub const BATCH_GRAD_TOL: f64 = 1e-10;

const BATCH_MAX_ITER: usize = 500_000;

/// Minimize `f_t` (the `t`-th function of `problem`) by an accelerated
/// batch method, to gradient norm ≤ `grad_tol`.
///
/// Uses the problem's smoothness profile: step `1/L` with constant momentum
/// `(√κ−1)/(√κ+1)` when `μ > 0`, and the classical vanishing-momentum
/// schedule otherwise.
pub fn batch_minimize<S: Scalar, P: FunctionSequence<S>>(
    problem: &P,
    t: usize,
    x0: &[S],
    grad_tol: S,
    max_iter: usize,
) -> Result<Vec<S>> {
    let profile = problem.profile();
    let l = profile.l;
    let mu = profile.mu;
    if !(l > S::zero()) {
        return Err(TvError::invalid("batch minimization needs L > 0"));
    }
    let inv_l = S::one() / l;
    let strongly_convex = mu > S::zero();
    let fixed_momentum = if strongly_convex {
        let sk = (l / mu).sqrt();
        (sk - S::one()) / (sk + S::one())
    } else {
        S::zero()
    };

    let dim = problem.dimension();
    let mut x = x0.to_vec();
    let mut y = x0.to_vec();
    let mut grad = vec![S::zero(); dim];
    let mut a = S::one();
    for _ in 0..max_iter {
        problem.gradient_into(t, &x, &mut grad);
        let gn: S = grad.iter().map(|&g| g * g).sum::<S>().sqrt();
        if gn <= grad_tol {
            return Ok(x);
        }
        problem.gradient_into(t, &y, &mut grad);
        let momentum = if strongly_convex {
            fixed_momentum
        } else {
            let four = fp::<S>(4.0);
            let half = fp::<S>(0.5);
            let a_next = (S::one() + (S::one() + four * a * a).sqrt()) * half;
            let m = (a - S::one()) / a_next;
            a = a_next;
            m
        };
        for i in 0..dim {
            let x_new = y[i] - inv_l * grad[i];
            y[i] = x_new + momentum * (x_new - x[i]);
            x[i] = x_new;
        }
    }
    Err(TvError::NoConvergence(format!(
        "batch minimizer did not reach gradient norm {grad_tol} in {max_iter} iterations"
    )))
}

/// Estimated `σ(δ)`, `R(δ)` and `h(δ)` over a δ grid, with the fixed-point
/// root.
#[derive(Debug, Clone)]
pub struct RegularizationCurve<S> {
    pub deltas: Vec<S>,
    /// Ensemble-mean of `sup_t ‖x*_t(δ) − x*_{t−1}(δ)‖`.
    pub sigma: Vec<S>,
    /// Ensemble-mean of `sup_t ‖x*_t(δ) − x_c‖`.
    pub r: Vec<S>,
    /// `h(δ) = σ(δ)/R(δ) − 2(δ/L)²`.
    pub h: Vec<S>,
    /// Root of the gridded `h`, when locatable.
    pub delta_star: Option<DeltaStar<S>>,
    /// Largest increase of `R` between consecutive grid points (Monte-Carlo
    /// noise aside, `R` should be nonincreasing in δ).
    pub r_monotonicity_violation: S,
}

/// `h(δ)` from estimated drift and radius; a vanished radius is treated as
/// zero drift ratio.
pub fn h_value<S: Scalar>(sigma: S, r: S, delta: S, l: S) -> S {
    let ratio = if r > S::zero() { sigma / r } else { S::zero() };
    let scaled = delta / l;
    ratio - fp::<S>(2.0) * scaled * scaled
}

/// A 32-point logarithmic δ grid spanning `[10⁻³·L, L]`.
pub fn default_delta_grid<S: Scalar>(l: S) -> Vec<S> {
    let n = 32;
    let lo = (fp::<S>(1e-3) * l).ln();
    let hi = l.ln();
    (0..n)
        .map(|i| {
            let f = fp::<S>(i as f64 / (n - 1) as f64);
            (lo + f * (hi - lo)).exp()
        })
        .collect()
}

/// Estimate `σ(δ)` and `R(δ)` over `delta_grid` for an ensemble of problem
/// instances (one per replication), averaging the per-instance suprema over
/// `t = 0..=horizon`.
///
/// Regularized minimizers are computed by [`batch_minimize`] to gradient norm
/// [`BATCH_GRAD_TOL`], warm-started along t.
pub fn estimate_regularization_curve<S: Scalar, P: FunctionSequence<S>>(
    ensemble: &[P],
    x_c: &[S],
    delta_grid: &[S],
    horizon: usize,
) -> Result<RegularizationCurve<S>> {
    if ensemble.is_empty() {
        return Err(TvError::invalid("regularization curve needs a nonempty ensemble"));
    }
    if delta_grid.is_empty() {
        return Err(TvError::invalid("regularization curve needs a nonempty δ grid"));
    }
    for w in delta_grid.windows(2) {
        if !(w[1] > w[0]) {
            return Err(TvError::invalid("δ grid must be strictly increasing"));
        }
    }
    let n_reps = fp::<S>(ensemble.len() as f64);
    let grad_tol = fp::<S>(BATCH_GRAD_TOL);
    let mut sigma = vec![S::zero(); delta_grid.len()];
    let mut r = vec![S::zero(); delta_grid.len()];

    for problem in ensemble {
        let base_mu = problem.profile().mu;
        for (k, &delta) in delta_grid.iter().enumerate() {
            if !(base_mu + delta > S::zero()) {
                return Err(TvError::invalid(
                    "δ grid must be positive when the base problem is not strongly convex",
                ));
            }
            let reg = Regularized::new(problem, delta, x_c.to_vec())?;
            let mut prev = batch_minimize(&reg, 0, x_c, grad_tol, BATCH_MAX_ITER)?;
            let mut sup_drift = S::zero();
            let mut sup_radius = dist2(&prev, x_c);
            for t in 1..=horizon {
                let cur = batch_minimize(&reg, t, &prev, grad_tol, BATCH_MAX_ITER)?;
                sup_drift = sup_drift.max(dist2(&cur, &prev));
                sup_radius = sup_radius.max(dist2(&cur, x_c));
                prev = cur;
            }
            sigma[k] += sup_drift / n_reps;
            r[k] += sup_radius / n_reps;
        }
    }

    let l = ensemble[0].profile().l;
    let h: Vec<S> = delta_grid
        .iter()
        .zip(sigma.iter().zip(&r))
        .map(|(&d, (&s, &rr))| h_value(s, rr, d, l))
        .collect();
    let mut violation = S::zero();
    for w in r.windows(2) {
        violation = violation.max(w[1] - w[0]);
    }
    let delta_star = solve_delta_fixed_point_on_grid(delta_grid, &h).ok();
    Ok(RegularizationCurve {
        deltas: delta_grid.to_vec(),
        sigma,
        r,
        h,
        delta_star,
        r_monotonicity_violation: violation,
    })
}

/// A located root of `h`, or the best available surrogate.
#[derive(Debug, Clone, Copy)]
pub struct DeltaStar<S> {
    pub delta: S,
    pub h_at_delta: S,
    /// True when a sign change genuinely bracketed the root; false when `h`
    /// never changed sign and the reported δ merely minimizes `|h|`.
    pub bracketed: bool,
}

/// Bisection root of a continuous `h` on `[delta_lo, l]`, stopping at
/// `|h(δ)| ≤ tol`.
///
/// Without a sign change on the interval, returns the endpoint with the
/// smaller `|h|`, marked unbracketed.
pub fn solve_delta_fixed_point<S: Scalar>(
    h: impl Fn(S) -> S,
    delta_lo: S,
    l: S,
    tol: S,
) -> Result<DeltaStar<S>> {
    if !(delta_lo > S::zero()) || !(l > delta_lo) {
        return Err(TvError::invalid(format!(
            "fixed-point bracket needs 0 < delta_lo < L, got {delta_lo}, {l}"
        )));
    }
    let mut lo = delta_lo;
    let mut hi = l;
    let mut h_lo = h(lo);
    let mut h_hi = h(hi);
    for (d, hd) in [(lo, h_lo), (hi, h_hi)] {
        if hd.abs() <= tol {
            return Ok(DeltaStar {
                delta: d,
                h_at_delta: hd,
                bracketed: true,
            });
        }
    }
    if h_lo * h_hi > S::zero() {
        let (delta, h_at_delta) = if h_lo.abs() <= h_hi.abs() {
            (lo, h_lo)
        } else {
            (hi, h_hi)
        };
        return Ok(DeltaStar {
            delta,
            h_at_delta,
            bracketed: false,
        });
    }
    let width_floor = fp::<S>(1e-15) * l;
    let half = fp::<S>(0.5);
    let mut mid = (lo + hi) * half;
    let mut h_mid = h(mid);
    for _ in 0..200 {
        if h_mid.abs() <= tol || (hi - lo) <= width_floor {
            break;
        }
        if h_lo * h_mid <= S::zero() {
            hi = mid;
            h_hi = h_mid;
        } else {
            lo = mid;
            h_lo = h_mid;
        }
        let _ = h_hi;
        mid = (lo + hi) * half;
        h_mid = h(mid);
    }
    Ok(DeltaStar {
        delta: mid,
        h_at_delta: h_mid,
        bracketed: true,
    })
}

/// Root of a gridded `h` by linear interpolation between the first pair of
/// grid points with a sign change; falls back to the grid minimizer of `|h|`
/// (unbracketed) when there is none.
pub fn solve_delta_fixed_point_on_grid<S: Scalar>(
    deltas: &[S],
    h: &[S],
) -> Result<DeltaStar<S>> {
    if deltas.is_empty() || deltas.len() != h.len() {
        return Err(TvError::invalid(
            "grid fixed point needs matching nonempty δ and h arrays",
        ));
    }
    for (i, w) in h.windows(2).enumerate() {
        if w[0] == S::zero() {
            return Ok(DeltaStar {
                delta: deltas[i],
                h_at_delta: S::zero(),
                bracketed: true,
            });
        }
        if w[0] * w[1] < S::zero() {
            let frac = w[0] / (w[0] - w[1]);
            let delta = deltas[i] + frac * (deltas[i + 1] - deltas[i]);
            return Ok(DeltaStar {
                delta,
                h_at_delta: S::zero(),
                bracketed: true,
            });
        }
    }
    if *h.last().unwrap() == S::zero() {
        return Ok(DeltaStar {
            delta: *deltas.last().unwrap(),
            h_at_delta: S::zero(),
            bracketed: true,
        });
    }
    let (best, &hb) = h
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.abs().partial_cmp(&b.abs()).unwrap())
        .unwrap();
    Ok(DeltaStar {
        delta: deltas[best],
        h_at_delta: hb,
        bracketed: false,
    })
}
