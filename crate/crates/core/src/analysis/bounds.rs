//! Closed-form worst-case tracking bounds for each solver family.
//!
//! All bounds are asymptotic ceilings on the iterate tracking error
//! `limsup ‖x_t − x*_t‖` (the regularized and abstaining entries bound the
//! *gradient* tracking error instead, matching how those baselines are
//! analyzed). A field is `None` when its defining condition fails — never
//! silently zero.

use crate::problems::SmoothnessProfile;
use crate::scalar::{fp, Scalar};
use crate::solvers::AlgParams;

/// Estimated regularization quantities needed by the `ORGD` and abstain
/// bounds: `σ(δ)`, `R(δ)` at the chosen `δ`, and `R(0)` for the abstainer.
#[derive(Debug, Clone, Copy)]
pub struct DeltaInfo<S> {
    pub sigma_delta: S,
    pub r_delta: S,
    pub r_zero: S,
}

/// Evaluated tracking-error ceilings for one `(μ, L, σ)` profile.
#[derive(Debug, Clone, Copy)]
pub struct BoundSet<S> {
    /// `σ/(αμ)` — gradient-descent family at step size `α`; needs `μ > 0`.
    pub ogd_upper: Option<S>,
    /// `(κ+1)σ/2` — the previous bound at its best step `α = 2/(μ+L)`.
    pub ogd_optimal: Option<S>,
    /// `(√κ−1)σ/2` — no first-order method does better on the worst sequence.
    pub lower_bound: Option<S>,
    /// `2c(c−1)√κσ/(c−2)` with `c = T/√κ` — long-step restarts, needs `c > 2`.
    pub olnm_upper: Option<S>,
    /// `2√2·L·√(σ(δ)R(δ))` — regularized gradient descent, on `‖∇f_t(x_t)‖`.
    pub orgd_upper: Option<S>,
    /// `L·R(0)` — never moving from the center, on `‖∇f_t(x_t)‖`.
    pub abstain_upper: Option<S>,
}

/// The dimensionless long-step coefficient `2c(c−1)/(c−2)`, minimized at
/// `c = 2+√2` where it equals `6+4√2 ≈ 11.657`.
pub fn olnm_bound_coefficient<S: Scalar>(c: S) -> Option<S> {
    let two = fp::<S>(2.0);
    if c > two {
        Some(two * c * (c - S::one()) / (c - two))
    } else {
        None
    }
}

/// Evaluate every applicable bound for `profile`.
///
/// * `alg_params` supplies the step size for `ogd_upper`.
/// * `t_period` is the restart length for `olnm_upper`.
/// * `delta_info` supplies the regularization estimates for `orgd_upper` and
///   `abstain_upper`.
pub fn evaluate_bounds<S: Scalar>(
    profile: &SmoothnessProfile<S>,
    alg_params: Option<&AlgParams<S>>,
    t_period: Option<usize>,
    delta_info: Option<&DeltaInfo<S>>,
) -> BoundSet<S> {
    let mu = profile.mu;
    let l = profile.l;
    let sigma = profile.sigma;
    let half = fp::<S>(0.5);

    let kappa = profile.kappa();

    let ogd_upper = match (alg_params, mu > S::zero()) {
        (Some(p), true) if p.alpha > S::zero() => Some(sigma / (p.alpha * mu)),
        _ => None,
    };
    let ogd_optimal = kappa.map(|k| (k + S::one()) * sigma * half);
    let lower_bound = kappa.map(|k| (k.sqrt() - S::one()) * sigma * half);
    let olnm_upper = match (kappa, t_period) {
        (Some(k), Some(t)) if t > 0 => {
            let c = fp::<S>(t as f64) / k.sqrt();
            olnm_bound_coefficient(c).map(|coef| coef * k.sqrt() * sigma)
        }
        _ => None,
    };
    let orgd_upper = delta_info.map(|d| {
        let two = fp::<S>(2.0);
        two * two.sqrt() * l * (d.sigma_delta * d.r_delta).sqrt()
    });
    let abstain_upper = delta_info.map(|d| l * d.r_zero);

    BoundSet {
        ogd_upper,
        ogd_optimal,
        lower_bound,
        olnm_upper,
        orgd_upper,
        abstain_upper,
    }
}
