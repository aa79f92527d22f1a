//! Spectral stability of `ALG(α,β,η)` on the rotating quadratic.
//!
//! On the alternating two-dimensional quadratic each coordinate obeys the
//! scalar recurrence `x_{t+1} = a(c_t)·x_t + b(c_t)·x_{t−1}` with
//! `a(c) = (1+β)−(1+η)αc` and `b(c) = −β+ηαc`, where the curvature `c_t`
//! alternates between `L` and `μ`. The two-step transfer matrix `D` (and its
//! swapped twin `E`) share trace `a₊a₋+b₊+b₋` and determinant `b₊b₋`, so the
//! asymptotic per-two-step growth factor is the larger root modulus of
//! `λ² − tr(D)λ + det(D) = 0`, which also equals the spectral radius of the
//! full 4×4 two-step matrix `C`.

use crate::error::TvError;
use crate::scalar::{fp, Scalar};
use crate::solvers::{AlgParams, AlgPreset};
use crate::Result;

/// Stability analysis of one `(α,β,η,μ,L)` tuple on the rotating quadratic.
#[derive(Debug, Clone, Copy)]
pub struct StabilityReport<S> {
    /// `(1+β) − (1+η)αL`.
    pub a_plus: S,
    /// `(1+β) − (1+η)αμ`.
    pub a_minus: S,
    /// `−β + ηαL`.
    pub b_plus: S,
    /// `−β + ηαμ`.
    pub b_minus: S,
    /// `tr(D) = a₊a₋ + b₊ + b₋`.
    pub trace: S,
    /// `det(D) = b₊b₋`.
    pub det: S,
    /// Spectral radius of the two-step transfer matrix.
    pub rho: S,
    /// `rho < 1`.
    pub stable: bool,
    /// The published closed-form growth factor `6((√κ−1)/(√κ+1))²` when the
    /// parameters match the heavy-ball preset. Note: this expression equals
    /// `|tr(D)| = 6β`, which over-states the true radius — the exact value is
    /// `(3+2√2)β ≈ 5.828β`, a constant factor `6/(3+2√2) ≈ 1.0294` smaller.
    /// Both are reported so the discrepancy is observable.
    pub polyak_closed_form: Option<S>,
}

/// The published heavy-ball growth expression `6((√κ−1)/(√κ+1))²`.
pub fn polyak_growth_formula<S: Scalar>(kappa: S) -> S {
    let r = (kappa.sqrt() - S::one()) / (kappa.sqrt() + S::one());
    fp::<S>(6.0) * r * r
}

/// Larger root modulus of `λ² − tr·λ + det = 0`.
fn quadratic_root_radius<S: Scalar>(trace: S, det: S) -> S {
    let four = fp::<S>(4.0);
    let half = fp::<S>(0.5);
    let disc = trace * trace - four * det;
    if disc >= S::zero() {
        let s = disc.sqrt();
        let r1 = (trace + s) * half;
        let r2 = (trace - s) * half;
        r1.abs().max(r2.abs())
    } else {
        // Complex pair: modulus √det (det > 0 whenever the discriminant is
        // negative).
        det.sqrt()
    }
}

/// Analyze `ALG(α,β,η)` on the rotating quadratic with curvatures `μ ≤ L`.
pub fn rotating_spectral_radius<S: Scalar>(
    alpha: S,
    beta: S,
    eta: S,
    mu: S,
    l: S,
) -> Result<StabilityReport<S>> {
    if !(mu > S::zero()) || !(l >= mu) {
        return Err(TvError::invalid(format!(
            "rotating stability needs 0 < mu <= L, got mu={mu}, L={l}"
        )));
    }
    let one = S::one();
    let a_plus = (one + beta) - (one + eta) * alpha * l;
    let a_minus = (one + beta) - (one + eta) * alpha * mu;
    let b_plus = -beta + eta * alpha * l;
    let b_minus = -beta + eta * alpha * mu;
    let trace = a_plus * a_minus + b_plus + b_minus;
    let det = b_plus * b_minus;
    let rho = quadratic_root_radius(trace, det);

    let params = AlgParams::custom(alpha, beta, eta);
    let polyak_closed_form = matches_polyak(&params, mu, l)
        .then(|| polyak_growth_formula(l / mu));

    Ok(StabilityReport {
        a_plus,
        a_minus,
        b_plus,
        b_minus,
        trace,
        det,
        rho,
        stable: rho < one,
        polyak_closed_form,
    })
}

fn matches_polyak<S: Scalar>(params: &AlgParams<S>, mu: S, l: S) -> bool {
    let reference = AlgParams::polyak(mu, l);
    let tol = fp::<S>(1e-9);
    let close = |a: S, b: S| (a - b).abs() <= tol * (S::one() + a.abs().max(b.abs()));
    close(params.alpha, reference.alpha)
        && close(params.beta, reference.beta)
        && close(params.eta, reference.eta)
        && params.preset() == AlgPreset::Polyak
}

#[cfg(test)]
mod tests {
    use super::*;

    fn polyak_report(kappa: f64) -> StabilityReport<f64> {
        let (mu, l) = (1.0, kappa);
        let p = AlgParams::polyak(mu, l);
        rotating_spectral_radius(p.alpha, p.beta, p.eta, mu, l).unwrap()
    }

    #[test]
    fn one_over_l_gradient_step_has_zero_radius() {
        let r = rotating_spectral_radius(1.0f64 / 7.0, 0.0, 0.0, 1.0, 7.0).unwrap();
        assert_eq!(r.a_plus, 0.0);
        assert!(r.rho.abs() < 1e-15);
        assert!(r.stable);
    }

    #[test]
    fn heavy_ball_closed_form_and_true_radius_differ_by_a_constant() {
        let r = polyak_report(9.0);
        let beta = 0.25;
        assert!((r.trace + 6.0 * beta).abs() < 1e-14, "tr(D) = -6β");
        assert!((r.det - beta * beta).abs() < 1e-15);
        let closed = r.polyak_closed_form.unwrap();
        assert!((closed - 1.5).abs() < 1e-14);
        let true_rho = (3.0 + 2.0 * 2.0f64.sqrt()) * beta;
        assert!((r.rho - true_rho).abs() < 1e-13);
        // The published expression equals |trace|, not the radius: the ratio
        // is 6/(3+2√2) ≈ 1.0294 for every kappa.
        for kappa in [6.0, 10.0, 50.0, 100.0] {
            let r = polyak_report(kappa);
            let ratio = r.polyak_closed_form.unwrap() / r.rho;
            assert!((ratio - 6.0 / (3.0 + 2.0 * 2.0f64.sqrt())).abs() < 1e-10);
        }
    }

    #[test]
    fn heavy_ball_stability_boundary() {
        // True boundary: rho = (3+2√2)β = 1 at kappa = 3+2√2.
        let kc = 3.0 + 2.0 * 2.0f64.sqrt();
        let r = polyak_report(kc);
        assert!((r.rho - 1.0).abs() < 1e-12);
        assert!(polyak_report(kc - 0.3).stable);
        assert!(!polyak_report(kc + 0.3).stable);
        // kappa = 5 sits below the boundary; 6 sits above.
        assert!(polyak_report(5.0).stable);
        assert!(!polyak_report(6.0).stable);
    }

    #[test]
    fn momentum_with_eta_below_beta_is_stable_at_short_step() {
        for &(mu, l) in &[(1.0, 2.0), (1.0, 10.0), (0.5, 400.0)] {
            for &beta in &[0.0, 0.3, 0.7, 0.95] {
                for &eta in &[0.0, beta / 2.0, beta] {
                    let r = rotating_spectral_radius(1.0 / l, beta, eta, mu, l).unwrap();
                    assert!(
                        r.rho < 1.0,
                        "alpha=1/L, beta={beta}, eta={eta}, mu={mu}, L={l}: rho={}",
                        r.rho
                    );
                }
            }
        }
    }

    #[test]
    fn closed_form_only_reported_for_the_heavy_ball_preset() {
        let r = rotating_spectral_radius(0.1, 0.2, 0.2, 1.0, 9.0).unwrap();
        assert!(r.polyak_closed_form.is_none());
    }

    #[test]
    fn rejects_degenerate_curvatures() {
        assert!(rotating_spectral_radius(0.1, 0.0, 0.0, 0.0, 1.0).is_err());
        assert!(rotating_spectral_radius(0.1, 0.0, 0.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn radius_matches_dense_two_step_eigensolve() {
        // Oracle: build the 4×4 two-step matrix C over the state
        // (x_t, x_{t−1}) ∈ R⁴ and take its eigenvalue moduli.
        use nalgebra::DMatrix;
        let step = |a: [f64; 2], alpha: f64, beta: f64, eta: f64| {
            let mut m = DMatrix::<f64>::zeros(4, 4);
            for i in 0..2 {
                m[(i, i)] = (1.0 + beta) - (1.0 + eta) * alpha * a[i];
                m[(i, i + 2)] = -beta + eta * alpha * a[i];
                m[(i + 2, i)] = 1.0;
            }
            m
        };
        let mut rng_state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            // xorshift64* — simple deterministic parameter scrambler.
            rng_state ^= rng_state >> 12;
            rng_state ^= rng_state << 25;
            rng_state ^= rng_state >> 27;
            (rng_state.wrapping_mul(0x2545F4914F6CDD1D) >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..200 {
            let mu = 0.1 + next() * 2.0;
            let l = mu * (1.0 + next() * 50.0);
            let alpha = next() * 2.0 / l;
            let beta = next();
            let eta = next();
            let rep = rotating_spectral_radius(alpha, beta, eta, mu, l).unwrap();
            let c = step([mu, l], alpha, beta, eta) * step([l, mu], alpha, beta, eta);
            let rho_dense = c
                .complex_eigenvalues()
                .iter()
                .map(|z| (z.re * z.re + z.im * z.im).sqrt())
                .fold(0.0f64, f64::max);
            assert!(
                (rep.rho - rho_dense).abs() <= 1e-10 * (1.0 + rho_dense),
                "trace/det radius {} vs dense {}",
                rep.rho,
                rho_dense
            );
        }
    }
}
