//! Online Nesterov function: the adversarial sequence behind the first-order
//! tracking lower bound.
//!
//! Working in a `d`-dimensional truncation of ℓ₂(ℕ), the minimizer at time
//! `t` is a plateau followed by a geometric tail,
//!
//! ```text
//! x*_t(i) = s               for i <= t,
//! x*_t(i) = s·γ^(i−t)       for i > t,        s = σ·κ^(1/4),
//! ```
//!
//! with `γ = (√κ−1)/(√κ+1)`. Each step advances the plateau front by one
//! coordinate, and the ℓ₂ drift of the trajectory is exactly `σ` (slightly
//! less in the truncation). The function itself is block diagonal: curvature
//! `a ∈ [μ, L]` on the first `t` coordinates and the tridiagonal operator
//! `q·T + μI` on the tail, `q = (L−μ)/4`, `T = tridiag(−1, 2, −1)`, forced so
//! the stated trajectory is its minimizer. Any method whose iterates stay in
//! the span of observed gradients has `x_t(i) = 0` for `i > t` (when started
//! at the origin), hence an unavoidable tail error.
//!
//! The construction is shift-equivariant: passing the method's start point as
//! `x0_shift` translates the whole sequence so the method may start anywhere.

use super::{FunctionSequence, SmoothnessProfile};
use crate::error::TvError;
use crate::scalar::{fp, Scalar};
use crate::Result;

#[derive(Debug, Clone)]
pub struct OnlineNesterovFunction<S> {
    profile: SmoothnessProfile<S>,
    dim: usize,
    a: S,
    shift: Vec<S>,
    gamma: S,
    /// Plateau height `s = σ·κ^(1/4)` (the `γ^c` of the construction).
    scale: S,
    /// Tail coupling `q = (L−μ)/4`.
    q: S,
}

impl<S: Scalar> OnlineNesterovFunction<S> {
    /// Build the sequence. `a_param` is the head curvature (must lie in
    /// `[μ, L]`), `x0_shift` the method's start point (the canonical
    /// construction uses the origin), `dim` the truncation dimension.
    pub fn new(
        profile: SmoothnessProfile<S>,
        a_param: S,
        x0_shift: Vec<S>,
        dim: usize,
    ) -> Result<Self> {
        profile.validate()?;
        let kappa = profile.kappa().ok_or_else(|| {
            TvError::invalid("online Nesterov function needs mu > 0")
        })?;
        if kappa <= S::one() {
            return Err(TvError::invalid(format!(
                "online Nesterov function needs kappa > 1, got {kappa}"
            )));
        }
        if a_param < profile.mu || a_param > profile.l {
            return Err(TvError::invalid(format!(
                "head curvature must lie in [mu, l] = [{}, {}], got {a_param}",
                profile.mu, profile.l
            )));
        }
        if dim == 0 {
            return Err(TvError::invalid("dimension must be >= 1"));
        }
        if x0_shift.len() != dim {
            return Err(TvError::invalid(format!(
                "shift has dimension {}, expected {dim}",
                x0_shift.len()
            )));
        }
        let sqrt_kappa = kappa.sqrt();
        let gamma = (sqrt_kappa - S::one()) / (sqrt_kappa + S::one());
        let scale = profile.sigma * ((S::one() + gamma) / (S::one() - gamma)).sqrt();
        let q = (profile.l - profile.mu) / fp::<S>(4.0);
        Ok(OnlineNesterovFunction {
            profile,
            dim,
            a: a_param,
            shift: x0_shift,
            gamma,
            scale,
            q,
        })
    }

    /// Midpoint head curvature `(L+μ)/2` used by the figure experiments.
    pub fn head_curvature_mid(profile: &SmoothnessProfile<S>) -> S {
        (profile.l + profile.mu) / fp::<S>(2.0)
    }

    /// Head curvature `(L−μ)/4` for which gradient descent with step
    /// `4/(L−μ)` tracks at exactly the lower bound.
    pub fn head_curvature_flat(profile: &SmoothnessProfile<S>) -> S {
        (profile.l - profile.mu) / fp::<S>(4.0)
    }

    pub fn gamma(&self) -> S {
        self.gamma
    }

    /// Plateau height `s = σ·κ^(1/4)`.
    pub fn plateau(&self) -> S {
        self.scale
    }

    /// Exponent `c` with `γ^c` equal to the plateau height.
    pub fn c_exponent(&self) -> S {
        self.scale.ln() / self.gamma.ln()
    }

    /// Head curvature parameter `a`.
    pub fn a_param(&self) -> S {
        self.a
    }

    /// ℓ₂ norm of the minimizer mass beyond the truncation dimension,
    /// `s·γ^(d+1−t)/√(1−γ²)`; all error measurements carry this slack
    /// relative to the infinite-dimensional construction.
    ///
    /// Only meaningful while the plateau front is inside the truncation
    /// (`t < dim`); past that the infinite construction is no longer
    /// represented and the residual is reported as infinity.
    pub fn truncation_residual(&self, t: usize) -> S {
        if t >= self.dim {
            return S::infinity();
        }
        let pow = fp::<S>((self.dim - t) as f64);
        self.scale * self.gamma.powf(pow) * self.gamma
            / (S::one() - self.gamma * self.gamma).sqrt()
    }

    /// Plateau length at time `t` within the truncation.
    #[inline]
    fn head_len(&self, t: usize) -> usize {
        t.min(self.dim)
    }
}

impl<S: Scalar> FunctionSequence<S> for OnlineNesterovFunction<S> {
    fn dimension(&self) -> usize {
        self.dim
    }

    fn profile(&self) -> SmoothnessProfile<S> {
        self.profile
    }

    fn value(&self, t: usize, x: &[S]) -> S {
        assert_eq!(x.len(), self.dim, "dimension mismatch");
        let h = self.head_len(t);
        let half = fp::<S>(0.5);
        let mut acc = S::zero();
        // Head: ½·a·Σ (z_i − s)².
        for i in 0..h {
            let z = x[i] - self.shift[i];
            let dev = z - self.scale;
            acc += half * self.a * dev * dev;
        }
        // Tail: ½·zᵀ(qT + μI)z − q·s·z_first.
        let m = self.dim - h;
        if m > 0 {
            let zt = |j: usize| x[h + j] - self.shift[h + j];
            let mut tri = zt(0) * zt(0) + zt(m - 1) * zt(m - 1);
            for j in 0..m.saturating_sub(1) {
                let diff = zt(j + 1) - zt(j);
                tri += diff * diff;
            }
            let mut sq = S::zero();
            for j in 0..m {
                sq += zt(j) * zt(j);
            }
            acc += half * (self.q * tri + self.profile.mu * sq);
            acc -= self.q * self.scale * zt(0);
        }
        acc
    }

    fn gradient_into(&self, t: usize, x: &[S], out: &mut [S]) {
        assert_eq!(x.len(), self.dim, "dimension mismatch");
        assert_eq!(out.len(), self.dim, "dimension mismatch");
        let h = self.head_len(t);
        for i in 0..h {
            let z = x[i] - self.shift[i];
            out[i] = self.a * (z - self.scale);
        }
        let m = self.dim - h;
        if m > 0 {
            let two = fp::<S>(2.0);
            for j in 0..m {
                let z = x[h + j] - self.shift[h + j];
                let mut acc = two * z;
                if j > 0 {
                    acc -= x[h + j - 1] - self.shift[h + j - 1];
                }
                if j + 1 < m {
                    acc -= x[h + j + 1] - self.shift[h + j + 1];
                }
                out[h + j] = self.q * acc + self.profile.mu * z;
            }
            out[h] -= self.q * self.scale;
        }
    }

    fn minimizer(&self, t: usize) -> Option<Vec<S>> {
        let h = self.head_len(t);
        let mut m = self.shift.clone();
        for mi in m.iter_mut().take(h) {
            *mi += self.scale;
        }
        let mut pow = self.gamma;
        for mi in m.iter_mut().skip(h) {
            *mi += self.scale * pow;
            pow = pow * self.gamma;
        }
        Some(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dist2, norm2};

    fn build(kappa: f64, l: f64, sigma: f64, d: usize) -> OnlineNesterovFunction<f64> {
        let profile = SmoothnessProfile::from_kappa(kappa, l, sigma).unwrap();
        let a = OnlineNesterovFunction::head_curvature_mid(&profile);
        OnlineNesterovFunction::new(profile, a, vec![0.0; d], d).unwrap()
    }

    #[test]
    fn construction_identities() {
        let p = build(500.0, 500.0, 1.0, 100);
        let gamma = p.gamma();
        let kappa: f64 = 500.0;
        // γ = (√κ−1)/(√κ+1)
        let expect = (kappa.sqrt() - 1.0) / (kappa.sqrt() + 1.0);
        assert!((gamma - expect).abs() < 1e-15);
        // Plateau = σ·κ^{1/4}
        assert!((p.plateau() - kappa.powf(0.25)).abs() < 1e-12);
        // Tail recurrence identity: q(1−γ)² = μγ — this is what makes the
        // geometric profile the stationary solution of the tail block.
        let q = (500.0 - 1.0) / 4.0;
        assert!((q * (1.0 - gamma).powi(2) - 1.0 * gamma).abs() < 1e-12);
        // γ^c reproduces the plateau.
        assert!((gamma.powf(p.c_exponent()) - p.plateau()).abs() < 1e-10);
    }

    #[test]
    fn gradient_vanishes_at_claimed_minimizer_within_truncation_slack() {
        let p = build(100.0, 500.0, 1.0, 400);
        for t in [0usize, 1, 5, 40] {
            let m = p.minimizer(t).unwrap();
            let g = p.gradient(t, &m);
            let gn = norm2(&g);
            // The only non-zero entry is the truncated boundary condition.
            let slack = 10.0 * p.truncation_residual(t);
            assert!(gn <= slack.max(1e-12), "t={t}: |grad|={gn}, slack={slack}");
        }
    }

    #[test]
    fn drift_equals_sigma_within_truncation() {
        let p = build(500.0, 500.0, 1.0, 600);
        for t in [0usize, 3, 17, 100] {
            let a = p.minimizer(t).unwrap();
            let b = p.minimizer(t + 1).unwrap();
            let d = dist2(&a, &b);
            assert!(d <= 1.0 + 1e-12, "drift {d} exceeds sigma");
            assert!(d >= 1.0 - 1e-6, "drift {d} too far below sigma at t={t}");
        }
    }

    #[test]
    fn shift_translates_everything() {
        let profile = SmoothnessProfile::from_kappa(50.0, 100.0, 1.0).unwrap();
        let a = OnlineNesterovFunction::head_curvature_mid(&profile);
        let d = 60;
        let base = OnlineNesterovFunction::new(profile, a, vec![0.0; d], d).unwrap();
        let shift = vec![2.5; d];
        let moved = OnlineNesterovFunction::new(profile, a, shift.clone(), d).unwrap();
        let t = 7;
        let x: Vec<f64> = (0..d).map(|i| 0.1 * i as f64).collect();
        let x_shifted: Vec<f64> = x.iter().zip(&shift).map(|(a, b)| a + b).collect();
        assert!((base.value(t, &x) - moved.value(t, &x_shifted)).abs() < 1e-9);
        let gb = base.gradient(t, &x);
        let gm = moved.gradient(t, &x_shifted);
        for (a, b) in gb.iter().zip(&gm) {
            assert!((a - b).abs() < 1e-10);
        }
        let mb = base.minimizer(t).unwrap();
        let mm = moved.minimizer(t).unwrap();
        for (a, b) in mb.iter().zip(&mm) {
            assert!((a + 2.5 - b).abs() < 1e-12);
        }
    }

    #[test]
    fn truncation_residual_matches_direct_tail_sum() {
        let p = build(100.0, 100.0, 1.0, 50);
        let t = 10;
        let gamma = p.gamma();
        let s = p.plateau();
        // Direct sum of (s·γ^{i−t})² for i = d+1 .. huge.
        let mut acc = 0.0f64;
        for i in (51)..4000 {
            acc += (s * gamma.powi((i - t) as i32)).powi(2);
        }
        let direct = acc.sqrt();
        let formula = p.truncation_residual(t);
        assert!(
            ((direct - formula) / formula).abs() < 1e-10,
            "direct {direct} vs formula {formula}"
        );
        assert!(p.truncation_residual(50).is_infinite());
    }

    #[test]
    fn rejects_bad_parameters() {
        let profile = SmoothnessProfile::from_kappa(10.0, 10.0, 1.0).unwrap();
        // a outside [mu, l]
        assert!(
            OnlineNesterovFunction::new(profile, 0.5, vec![0.0; 10], 10).is_err()
        );
        assert!(OnlineNesterovFunction::new(profile, 11.0, vec![0.0; 10], 10).is_err());
        // kappa = 1
        let flat = SmoothnessProfile::from_kappa(1.0, 10.0, 1.0).unwrap();
        assert!(OnlineNesterovFunction::new(flat, 10.0, vec![0.0; 10], 10).is_err());
        // shift dimension mismatch
        assert!(OnlineNesterovFunction::new(profile, 5.0, vec![0.0; 9], 10).is_err());
    }

    #[test]
    fn tail_operator_spectrum_lies_in_mu_l() {
        // Dense symmetric eigendecomposition as an independent check that the
        // tail block curvature stays within the certified class constants.
        let mu = 1.0;
        let l = 100.0;
        let d = 50;
        let q = (l - mu) / 4.0;
        let mut m = nalgebra::DMatrix::<f64>::zeros(d, d);
        for i in 0..d {
            m[(i, i)] = 2.0 * q + mu;
            if i + 1 < d {
                m[(i, i + 1)] = -q;
                m[(i + 1, i)] = -q;
            }
        }
        let eig = nalgebra::SymmetricEigen::new(m);
        for &lam in eig.eigenvalues.iter() {
            assert!(
                lam >= mu - 1e-9 && lam <= l + 1e-9,
                "tail eigenvalue {lam} outside [{mu}, {l}]"
            );
        }
    }

    #[test]
    fn finite_difference_gradient_check() {
        let p = build(50.0, 200.0, 1.0, 40);
        let t = 12;
        let x: Vec<f64> = (0..40).map(|i| (i as f64 * 0.7).sin()).collect();
        let g = p.gradient(t, &x);
        let eps = 1e-6;
        for i in (0..40).step_by(7) {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += eps;
            xm[i] -= eps;
            let fd = (p.value(t, &xp) - p.value(t, &xm)) / (2.0 * eps);
            assert!(
                (fd - g[i]).abs() <= 1e-5 * (1.0 + g[i].abs()),
                "coordinate {i}: fd {fd} vs grad {}",
                g[i]
            );
        }
    }
}
