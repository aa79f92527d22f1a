//! The three-parameter family `ALG(α, β, η)`:
//!
//! ```text
//! x_{t+1} = x_t − α∇f_t(y_t) + β(x_t − x_{t−1})
//! y_{t+1} = x_{t+1} + η(x_{t+1} − x_t)
//! ```
//!
//! `β` is the momentum weight, `η` the extrapolation length. The named
//! presets cover plain online gradient descent (`β = η = 0`), the heavy-ball
//! parameters (`η = 0`), and the accelerated parameters (`η = β`).

use crate::problems::FunctionSequence;
use crate::scalar::{fp, Scalar};

/// Preset tag carried alongside the raw coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgPreset {
    Custom,
    Ogd,
    Polyak,
    Nesterov,
}

/// Coefficients of `ALG(α, β, η)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgParams<S> {
    pub alpha: S,
    pub beta: S,
    pub eta: S,
}

impl<S: Scalar> AlgParams<S> {
    pub fn custom(alpha: S, beta: S, eta: S) -> Self {
        AlgParams { alpha, beta, eta }
    }

    /// Plain online gradient descent with the given step size.
    pub fn ogd(alpha: S) -> Self {
        AlgParams {
            alpha,
            beta: S::zero(),
            eta: S::zero(),
        }
    }

    /// Gradient descent at the tracking-optimal step size `2/(μ+L)`.
    pub fn ogd_optimal(mu: S, l: S) -> Self {
        Self::ogd(fp::<S>(2.0) / (mu + l))
    }

    /// Heavy-ball preset: `α = 4/(√L+√μ)²`, `β = ((√L−√μ)/(√L+√μ))²`,
    /// `η = 0`.
    pub fn polyak(mu: S, l: S) -> Self {
        let sl = l.sqrt();
        let sm = mu.sqrt();
        let ratio = (sl - sm) / (sl + sm);
        AlgParams {
            alpha: fp::<S>(4.0) / ((sl + sm) * (sl + sm)),
            beta: ratio * ratio,
            eta: S::zero(),
        }
    }

    /// Accelerated preset: `α = 1/L`, `β = η = (√L−√μ)/(√L+√μ)`.
    pub fn nesterov(mu: S, l: S) -> Self {
        let sl = l.sqrt();
        let sm = mu.sqrt();
        let ratio = (sl - sm) / (sl + sm);
        AlgParams {
            alpha: S::one() / l,
            beta: ratio,
            eta: ratio,
        }
    }

    pub fn preset(&self) -> AlgPreset {
        if self.beta == S::zero() && self.eta == S::zero() {
            AlgPreset::Ogd
        } else if self.eta == S::zero() {
            AlgPreset::Polyak
        } else if self.eta == self.beta {
            AlgPreset::Nesterov
        } else {
            AlgPreset::Custom
        }
    }
}

/// Mutable iteration state of `ALG`.
#[derive(Debug, Clone)]
pub struct AlgState<S> {
    pub x: Vec<S>,
    pub x_prev: Vec<S>,
    pub y: Vec<S>,
    pub t: usize,
    grad: Vec<S>,
}

impl<S: Scalar> AlgState<S> {
    /// Start from `x₀` with optional pre-history `x₋₁` (defaults to `x₀`,
    /// which makes `y₀ = x₀`). The extrapolation point is initialized to
    /// `y₀ = x₀ + η(x₀ − x₋₁)`.
    pub fn new(x0: Vec<S>, x_prev: Option<Vec<S>>, eta: S) -> Self {
        let x_prev = x_prev.unwrap_or_else(|| x0.clone());
        assert_eq!(x0.len(), x_prev.len(), "pre-history dimension mismatch");
        let y: Vec<S> = x0
            .iter()
            .zip(&x_prev)
            .map(|(&xc, &xp)| xc + eta * (xc - xp))
            .collect();
        let dim = x0.len();
        AlgState {
            x: x0,
            x_prev,
            y,
            t: 0,
            grad: vec![S::zero(); dim],
        }
    }

    /// One update against `f_t` (the state's internal clock).
    pub fn step<P: FunctionSequence<S>>(&mut self, problem: &P, params: &AlgParams<S>) {
        problem.gradient_into(self.t, &self.y, &mut self.grad);
        for i in 0..self.x.len() {
            let xc = self.x[i];
            let xn = xc - params.alpha * self.grad[i] + params.beta * (xc - self.x_prev[i]);
            self.x_prev[i] = xc;
            self.x[i] = xn;
            self.y[i] = xn + params.eta * (xn - xc);
        }
        self.t += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{RotatingQuadratic, SmoothnessProfile, TranslatingQuadratic};

    #[test]
    fn preset_coefficients() {
        let mu = 1.0f64;
        let l = 9.0;
        let p = AlgParams::polyak(mu, l);
        // √L=3, √μ=1: α = 4/16 = 0.25, β = (2/4)² = 0.25.
        assert!((p.alpha - 0.25).abs() < 1e-15);
        assert!((p.beta - 0.25).abs() < 1e-15);
        assert_eq!(p.eta, 0.0);
        assert_eq!(p.preset(), AlgPreset::Polyak);

        let n = AlgParams::nesterov(mu, l);
        assert!((n.alpha - 1.0 / 9.0).abs() < 1e-15);
        assert!((n.beta - 0.5).abs() < 1e-15);
        assert_eq!(n.beta, n.eta);
        assert_eq!(n.preset(), AlgPreset::Nesterov);

        let o = AlgParams::ogd_optimal(mu, l);
        assert!((o.alpha - 0.2).abs() < 1e-15);
        assert_eq!(o.preset(), AlgPreset::Ogd);
    }

    #[test]
    fn two_steps_solve_the_rotating_quadratic_exactly() {
        let p = RotatingQuadratic::new(1.0f64, 4.0).unwrap();
        let params = AlgParams::ogd(0.25);
        let mut st = AlgState::new(vec![3.0, -2.0], None, params.eta);
        st.step(&p, &params);
        st.step(&p, &params);
        assert!(st.x[0].abs() < 1e-14);
        assert!(st.x[1].abs() < 1e-14);
    }

    #[test]
    fn static_minimizer_is_a_fixed_point() {
        let profile = SmoothnessProfile::new(1.0f64, 10.0, 0.0).unwrap();
        let params = AlgParams::nesterov(1.0, 10.0);
        let prob =
            TranslatingQuadratic::for_alg(profile, &params, vec![0.7, -0.3]).unwrap();
        // sigma = 0 means xi = 0 and the minimizer sits at x0 forever.
        let m = prob.minimizer(0).unwrap();
        let mut st = AlgState::new(m.clone(), None, params.eta);
        for _ in 0..25 {
            st.step(&prob, &params);
        }
        for (a, b) in st.x.iter().zip(&m) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn extrapolation_invariant_holds_after_every_step() {
        let p = RotatingQuadratic::new(1.0f64, 8.0).unwrap();
        let params = AlgParams::nesterov(1.0, 8.0);
        let mut st = AlgState::new(vec![1.0, 1.0], None, params.eta);
        for _ in 0..10 {
            st.step(&p, &params);
            for i in 0..2 {
                let expect = st.x[i] + params.eta * (st.x[i] - st.x_prev[i]);
                assert!((st.y[i] - expect).abs() < 1e-14);
            }
        }
    }
}
