//! Random-walk least squares: `f_t(x) = ½‖Ax − b_t‖²` where `b_t` follows a
//! planted parameter vector drifting on a random walk, plus low-level output
//! noise.

use super::haar::{sample_haar_orthogonal, sample_unit_sphere};
use crate::error::TvError;
use crate::linalg::{dist2, linspace, DenseMatrix, QrLstsq};
use crate::problems::{FunctionSequence, SmoothnessProfile};
use crate::scalar::{fp, Scalar};
use crate::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

/// Generator settings for a least-squares sequence.
#[derive(Debug, Clone, Copy)]
pub struct LeastSquaresSequenceSpec<S> {
    /// Output rows of `A`.
    pub n: usize,
    /// Parameter dimension (columns of `A`); must satisfy `d ≤ n`.
    pub d: usize,
    /// Target condition number of `AᵀA`: singular values of `A` equally
    /// spaced from `1/√κ` to `1`, so `L = 1` and `μ = 1/κ`.
    pub kappa: S,
    /// Length of every random-walk step of the planted parameters.
    pub sigma: S,
    /// Standard deviation of the Gaussian noise added to each output.
    pub noise_std: S,
    /// Number of time steps generated (functions are defined for
    /// `t = 0..=horizon`; later `t` clamp to the final function).
    pub horizon: usize,
    pub seed: u64,
}

impl<S: Scalar> LeastSquaresSequenceSpec<S> {
    /// The standard setting: `n = 20`, `d = 5`, walk length 1, noise 1e−3.
    pub fn standard(kappa: S, horizon: usize, seed: u64) -> Self {
        LeastSquaresSequenceSpec {
            n: 20,
            d: 5,
            kappa,
            sigma: S::one(),
            noise_std: fp::<S>(1e-3),
            horizon,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.d == 0 {
            return Err(TvError::invalid("least squares needs n >= 1 and d >= 1"));
        }
        if self.d > self.n {
            return Err(TvError::invalid(format!(
                "least squares needs d <= n for strong convexity, got d={} n={}",
                self.d, self.n
            )));
        }
        if !(self.kappa >= S::one()) {
            return Err(TvError::invalid(format!(
                "condition number must be >= 1, got {}",
                self.kappa
            )));
        }
        if self.sigma < S::zero() || self.noise_std < S::zero() {
            return Err(TvError::invalid("sigma and noise_std must be >= 0"));
        }
        Ok(())
    }
}

/// A generated least-squares sequence with its exact minimizer trajectory.
#[derive(Debug, Clone)]
pub struct LeastSquaresSequence<S> {
    a: DenseMatrix<S>,
    /// Observed outputs per time step (`horizon + 1` vectors of length n).
    b: Vec<Vec<S>>,
    /// Planted random-walk parameters (noiseless trajectory).
    walk: Vec<Vec<S>>,
    /// Exact minimizers of `f_t` (differ from `walk` by the noise pullback).
    minimizers: Vec<Vec<S>>,
    profile: SmoothnessProfile<S>,
    spec_sigma: S,
}

/// Generate a sequence from the spec.
///
/// Randomness order per seed: Haar factors `U` then `V`, then per step
/// `t ≥ 1` a sphere direction, then per step `t ≥ 0` the output noise.
pub fn build_least_squares_sequence<S: Scalar>(
    spec: &LeastSquaresSequenceSpec<S>,
) -> Result<LeastSquaresSequence<S>> {
    spec.validate()?;
    let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);
    let n = spec.n;
    let d = spec.d;

    let u = sample_haar_orthogonal::<S, _>(n, &mut rng);
    let v = sample_haar_orthogonal::<S, _>(d, &mut rng);
    let s = if d == 1 {
        vec![S::one()]
    } else {
        linspace(S::one() / spec.kappa.sqrt(), S::one(), d)
    };
    let mut a = DenseMatrix::<S>::zeros(n, d);
    for i in 0..n {
        for k in 0..d {
            let mut acc = S::zero();
            for (j, &sj) in s.iter().enumerate() {
                acc += sj * u[(i, j)] * v[(k, j)];
            }
            a[(i, k)] = acc;
        }
    }

    let mut walk = Vec::with_capacity(spec.horizon + 1);
    walk.push(vec![S::one(); d]);
    for _ in 1..=spec.horizon {
        let dir = sample_unit_sphere::<S, _>(d, &mut rng);
        let prev = walk.last().unwrap();
        walk.push(
            prev.iter()
                .zip(&dir)
                .map(|(&p, &u)| p + spec.sigma * u)
                .collect(),
        );
    }

    let mut b = Vec::with_capacity(spec.horizon + 1);
    for xstar in &walk {
        let mut bt = a.matvec(xstar);
        for e in bt.iter_mut() {
            let z: f64 = rng.sample(StandardNormal);
            *e += spec.noise_std * fp::<S>(z);
        }
        b.push(bt);
    }

    let lstsq = QrLstsq::new(&a)?;
    let minimizers: Vec<Vec<S>> = b.iter().map(|bt| lstsq.solve(bt)).collect();

    let mut drift = S::zero();
    for w in minimizers.windows(2) {
        drift = drift.max(dist2(&w[0], &w[1]));
    }
    let s_min = s
        .iter()
        .cloned()
        .fold(S::infinity(), S::min);
    let s_max = s.iter().cloned().fold(S::zero(), S::max);
    let profile = SmoothnessProfile::new(s_min * s_min, s_max * s_max, drift)?;

    Ok(LeastSquaresSequence {
        a,
        b,
        walk,
        minimizers,
        profile,
        spec_sigma: spec.sigma,
    })
}

impl<S: Scalar> LeastSquaresSequence<S> {
    pub fn matrix(&self) -> &DenseMatrix<S> {
        &self.a
    }

    pub fn horizon(&self) -> usize {
        self.b.len() - 1
    }

    fn clamp(&self, t: usize) -> usize {
        t.min(self.horizon())
    }

    pub fn targets(&self, t: usize) -> &[S] {
        &self.b[self.clamp(t)]
    }

    /// The planted (noise-free) parameter at step `t`.
    pub fn walk_point(&self, t: usize) -> &[S] {
        &self.walk[self.clamp(t)]
    }

    /// The walk step length requested by the spec (the profile's `sigma`
    /// field holds the realized minimizer drift instead).
    pub fn spec_sigma(&self) -> S {
        self.spec_sigma
    }
}

impl<S: Scalar> FunctionSequence<S> for LeastSquaresSequence<S> {
    fn dimension(&self) -> usize {
        self.a.cols()
    }

    fn profile(&self) -> SmoothnessProfile<S> {
        self.profile
    }

    fn value(&self, t: usize, x: &[S]) -> S {
        let bt = self.targets(t);
        let r = self.a.matvec(x);
        let half = fp::<S>(0.5);
        half * r
            .iter()
            .zip(bt)
            .map(|(&ri, &bi)| (ri - bi) * (ri - bi))
            .sum::<S>()
    }

    fn gradient_into(&self, t: usize, x: &[S], out: &mut [S]) {
        let bt = self.targets(t);
        let mut r = self.a.matvec(x);
        for (ri, &bi) in r.iter_mut().zip(bt) {
            *ri -= bi;
        }
        self.a.t_matvec_into(&r, out);
    }

    fn minimizer(&self, t: usize) -> Option<Vec<S>> {
        Some(self.minimizers[self.clamp(t)].clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm2;

    fn spec(kappa: f64, noise: f64, seed: u64) -> LeastSquaresSequenceSpec<f64> {
        LeastSquaresSequenceSpec {
            n: 20,
            d: 5,
            kappa,
            sigma: 1.0,
            noise_std: noise,
            horizon: 40,
            seed,
        }
    }

    #[test]
    fn noiseless_minimizer_is_the_walk() {
        let seq = build_least_squares_sequence(&spec(50.0, 0.0, 1)).unwrap();
        for t in [0usize, 7, 40] {
            let m = seq.minimizer(t).unwrap();
            assert!(dist2(&m, seq.walk_point(t)) < 1e-10);
            // Gradient vanishes at the minimizer.
            let mut g = vec![0.0; 5];
            seq.gradient_into(t, &m, &mut g);
            assert!(norm2(&g) < 1e-10);
        }
    }

    #[test]
    fn noiseless_drift_is_exactly_sigma() {
        let seq = build_least_squares_sequence(&spec(20.0, 0.0, 2)).unwrap();
        for t in 1..=seq.horizon() {
            let d = dist2(seq.walk_point(t), seq.walk_point(t - 1));
            assert!((d - 1.0).abs() < 1e-12);
        }
        assert!((seq.profile().sigma - 1.0).abs() < 1e-10);
    }

    #[test]
    fn curvature_matches_singular_value_placement() {
        // Oracle: eigenvalues of AᵀA from a dense symmetric eigensolver.
        let kappa = 30.0;
        let seq = build_least_squares_sequence(&spec(kappa, 1e-3, 3)).unwrap();
        let a = seq.matrix();
        let mut ata = nalgebra::DMatrix::<f64>::zeros(5, 5);
        for i in 0..5 {
            for j in 0..5 {
                let mut acc = 0.0;
                for k in 0..20 {
                    acc += a[(k, i)] * a[(k, j)];
                }
                ata[(i, j)] = acc;
            }
        }
        let eig = nalgebra::SymmetricEigen::new(ata);
        let mut evs: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
        evs.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert!((evs[0] - 1.0 / kappa).abs() < 1e-10, "mu = 1/kappa");
        assert!((evs[4] - 1.0).abs() < 1e-10, "L = 1");
        let p = seq.profile();
        assert!((p.mu - 1.0 / kappa).abs() < 1e-12);
        assert!((p.l - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noise_shifts_minimizers_by_a_bounded_pullback() {
        // ‖argmin − walk‖ ≤ ‖(AᵀA)⁻¹Aᵀ‖·‖ε‖ = ‖ε‖/s_min ≈ √n·noise·√κ.
        let kappa = 100.0;
        let noise = 1e-3;
        let seq = build_least_squares_sequence(&spec(kappa, noise, 4)).unwrap();
        let bound = (20.0f64).sqrt() * noise * kappa.sqrt() * 5.0;
        for t in 0..=seq.horizon() {
            let m = seq.minimizer(t).unwrap();
            assert!(
                dist2(&m, seq.walk_point(t)) < bound,
                "t={t}: pullback exceeded {bound}"
            );
        }
    }

    #[test]
    fn deterministic_per_seed_and_distinct_across_seeds() {
        let a = build_least_squares_sequence(&spec(10.0, 1e-3, 9)).unwrap();
        let b = build_least_squares_sequence(&spec(10.0, 1e-3, 9)).unwrap();
        let c = build_least_squares_sequence(&spec(10.0, 1e-3, 10)).unwrap();
        assert_eq!(a.targets(5), b.targets(5));
        assert!(dist2(a.targets(5), c.targets(5)) > 1e-6);
    }

    #[test]
    fn rejects_wide_matrices_and_bad_kappa() {
        let mut s = spec(10.0, 0.0, 1);
        s.d = 25;
        assert!(build_least_squares_sequence(&s).is_err());
        let mut s = spec(0.5, 0.0, 1);
        s.kappa = 0.5;
        assert!(build_least_squares_sequence(&s).is_err());
    }
}
