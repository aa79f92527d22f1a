//! Haar-orthogonal matrix and unit-sphere sampling.
//!
//! Draws are generated as `f64` and converted to the target scalar, so the
//! `f32` and `f64` instantiations of one seed see the same underlying stream.

use crate::linalg::DenseMatrix;
use crate::scalar::{fp, Scalar};
use rand::Rng;
use rand_distr::StandardNormal;

/// Sample an `n×n` orthogonal matrix from the Haar (rotation-invariant)
/// distribution: QR of a standard Gaussian matrix, with each column of `Q`
/// flipped to make the matching diagonal entry of `R` positive. Without the
/// sign correction the QR convention would bias the distribution.
pub fn sample_haar_orthogonal<S: Scalar, R: Rng>(n: usize, rng: &mut R) -> DenseMatrix<S> {
    assert!(n >= 1, "orthogonal matrix needs n >= 1");
    let mut g = DenseMatrix::<S>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let z: f64 = rng.sample(StandardNormal);
            g[(i, j)] = fp::<S>(z);
        }
    }
    let (mut q, r) = g.qr_full();
    for j in 0..n {
        if r[(j, j)] < S::zero() {
            q.scale_col(j, -S::one());
        }
    }
    q
}

/// Sample a uniform point on the unit sphere in `R^d` (normalized Gaussian).
pub fn sample_unit_sphere<S: Scalar, R: Rng>(d: usize, rng: &mut R) -> Vec<S> {
    assert!(d >= 1, "sphere sample needs d >= 1");
    loop {
        let v: Vec<S> = (0..d)
            .map(|_| fp::<S>(rng.sample::<f64, _>(StandardNormal)))
            .collect();
        let norm = crate::linalg::norm2(&v);
        if norm > fp::<S>(1e-8) {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn columns_are_orthonormal() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for n in [1usize, 2, 5, 12] {
            let q = sample_haar_orthogonal::<f64, _>(n, &mut rng);
            for i in 0..n {
                for j in 0..n {
                    let mut d = 0.0;
                    for k in 0..n {
                        d += q[(k, i)] * q[(k, j)];
                    }
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!(
                        (d - expect).abs() < 1e-12,
                        "n={n}: Q^T Q [{i},{j}] = {d}"
                    );
                }
            }
        }
    }

    #[test]
    fn one_by_one_is_a_sign() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for _ in 0..20 {
            let q = sample_haar_orthogonal::<f64, _>(1, &mut rng);
            assert!((q[(0, 0)].abs() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn entry_statistics_are_centered() {
        // Monte-Carlo check of rotation invariance: E[Q_00] = 0 with
        // Var = 1/n, so the mean of 10^4 draws is 0 ± 3/sqrt(n·10^4).
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let n = 4usize;
        let reps = 10_000;
        let mut mean = 0.0f64;
        for _ in 0..reps {
            let q = sample_haar_orthogonal::<f64, _>(n, &mut rng);
            mean += q[(0, 0)];
        }
        mean /= reps as f64;
        let three_sigma = 3.0 / ((n * reps) as f64).sqrt();
        assert!(
            mean.abs() < three_sigma,
            "mean {mean} vs 3-sigma band {three_sigma}"
        );
    }

    #[test]
    fn sphere_samples_are_unit_norm() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for _ in 0..50 {
            let v = sample_unit_sphere::<f64, _>(5, &mut rng);
            assert!((crate::linalg::norm2(&v) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let mut a = ChaCha12Rng::seed_from_u64(42);
        let mut b = ChaCha12Rng::seed_from_u64(42);
        let qa = sample_haar_orthogonal::<f64, _>(6, &mut a);
        let qb = sample_haar_orthogonal::<f64, _>(6, &mut b);
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(qa[(i, j)], qb[(i, j)]);
            }
        }
    }
}
