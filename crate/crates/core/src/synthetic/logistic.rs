//! Label-flipping logistic regression: `f_t(x) = (1/n)Σᵢ log(1+exp(−bᵢ⁽ᵗ⁾⟨aᵢ,x⟩))`
//! where one uniformly chosen label flips sign each step.

use super::haar::sample_haar_orthogonal;
use crate::error::TvError;
use crate::linalg::DenseMatrix;
use crate::problems::{FunctionSequence, SmoothnessProfile};
use crate::scalar::{fp, Scalar};
use crate::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Generator settings for a logistic sequence.
#[derive(Debug, Clone, Copy)]
pub struct LogisticSequenceSpec<S> {
    pub n: usize,
    pub d: usize,
    /// Nominal smoothness target: `A` is rescaled so its largest singular
    /// value is `2√L`, making `‖A‖²/4 = L`.
    pub l_target: S,
    /// Labels flipped per step (distinct indices).
    pub flips_per_step: usize,
    pub horizon: usize,
    pub seed: u64,
}

impl<S: Scalar> LogisticSequenceSpec<S> {
    /// The standard setting: `n = 20`, `d = 5`, one flip per step.
    pub fn standard(l_target: S, horizon: usize, seed: u64) -> Self {
        LogisticSequenceSpec {
            n: 20,
            d: 5,
            l_target,
            flips_per_step: 1,
            horizon,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.d == 0 {
            return Err(TvError::invalid("logistic needs n >= 1 and d >= 1"));
        }
        if !(self.l_target > S::zero()) {
            return Err(TvError::invalid(format!(
                "smoothness target must be > 0, got {}",
                self.l_target
            )));
        }
        if self.flips_per_step > self.n {
            return Err(TvError::invalid(format!(
                "cannot flip {} distinct labels out of {}",
                self.flips_per_step, self.n
            )));
        }
        Ok(())
    }
}

/// A generated logistic sequence. There is no analytic minimizer; the
/// analysis module supplies numeric regularized minimizers.
#[derive(Debug, Clone)]
pub struct LogisticSequence<S> {
    a: DenseMatrix<S>,
    /// Label vectors per step, entries ±1.
    labels: Vec<Vec<S>>,
    profile: SmoothnessProfile<S>,
}

/// Generate a sequence from the spec.
///
/// `A = U·diag(s)·Vᵀ` with Haar `U`, `V`; singular values drawn uniform on
/// `(0,1)` and rescaled so the realized maximum equals `2√L`. Initial labels
/// are Rademacher; each step flips `flips_per_step` distinct labels chosen
/// uniformly.
pub fn build_logistic_sequence<S: Scalar>(
    spec: &LogisticSequenceSpec<S>,
) -> Result<LogisticSequence<S>> {
    spec.validate()?;
    let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);
    let n = spec.n;
    let d = spec.d;
    let r = n.min(d);

    let u = sample_haar_orthogonal::<S, _>(n, &mut rng);
    let v = sample_haar_orthogonal::<S, _>(d, &mut rng);
    let mut s: Vec<S> = (0..r).map(|_| fp::<S>(rng.gen::<f64>())).collect();
    let s_max = s.iter().cloned().fold(S::zero(), S::max);
    if !(s_max > S::zero()) {
        return Err(TvError::invalid("degenerate singular-value draw"));
    }
    let target = fp::<S>(2.0) * spec.l_target.sqrt();
    for si in s.iter_mut() {
        *si = *si * target / s_max;
    }
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

    let mut labels = Vec::with_capacity(spec.horizon + 1);
    let first: Vec<S> = (0..n)
        .map(|_| if rng.gen_bool(0.5) { S::one() } else { -S::one() })
        .collect();
    labels.push(first);
    for _ in 1..=spec.horizon {
        let mut next = labels.last().unwrap().clone();
        let mut chosen: Vec<usize> = Vec::with_capacity(spec.flips_per_step);
        while chosen.len() < spec.flips_per_step {
            let i = rng.gen_range(0..n);
            if !chosen.contains(&i) {
                chosen.push(i);
            }
        }
        for i in chosen {
            next[i] = -next[i];
        }
        labels.push(next);
    }

    // Nominal smoothness ‖A‖²/4 = L (the paper-style constant without the
    // 1/n mean factor, so it upper-bounds the true smoothness L/n).
    let profile = SmoothnessProfile::new(S::zero(), spec.l_target, S::zero())?;
    Ok(LogisticSequence { a, labels, profile })
}

impl<S: Scalar> LogisticSequence<S> {
    pub fn matrix(&self) -> &DenseMatrix<S> {
        &self.a
    }

    pub fn horizon(&self) -> usize {
        self.labels.len() - 1
    }

    fn clamp(&self, t: usize) -> usize {
        t.min(self.horizon())
    }

    pub fn labels(&self, t: usize) -> &[S] {
        &self.labels[self.clamp(t)]
    }
}

/// Numerically stable `log(1 + exp(z))`.
fn log1p_exp<S: Scalar>(z: S) -> S {
    if z > S::zero() {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

impl<S: Scalar> FunctionSequence<S> for LogisticSequence<S> {
    fn dimension(&self) -> usize {
        self.a.cols()
    }

    fn profile(&self) -> SmoothnessProfile<S> {
        self.profile
    }

    fn value(&self, t: usize, x: &[S]) -> S {
        let b = self.labels(t);
        let z = self.a.matvec(x);
        let inv_n = S::one() / fp::<S>(self.a.rows() as f64);
        inv_n
            * z.iter()
                .zip(b)
                .map(|(&zi, &bi)| log1p_exp(-bi * zi))
                .sum::<S>()
    }

    fn gradient_into(&self, t: usize, x: &[S], out: &mut [S]) {
        let b = self.labels(t);
        let mut z = self.a.matvec(x);
        let inv_n = S::one() / fp::<S>(self.a.rows() as f64);
        // dᵢ = −bᵢ·sigmoid(−bᵢzᵢ)/n; ∇f = Aᵀd.
        for (zi, &bi) in z.iter_mut().zip(b) {
            let m = bi * *zi;
            let sig = S::one() / (S::one() + m.exp());
            *zi = -bi * sig * inv_n;
        }
        self.a.t_matvec_into(&z, out);
    }

    fn minimizer(&self, _t: usize) -> Option<Vec<S>> {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm2;
    use rand::Rng;

    fn build(seed: u64) -> LogisticSequence<f64> {
        build_logistic_sequence(&LogisticSequenceSpec::standard(2.0, 60, seed)).unwrap()
    }

    #[test]
    fn spectral_rescale_hits_the_target() {
        let seq = build(1);
        let top = seq.matrix().spectral_norm();
        assert!(
            (top - 2.0 * 2.0f64.sqrt()).abs() < 1e-8,
            "‖A‖ = {top}, want 2√L = 2√2"
        );
    }

    #[test]
    fn exactly_one_flip_per_step() {
        let seq = build(2);
        for t in 1..=seq.horizon() {
            let diff = seq
                .labels(t)
                .iter()
                .zip(seq.labels(t - 1))
                .filter(|(a, b)| a != b)
                .count();
            assert_eq!(diff, 1, "t={t}");
        }
    }

    #[test]
    fn gradient_at_origin_closed_form() {
        let seq = build(3);
        let mut g = vec![0.0; 5];
        seq.gradient_into(7, &[0.0; 5], &mut g);
        // ∇f(0) = −(1/2n)Aᵀb.
        let expect = seq.matrix().t_matvec(seq.labels(7));
        for (gi, e) in g.iter().zip(expect) {
            assert!((gi + e / (2.0 * 20.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn secant_smoothness_below_nominal_constant() {
        let seq = build(4);
        let l_true = seq.matrix().spectral_norm().powi(2) / (4.0 * 20.0);
        let l_nominal = seq.profile().l;
        assert!((l_nominal - 2.0).abs() < 1e-12);
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(99);
        let mut worst: f64 = 0.0;
        for _ in 0..1000 {
            let x: Vec<f64> = (0..5).map(|_| rng.gen::<f64>() * 4.0 - 2.0).collect();
            let y: Vec<f64> = (0..5).map(|_| rng.gen::<f64>() * 4.0 - 2.0).collect();
            let mut gx = vec![0.0; 5];
            let mut gy = vec![0.0; 5];
            seq.gradient_into(11, &x, &mut gx);
            seq.gradient_into(11, &y, &mut gy);
            let gd: Vec<f64> = gx.iter().zip(&gy).map(|(a, b)| a - b).collect();
            let xd: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
            if norm2(&xd) > 1e-9 {
                worst = worst.max(norm2(&gd) / norm2(&xd));
            }
        }
        assert!(worst <= l_true + 1e-9, "secant slope {worst} vs true L {l_true}");
        assert!(worst <= l_nominal, "secant slope {worst} vs nominal {l_nominal}");
    }

    #[test]
    fn flip_localizes_the_value_change() {
        let seq = build(5);
        let x = vec![0.3, -0.2, 0.7, 0.1, -0.5];
        for t in 1..=10 {
            // The value difference equals the difference of the single
            // flipped summand.
            let flipped: Vec<usize> = (0..20)
                .filter(|&i| seq.labels(t)[i] != seq.labels(t - 1)[i])
                .collect();
            assert_eq!(flipped.len(), 1);
            let i = flipped[0];
            let zi: f64 = seq
                .matrix()
                .row(i)
                .iter()
                .zip(&x)
                .map(|(&a, &xj)| a * xj)
                .sum();
            let before = log1p_exp(-seq.labels(t - 1)[i] * zi) / 20.0;
            let after = log1p_exp(-seq.labels(t)[i] * zi) / 20.0;
            let dv = seq.value(t, &x) - seq.value(t - 1, &x);
            assert!((dv - (after - before)).abs() < 1e-14);
        }
    }

    #[test]
    fn value_is_stable_for_large_margins() {
        let seq = build(6);
        let huge = vec![1e4; 5];
        let v = seq.value(0, &huge);
        assert!(v.is_finite());
        let neg = vec![-1e4; 5];
        assert!(seq.value(0, &neg).is_finite());
    }

    #[test]
    fn rejects_invalid_specs() {
        let mut s = LogisticSequenceSpec::standard(2.0f64, 10, 1);
        s.l_target = 0.0;
        assert!(build_logistic_sequence(&s).is_err());
        let mut s = LogisticSequenceSpec::standard(2.0f64, 10, 1);
        s.flips_per_step = 21;
        assert!(build_logistic_sequence(&s).is_err());
    }
}
