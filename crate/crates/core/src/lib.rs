//! Online first-order optimization of time-varying smooth (strongly) convex
//! problems.
//!
//! The crate provides:
//!
//! * [`problems`] — time-varying problem oracles: an abstract
//!   [`problems::FunctionSequence`] interface plus three closed-form
//!   adversarial constructions (translating quadratic, rotating quadratic,
//!   online Nesterov function) with analytically known minimizer
//!   trajectories.
//! * [`solvers`] — the online methods: `ALG(α,β,η)` with named presets
//!   (gradient descent, heavy ball, accelerated), the long-step restarted
//!   method `OLNM(T)`, regularized gradient descent `ORGD(δ,x_c)`, and an
//!   abstaining baseline.
//! * [`analysis`] — closed-form tracking-error bounds, spectral-radius
//!   stability analysis of the rotating quadratic, limit-supremum estimation,
//!   slope fitting, and the regularization fixed-point machinery.
//! * [`synthetic`] — data-driven problem generators: random-walk least
//!   squares and label-flipping logistic regression, built on Haar-orthogonal
//!   sampling.
//! * [`harness`] — configuration parsing, experiment orchestration,
//!   verification checks, and CSV emission.
//!
//! Everything numeric is generic over the scalar type through
//! [`scalar::Scalar`] (implemented for `f32` and `f64`); concrete `f64`/`f32`
//! aliases for the main public types are exported at the crate root.
//!
//! Determinism: all randomness flows through `ChaCha12` seeded explicitly;
//! identical seeds give identical runs, and replication `i` of a run seeded
//! with `s` uses seed `s + i`.

pub mod analysis;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod problems;
pub mod scalar;
pub mod solvers;
pub mod synthetic;

pub use error::TvError;
pub use scalar::{fp, Scalar};

/// Crate-wide `Result` alias.
pub type Result<T> = std::result::Result<T, TvError>;

// Concrete aliases for the main public types at the crate root.

pub type SmoothnessProfileF64 = problems::SmoothnessProfile<f64>;
pub type SmoothnessProfileF32 = problems::SmoothnessProfile<f32>;
pub type TranslatingQuadraticF64 = problems::TranslatingQuadratic<f64>;
pub type TranslatingQuadraticF32 = problems::TranslatingQuadratic<f32>;
pub type RotatingQuadraticF64 = problems::RotatingQuadratic<f64>;
pub type RotatingQuadraticF32 = problems::RotatingQuadratic<f32>;
pub type OnlineNesterovFunctionF64 = problems::OnlineNesterovFunction<f64>;
pub type OnlineNesterovFunctionF32 = problems::OnlineNesterovFunction<f32>;
pub type AlgParamsF64 = solvers::AlgParams<f64>;
pub type AlgParamsF32 = solvers::AlgParams<f32>;
pub type OrgdParamsF64 = solvers::OrgdParams<f64>;
pub type OrgdParamsF32 = solvers::OrgdParams<f32>;
pub type TraceF64 = solvers::Trace<f64>;
pub type TraceF32 = solvers::Trace<f32>;
pub type BoundSetF64 = analysis::BoundSet<f64>;
pub type BoundSetF32 = analysis::BoundSet<f32>;
pub type StabilityReportF64 = analysis::StabilityReport<f64>;
pub type StabilityReportF32 = analysis::StabilityReport<f32>;
pub type LeastSquaresSequenceF64 = synthetic::LeastSquaresSequence<f64>;
pub type LeastSquaresSequenceF32 = synthetic::LeastSquaresSequence<f32>;
pub type LogisticSequenceF64 = synthetic::LogisticSequence<f64>;
pub type LogisticSequenceF32 = synthetic::LogisticSequence<f32>;
