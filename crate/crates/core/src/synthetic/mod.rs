//! Data-driven time-varying problems: random-walk least squares and
//! label-flipping logistic regression, plus the shared random generators
//! (Haar-orthogonal matrices, sphere walks) and replication averaging.

mod haar;
mod least_squares;
mod logistic;
mod replicate;

pub use haar::{sample_haar_orthogonal, sample_unit_sphere};
pub use least_squares::{
    build_least_squares_sequence, LeastSquaresSequence, LeastSquaresSequenceSpec,
};
pub use logistic::{build_logistic_sequence, LogisticSequence, LogisticSequenceSpec};
pub use replicate::{mean_stderr, replicate, MeanStderr, ReplicatedTracking};
