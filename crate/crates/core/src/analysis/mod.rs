//! Closed-form tracking bounds, spectral stability of the rotating quadratic,
//! limit-supremum estimation with slope fitting, and the regularization
//! fixed-point machinery.

mod bounds;
mod regularization;
mod stability;
mod tracking;

pub use bounds::{evaluate_bounds, olnm_bound_coefficient, BoundSet, DeltaInfo};
pub use regularization::{
    batch_minimize, default_delta_grid, estimate_regularization_curve, h_value,
    solve_delta_fixed_point, solve_delta_fixed_point_on_grid, DeltaStar,
    RegularizationCurve, BATCH_GRAD_TOL,
};
pub use stability::{polyak_growth_formula, rotating_spectral_radius, StabilityReport};
pub use tracking::{
    default_window, estimate_limsup, fit_through_origin, LimsupEstimate, TrackingReport,
};
