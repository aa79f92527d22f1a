//! Scalar abstraction: the numeric types the whole crate is generic over.

use num_traits::{Float, FromPrimitive, NumAssign};
use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Floating-point scalar usable throughout the crate.
///
/// Implemented for `f32` and `f64`. The bound set is intentionally small:
/// `Float` for arithmetic and elementary functions, `FromPrimitive` for
/// converting literal constants, `NumAssign` for compound assignment, and the
/// usual marker/formatting traits so values can live in reports and cross
/// thread boundaries.
pub trait Scalar:
    Float + FromPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Short name used in diagnostics ("f32" / "f64").
    const NAME: &'static str;
}

impl Scalar for f32 {
    const NAME: &'static str = "f32";
}

impl Scalar for f64 {
    const NAME: &'static str = "f64";
}

/// Convert an `f64` literal into the generic scalar type.
///
/// Panics only if the target type cannot represent any `f64` at all, which
/// cannot happen for the provided `f32`/`f64` implementations (conversion to
/// `f32` rounds).
#[inline]
pub fn fp<S: Scalar>(x: f64) -> S {
    S::from_f64(x).expect("f64 literal must convert to the scalar type")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_conversion_roundtrips() {
        assert_eq!(fp::<f64>(2.5), 2.5);
        assert_eq!(fp::<f32>(2.5), 2.5f32);
        let x: f64 = fp(1.0e-12);
        assert_eq!(x, 1.0e-12);
    }

    #[test]
    fn generic_arithmetic_compiles_for_both_widths() {
        fn quadratic<S: Scalar>(x: S) -> S {
            let two = fp::<S>(2.0);
            x * x / two + x.sqrt()
        }
        assert!((quadratic(4.0f64) - 10.0).abs() < 1e-15);
        assert!((quadratic(4.0f32) - 10.0).abs() < 1e-6);
    }
}
