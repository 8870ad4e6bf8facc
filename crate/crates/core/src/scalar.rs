//! Floating point abstraction shared by the scoring, evaluation and
//! surrogate-model code.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + FromStr
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal, saturating to infinity when out of range.
    fn lit(x: f64) -> Self;

    /// Converts a count.
    fn count(n: usize) -> Self {
        Self::lit(n as f64)
    }

    /// Complementary error function.
    fn erfc(self) -> Self;

    /// Standard normal cumulative distribution function.
    fn norm_cdf(self) -> Self {
        Self::lit(0.5) * (-self / Self::SQRT_2()).erfc()
    }

    /// Standard normal density.
    fn norm_pdf(self) -> Self {
        (-(self * self) / Self::lit(2.0)).exp() / (Self::lit(2.0) * Self::PI()).sqrt()
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {
    fn lit(x: f64) -> Self {
        x as f32
    }

    fn erfc(self) -> Self {
        libm::erfcf(self)
    }
}

impl Scalar for f64 {
    fn lit(x: f64) -> Self {
        x
    }

    fn erfc(self) -> Self {
        libm::erfc(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_cdf_reference_points() {
        assert!((0.0f64.norm_cdf() - 0.5).abs() < 1e-15);
        // Phi(1.959963984540054) = 0.975
        assert!((1.959963984540054f64.norm_cdf() - 0.975).abs() < 1e-12);
        assert!(((-1.0f64).norm_cdf() - 0.15865525393145707).abs() < 1e-14);
        assert!((0.0f32.norm_cdf() - 0.5).abs() < 1e-6);
    }

    #[test]
    fn normal_pdf_at_zero() {
        assert!((0.0f64.norm_pdf() - 0.3989422804014327).abs() < 1e-15);
    }
}
