//! Scalar abstraction shared by every analytic evaluator.

use core::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type the analytic formulas are evaluated in: `f32` or `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant. Every supported scalar can represent (a
    /// rounding of) any finite `f64`, so this never fails.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 constant")
    }

    /// Converts a small count (an index, an element count, a test count).
    #[inline]
    fn count(n: u64) -> Self {
        Self::from_u64(n).expect("count representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy)]
pub struct CompensatedSum<S> {
    sum: S,
    compensation: S,
}

impl<S: Scalar> Default for CompensatedSum<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Scalar> CompensatedSum<S> {
    pub fn new() -> Self {
        Self {
            sum: S::zero(),
            compensation: S::zero(),
        }
    }

    #[inline]
    pub fn add(&mut self, x: S) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation = self.compensation + ((self.sum - t) + x);
        } else {
            self.compensation = self.compensation + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> S {
        self.sum + self.compensation
    }
}

impl<S: Scalar> FromIterator<S> for CompensatedSum<S> {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// `(x^k - y^k) / (x - y)` for nonnegative `x`, `y`, as the all-positive sum
/// `Σ_{i<k} x^i y^(k-1-i)`. Equals `k x^(k-1)` when `x == y`.
#[inline]
pub(crate) fn power_difference_quotient<S: Scalar>(x: S, y: S, k: u32) -> S {
    let mut h = S::zero();
    let mut y_pow = S::one();
    for _ in 0..k {
        h = h * x + y_pow;
        y_pow = y_pow * y;
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_cancelled_bits() {
        let values = [1.0f64, 1e100, 1.0, -1e100];
        let naive: f64 = values.iter().sum();
        let compensated: CompensatedSum<f64> = values.iter().copied().collect();
        assert_eq!(naive, 0.0);
        assert_eq!(compensated.value(), 2.0);
    }

    #[test]
    fn power_difference_matches_direct_form() {
        let (x, y) = (1.75f64, 0.5f64);
        for k in 1..8 {
            let direct = (x.powi(k as i32) - y.powi(k as i32)) / (x - y);
            let q = power_difference_quotient(x, y, k);
            assert!((q - direct).abs() <= 1e-13 * direct.abs(), "k = {k}");
        }
        assert_eq!(power_difference_quotient(2.0f64, 2.0, 3), 12.0);
    }
}
