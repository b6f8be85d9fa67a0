//! Floating-point scalar abstraction shared by every numerical routine.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumCast, ToPrimitive};
use rustfft::FftNum;

/// Real scalar usable for grids, fields and FFTs (implemented for `f32` and `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumCast
    + FftNum
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Lossless for `f64`; rounds for `f32`.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite conversion")
    }

    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("index conversion")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + NumCast
        + FftNum
        + Sum
        + Default
        + Debug
        + Display
        + LowerExp
        + Send
        + Sync
        + 'static
{
}

const PAIRWISE_BLOCK: usize = 64;

/// Sum of `f(0) + ... + f(n-1)` in a fixed pairwise order.
///
/// The association tree depends only on `n`, so results are bitwise
/// reproducible regardless of how callers schedule the work.
pub fn pairwise_sum_by<T: Real, F: Fn(usize) -> T>(n: usize, f: F) -> T {
    fn rec<T: Real, F: Fn(usize) -> T>(lo: usize, hi: usize, f: &F) -> T {
        if hi - lo <= PAIRWISE_BLOCK {
            let mut acc = T::zero();
            for i in lo..hi {
                acc = acc + f(i);
            }
            acc
        } else {
            let mid = lo + (hi - lo) / 2;
            rec(lo, mid, f) + rec(mid, hi, f)
        }
    }
    rec(0, n, &f)
}

/// Pairwise sum of a slice.
pub fn pairwise_sum<T: Real>(xs: &[T]) -> T {
    pairwise_sum_by(xs.len(), |i| xs[i])
}

/// Japanese bracket `(1 + x²)^{1/2}`.
#[inline]
pub fn bracket<T: Real>(x2: T) -> T {
    (T::one() + x2).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_on_integers() {
        let xs: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 499_500.0);
    }

    #[test]
    fn pairwise_empty_is_zero() {
        assert_eq!(pairwise_sum::<f32>(&[]), 0.0);
    }

    #[test]
    fn pairwise_beats_naive_accumulation() {
        let n = 1_000_000;
        let naive: f32 = (0..n).map(|_| 0.1f32).fold(0.0, |a, b| a + b);
        let pw = pairwise_sum_by(n, |_| 0.1f32);
        let exact = 100_000.0f32;
        assert!((pw - exact).abs() < (naive - exact).abs());
    }
}
