//! Closed intervals used to report certified brackets of infinite sums.

use serde::{Deserialize, Serialize};

/// A closed interval `[lo, hi]` bracketing an exact real value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "interval endpoints out of order: [{lo}, {hi}]");
        Interval { lo, hi }
    }

    /// Degenerate interval holding a single exactly known value.
    pub fn point(v: f64) -> Self {
        Interval { lo: v, hi: v }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Width relative to the upper endpoint; zero for the zero interval.
    pub fn relative_width(&self) -> f64 {
        if self.hi == 0.0 {
            0.0
        } else {
            (self.hi - self.lo) / self.hi
        }
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    /// Interval of the square roots; endpoints must be nonnegative.
    pub fn sqrt(&self) -> Self {
        Interval::new(self.lo.max(0.0).sqrt(), self.hi.max(0.0).sqrt())
    }

    /// Interval of the `p`-th roots; endpoints must be nonnegative.
    pub fn powf(&self, exp: f64) -> Self {
        Interval::new(self.lo.max(0.0).powf(exp), self.hi.max(0.0).powf(exp))
    }

    /// Elementwise sum.
    pub fn add(&self, other: Interval) -> Self {
        Interval::new(self.lo + other.lo, self.hi + other.hi)
    }

    /// Scale by a nonnegative factor.
    pub fn scale(&self, k: f64) -> Self {
        debug_assert!(k >= 0.0);
        Interval::new(self.lo * k, self.hi * k)
    }

    /// Divide by a positive scalar.
    pub fn div_scalar(&self, k: f64) -> Self {
        debug_assert!(k > 0.0);
        Interval::new(self.lo / k, self.hi / k)
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}
