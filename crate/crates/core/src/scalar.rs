//! Scalar time type shared by every module.
//!
//! Two instantiations ship with the crate: `i64` counting deciseconds, which
//! is the exact representation used by the instance format and the CLI, and
//! `f64` counting seconds. Both measure one day as [`Time::PERIOD`] ticks.

use std::cmp::Ordering;
use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Bounded, Euclid, Num, NumCast, ToPrimitive};

/// Number type used for points in time and durations.
pub trait Time:
    Num + NumCast + Euclid + Bounded + Copy + PartialOrd + Sum + Debug + Display + Send + Sync + 'static
{
    /// Length of one day in ticks.
    const PERIOD: Self;
    /// Ticks per second.
    const TICKS_PER_SECOND: f64;

    /// Value on the segment from `(0, from)` to `(span, to)` at `offset`.
    ///
    /// `0 <= offset <= span` and `span > 0`.
    fn lerp(from: Self, to: Self, offset: Self, span: Self) -> Self;

    /// Total order used by priority queues.
    fn total_cmp(&self, other: &Self) -> Ordering;

    /// Conversion from a real number of ticks. Integers round half away from zero.
    fn from_ticks_f64(ticks: f64) -> Self;

    fn to_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).expect("time values fit into f64")
    }

    fn from_seconds(seconds: f64) -> Self {
        Self::from_ticks_f64(seconds * Self::TICKS_PER_SECOND)
    }

    fn to_seconds(self) -> f64 {
        self.to_f64() / Self::TICKS_PER_SECOND
    }

    /// Maps an unwrapped time onto the daily clock `[0, PERIOD)`.
    fn wrap(self) -> Self {
        self.rem_euclid(&Self::PERIOD)
    }

    fn max_of(self, other: Self) -> Self {
        if other.total_cmp(&self) == Ordering::Greater {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other.total_cmp(&self) == Ordering::Less {
            other
        } else {
            self
        }
    }
}

impl Time for i64 {
    const PERIOD: Self = 864_000;
    const TICKS_PER_SECOND: f64 = 10.0;

    // Floor division keeps `t + f(t)` non-decreasing on integer ticks whenever
    // the segment slope is at least -1.
    fn lerp(from: Self, to: Self, offset: Self, span: Self) -> Self {
        let delta = (to - from) as i128 * offset as i128;
        from + delta.div_euclid(span as i128) as i64
    }

    fn total_cmp(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }

    fn from_ticks_f64(ticks: f64) -> Self {
        ticks.round() as i64
    }
}

impl Time for f64 {
    const PERIOD: Self = 86_400.0;
    const TICKS_PER_SECOND: f64 = 1.0;

    fn lerp(from: Self, to: Self, offset: Self, span: Self) -> Self {
        from + (to - from) * (offset / span)
    }

    fn total_cmp(&self, other: &Self) -> Ordering {
        f64::total_cmp(self, other)
    }

    fn from_ticks_f64(ticks: f64) -> Self {
        ticks
    }
}

/// Priority-queue key ordered by [`Time::total_cmp`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Key<T>(pub T);

impl<T: Time> Eq for Key<T> {}

impl<T: Time> PartialOrd for Key<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Time> Ord for Key<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_lerp_floors() {
        assert_eq!(i64::lerp(100, 200, 1, 3), 133);
        assert_eq!(i64::lerp(200, 100, 1, 3), 166);
        assert_eq!(i64::lerp(7, 7, 5, 10), 7);
    }

    #[test]
    fn wrap_is_euclidean() {
        assert_eq!((-1i64).wrap(), 863_999);
        assert_eq!(864_001i64.wrap(), 1);
        assert_eq!((-1.5f64).wrap(), 86_398.5);
    }

    #[test]
    fn seconds_round_trip() {
        assert_eq!(i64::from_seconds(12.34), 123);
        assert_eq!(123i64.to_seconds(), 12.3);
        assert_eq!(f64::from_seconds(12.34), 12.34);
    }
}
