//! Periodic piecewise-linear travel-time functions.
//!
//! A function is a sorted list of breakpoints over one day. Between two
//! breakpoints the travel time is interpolated linearly, and the last
//! breakpoint connects back to the first one shifted by a full day. A single
//! breakpoint encodes a constant function.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::error::Error;
use crate::scalar::Time;

/// Slack accepted on the FIFO slope bound of -1.
pub const FIFO_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TtfError {
    #[error("function has no breakpoints")]
    Empty,
    #[error("breakpoint {index} lies outside of the day")]
    OutOfRange { index: usize },
    #[error("breakpoint {index} is not strictly after its predecessor")]
    Unsorted { index: usize },
    #[error("breakpoint {index} has a non-positive travel time")]
    NonPositive { index: usize },
    #[error("segment {segment} violates FIFO (slope {slope:.4} < -1)")]
    Fifo { segment: usize, slope: f64 },
}

/// One sample of a travel-time function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BreakPoint<T> {
    pub at: T,
    pub travel: T,
}

impl<T> BreakPoint<T> {
    pub fn new(at: T, travel: T) -> Self {
        Self { at, travel }
    }
}

/// Travel time as a periodic piecewise-linear function of the entry time.
#[derive(Debug, Clone, PartialEq)]
pub struct TravelTimeFunction<T> {
    points: Vec<BreakPoint<T>>,
}

impl<T: Time> TravelTimeFunction<T> {
    /// Builds a function and checks every invariant, FIFO included.
    pub fn new(points: Vec<BreakPoint<T>>) -> Result<Self, TtfError> {
        if points.is_empty() {
            return Err(TtfError::Empty);
        }
        for (index, p) in points.iter().enumerate() {
            if p.at < T::zero() || p.at >= T::PERIOD {
                return Err(TtfError::OutOfRange { index });
            }
            if p.travel <= T::zero() {
                return Err(TtfError::NonPositive { index });
            }
            if index > 0 && points[index - 1].at >= p.at {
                return Err(TtfError::Unsorted { index });
            }
        }
        validate_fifo(&points)?;
        Ok(Self { points })
    }

    pub fn constant(travel: T) -> Self {
        assert!(travel > T::zero(), "travel time must be positive");
        Self {
            points: vec![BreakPoint::new(T::zero(), travel)],
        }
    }

    pub fn points(&self) -> &[BreakPoint<T>] {
        &self.points
    }

    /// Constant functions have exactly one breakpoint.
    pub fn is_time_dependent(&self) -> bool {
        self.points.len() >= 2
    }

    /// Travel time when entering at `t`; `t` may lie outside of `[0, PERIOD)`.
    pub fn eval(&self, t: T) -> T {
        let points = &self.points;
        if points.len() == 1 {
            return points[0].travel;
        }
        let t = t.wrap();
        let next = points.partition_point(|p| p.at <= t);
        let last = points[points.len() - 1];
        if next == 0 {
            let first = points[0];
            return T::lerp(
                last.travel,
                first.travel,
                t + T::PERIOD - last.at,
                first.at + T::PERIOD - last.at,
            );
        }
        let from = points[next - 1];
        if next == points.len() {
            let first = points[0];
            T::lerp(from.travel, first.travel, t - from.at, first.at + T::PERIOD - from.at)
        } else {
            let to = points[next];
            T::lerp(from.travel, to.travel, t - from.at, to.at - from.at)
        }
    }

    /// Minimum travel time over the day.
    pub fn freeflow(&self) -> T {
        self.points
            .iter()
            .map(|p| p.travel)
            .reduce(T::min_of)
            .expect("at least one breakpoint")
    }

    pub fn max_travel(&self) -> T {
        self.points
            .iter()
            .map(|p| p.travel)
            .reduce(T::max_of)
            .expect("at least one breakpoint")
    }

    /// Time average of the function over `window`, integrated exactly over
    /// the linear pieces.
    pub fn average_over_window(&self, window: &TimeWindow<T>) -> T {
        if self.points.len() == 1 {
            return self.points[0].travel;
        }
        let (begin, end) = (window.begin.to_f64(), window.end.to_f64());
        let area: f64 = self
            .period_polyline()
            .windows(2)
            .map(|seg| {
                let ((x1, y1), (x2, y2)) = (seg[0], seg[1]);
                let lo = begin.max(x1);
                let hi = end.min(x2);
                if hi <= lo {
                    return 0.0;
                }
                let at = |x: f64| y1 + (y2 - y1) * (x - x1) / (x2 - x1);
                0.5 * (at(lo) + at(hi)) * (hi - lo)
            })
            .sum();
        let average = T::from_ticks_f64(area / (end - begin));
        // Rounding never leaves the range of the function.
        average.max_of(self.freeflow()).min_of(self.max_travel())
    }

    // Breakpoints over [0, PERIOD] in f64, including both day boundaries.
    fn period_polyline(&self) -> Vec<(f64, f64)> {
        let period = T::PERIOD.to_f64();
        let first = self.points[0];
        let last = self.points[self.points.len() - 1];
        let (fx, fy) = (first.at.to_f64(), first.travel.to_f64());
        let (lx, ly) = (last.at.to_f64() - period, last.travel.to_f64());
        let at_midnight = ly + (fy - ly) * (0.0 - lx) / (fx - lx);
        let mut line = Vec::with_capacity(self.points.len() + 2);
        if fx > 0.0 {
            line.push((0.0, at_midnight));
        }
        line.extend(self.points.iter().map(|p| (p.at.to_f64(), p.travel.to_f64())));
        line.push((period, if fx > 0.0 { at_midnight } else { fy }));
        line
    }

    pub fn slope_bounds(&self) -> SlopeBounds {
        let samples: Vec<(T, T)> = self.points.iter().map(|p| (p.at, p.travel)).collect();
        slope_bounds(&samples)
    }

    /// Same function in another scalar type, converted through seconds.
    pub fn convert<U: Time>(&self) -> Result<TravelTimeFunction<U>, TtfError> {
        TravelTimeFunction::new(
            self.points
                .iter()
                .map(|p| {
                    BreakPoint::new(
                        U::from_seconds(p.at.to_seconds()),
                        U::from_seconds(p.travel.to_seconds()),
                    )
                })
                .collect(),
        )
    }
}

/// Checks that every segment, the wrap-around segment included, has slope >= -1.
///
/// Returns the first violating segment; segment `i` starts at breakpoint `i`.
pub fn validate_fifo<T: Time>(points: &[BreakPoint<T>]) -> Result<(), TtfError> {
    if points.len() < 2 {
        return Ok(());
    }
    for segment in 0..points.len() {
        let from = points[segment];
        let (to, shift) = match points.get(segment + 1) {
            Some(p) => (*p, T::zero()),
            None => (points[0], T::PERIOD),
        };
        let span = (to.at + shift - from.at).to_f64();
        let rise = (to.travel - from.travel).to_f64();
        if rise + span < -FIFO_TOLERANCE * span {
            return Err(TtfError::Fifo {
                segment,
                slope: rise / span,
            });
        }
    }
    Ok(())
}

/// Largest rising slope and steepest falling slope (as a positive number).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SlopeBounds {
    pub lambda_max: f64,
    pub lambda_min: f64,
}

impl SlopeBounds {
    pub fn new(lambda_max: f64, lambda_min: f64) -> Self {
        Self {
            lambda_max,
            lambda_min,
        }
    }

    pub fn merge(self, other: SlopeBounds) -> SlopeBounds {
        SlopeBounds {
            lambda_max: self.lambda_max.max(other.lambda_max),
            lambda_min: self.lambda_min.max(other.lambda_min),
        }
    }
}

/// Slope bounds of the periodic polyline through `samples` (sorted by time).
pub fn slope_bounds<T: Time>(samples: &[(T, T)]) -> SlopeBounds {
    let mut bounds = SlopeBounds::default();
    if samples.len() < 2 {
        return bounds;
    }
    for i in 0..samples.len() {
        let (x1, y1) = samples[i];
        let (x2, y2) = match samples.get(i + 1) {
            Some(&(x, y)) => (x, y),
            None => (samples[0].0 + T::PERIOD, samples[0].1),
        };
        let slope = (y2 - y1).to_f64() / (x2 - x1).to_f64();
        bounds.lambda_max = bounds.lambda_max.max(slope);
        bounds.lambda_min = bounds.lambda_min.max(-slope);
    }
    bounds
}

/// Half-open daily interval `[begin, end)` that does not cross midnight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeWindow<T> {
    pub begin: T,
    pub end: T,
}

impl<T: Time> TimeWindow<T> {
    pub fn new(begin: T, end: T) -> Result<Self, Error> {
        if begin < T::zero() || end > T::PERIOD || begin >= end {
            return Err(Error::Window(format!(
                "[{begin}, {end}) must satisfy 0 <= begin < end <= {}",
                T::PERIOD
            )));
        }
        Ok(Self { begin, end })
    }

    pub fn from_hours(begin: u32, end: u32) -> Result<Self, Error> {
        Self::new(
            T::from_seconds(f64::from(begin) * 3600.0),
            T::from_seconds(f64::from(end) * 3600.0),
        )
    }

    pub fn whole_day() -> Self {
        Self {
            begin: T::zero(),
            end: T::PERIOD,
        }
    }

    pub fn len(&self) -> T {
        self.end - self.begin
    }

    pub fn contains(&self, t: T) -> bool {
        self.begin <= t && t < self.end
    }
}

/// 0:00-6:00, 7:00-9:00, 11:00-14:00 and 17:00-19:00.
pub fn default_windows<T: Time>() -> Vec<TimeWindow<T>> {
    [(0, 6), (7, 9), (11, 14), (17, 19)]
        .into_iter()
        .map(|(b, e)| TimeWindow::from_hours(b, e).expect("static windows are valid"))
        .collect()
}

fn parse_clock(text: &str) -> Result<f64, Error> {
    let bad = || Error::Window(format!("cannot parse clock time `{text}`"));
    let (h, m) = match text.split_once(':') {
        Some((h, m)) => (h, m),
        None => (text, "0"),
    };
    let h: u32 = h.trim().parse().map_err(|_| bad())?;
    let m: u32 = m.trim().parse().map_err(|_| bad())?;
    if m >= 60 || h > 24 || (h == 24 && m > 0) {
        return Err(bad());
    }
    Ok(f64::from(h * 3600 + m * 60))
}

/// Parses `HH:MM-HH:MM` (minutes optional).
impl<T: Time> FromStr for TimeWindow<T> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (b, e) = s
            .split_once('-')
            .ok_or_else(|| Error::Window(format!("expected BEGIN-END, got `{s}`")))?;
        Self::new(T::from_seconds(parse_clock(b)?), T::from_seconds(parse_clock(e)?))
    }
}

impl<T: Time> fmt::Display for TimeWindow<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let clock = |t: T| {
            let s = t.to_seconds().round() as u64;
            format!("{}:{:02}", s / 3600, (s % 3600) / 60)
        };
        write!(f, "{}-{}", clock(self.begin), clock(self.end))
    }
}
