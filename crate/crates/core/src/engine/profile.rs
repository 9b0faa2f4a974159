use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::network::{EdgeId, NodeId, TdGraph};
use crate::scalar::Time;
use crate::tdsearch::{EaQuery, TdSearch};
use crate::ttf::{slope_bounds, SlopeBounds};

/// Arrival times sampled at departures `0, rate, 2 rate, ...` over one day.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile<T> {
    rate: T,
    arrivals: Vec<T>,
    paths: Vec<Vec<EdgeId>>,
}

pub(crate) fn sample_count<T: Time>(rate: T) -> Result<usize> {
    if rate <= T::zero() || !(T::PERIOD % rate).is_zero() {
        return Err(Error::Config(format!("sample rate {rate} must be positive and divide the day")));
    }
    Ok((T::PERIOD / rate).to_f64().round() as usize)
}

impl<T: Time> Profile<T> {
    /// `arrivals[i]` and `paths[i]` belong to departure `i * rate`.
    pub fn new(rate: T, arrivals: Vec<T>, paths: Vec<Vec<EdgeId>>) -> Self {
        assert_eq!(arrivals.len(), paths.len());
        assert_eq!(Some(arrivals.len()), sample_count(rate).ok());
        Self { rate, arrivals, paths }
    }

    pub fn rate(&self) -> T {
        self.rate
    }

    pub fn len(&self) -> usize {
        self.arrivals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrivals.is_empty()
    }

    pub fn arrivals(&self) -> &[T] {
        &self.arrivals
    }

    pub fn paths(&self) -> &[Vec<EdgeId>] {
        &self.paths
    }

    pub fn departure(&self, i: usize) -> T {
        T::from_ticks_f64(i as f64) * self.rate
    }

    /// Interpolated arrival in ticks for departure `tau`. The last sample
    /// is joined to the first one of the next day.
    pub fn interpolate(&self, tau: T) -> f64 {
        let clock = tau.wrap();
        let day = (tau - clock).to_f64();
        let r = self.rate.to_f64();
        let i = (clock / self.rate).to_f64() as usize;
        let dt = clock.to_f64() - i as f64 * r;
        let a1 = self.arrivals[i].to_f64();
        if dt == 0.0 {
            return day + a1;
        }
        let a2 = match self.arrivals.get(i + 1) {
            Some(&a) => a.to_f64(),
            None => self.arrivals[0].to_f64() + T::PERIOD.to_f64(),
        };
        day + ((r - dt) / r) * a1 + (dt / r) * a2
    }

    /// Travel times `arrival - departure` as `(departure, travel)` pairs.
    pub fn travel_times(&self) -> Vec<(T, T)> {
        self.arrivals
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                let dep = self.departure(i);
                (dep, a - dep)
            })
            .collect()
    }

    /// Slope bounds of the sampled travel-time curve.
    pub fn slope_bounds(&self) -> SlopeBounds {
        slope_bounds(&self.travel_times())
    }

    /// Number of distinct edge sequences among the sampled paths.
    pub fn count_distinct_paths(&self) -> usize {
        self.paths.iter().map(Vec::as_slice).collect::<HashSet<_>>().len()
    }
}

/// Maximum interpolation error of a profile sampled exactly, in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileErrorBound {
    pub seconds: f64,
}

pub fn error_bound<T: Time>(rate: T, b: SlopeBounds) -> ProfileErrorBound {
    let r = rate.to_seconds();
    ProfileErrorBound {
        seconds: (r * b.lambda_max + r * b.lambda_min) / 4.0,
    }
}

/// Profile sampled with the exact time-dependent search.
pub fn exact_profile<T: Time>(graph: &TdGraph<T>, s: NodeId, t: NodeId, rate: T) -> Result<Option<Profile<T>>> {
    let samples = sample_count(rate)?;
    graph.check_node(s)?;
    graph.check_node(t)?;
    let mut search = TdSearch::new(graph.node_count());
    let mut arrivals = Vec::with_capacity(samples);
    let mut paths = Vec::with_capacity(samples);
    let mut tau = T::zero();
    for _ in 0..samples {
        let Some(r) = search.query(graph, EaQuery { s, t, tau }) else {
            return Ok(None);
        };
        arrivals.push(r.arrival);
        paths.push(r.path);
        tau = tau + rate;
    }
    Ok(Some(Profile::new(rate, arrivals, paths)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(k: usize) -> Profile<i64> {
        let rate = 864_000 / k as i64;
        let arrivals = (0..k as i64).map(|i| i * rate + 1000 + 7 * i).collect();
        Profile::new(rate, arrivals, vec![vec![]; k])
    }

    #[test]
    fn interpolation_weights() {
        let p = ramp(144);
        let (a1, a2) = (p.arrivals[0] as f64, p.arrivals[1] as f64);
        assert_eq!(p.interpolate(4200), 0.3 * a1 + 0.7 * a2);
        assert_eq!(p.interpolate(6000), a2);
        assert_eq!(p.interpolate(3000), (a1 + a2) / 2.0);
    }

    #[test]
    fn interpolation_wraps() {
        let p = ramp(144);
        let last = *p.arrivals.last().unwrap() as f64;
        let next = p.arrivals[0] as f64 + 864_000.0;
        assert_eq!(p.interpolate(864_000 - 3000), (last + next) / 2.0);
        assert_eq!(p.interpolate(864_000 + 6000), 864_000.0 + p.arrivals[1] as f64);
    }

    #[test]
    fn bound_values() {
        assert_eq!(error_bound(6000i64, SlopeBounds::new(0.19, 0.15)).seconds, 51.0);
        assert_eq!(error_bound(600.0f64, SlopeBounds::new(0.19, 0.15)).seconds, 51.0);
        assert_eq!(error_bound(6000i64, SlopeBounds::default()).seconds, 0.0);
    }

    #[test]
    fn rate_must_divide_day() {
        assert!(sample_count(7i64).is_err());
        assert!(sample_count(0i64).is_err());
        assert_eq!(sample_count(6000i64).unwrap(), 144);
    }

    #[test]
    fn distinct_paths() {
        let p = Profile::new(432_000i64, vec![1, 2], vec![vec![0, 1], vec![0, 1]]);
        assert_eq!(p.count_distinct_paths(), 1);
        let p = Profile::new(432_000i64, vec![1, 2], vec![vec![0, 1], vec![2]]);
        assert_eq!(p.count_distinct_paths(), 2);
    }
}
