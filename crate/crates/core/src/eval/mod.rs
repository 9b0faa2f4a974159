//! Query generation, error measurement against the exact search, and
//! summary statistics.

mod bench;
mod output;
mod queries;

pub use bench::{classify, run_benchmark, run_exhaustive, BenchConfig, BenchReport, Class, ExhaustiveConfig, ExhaustiveReport};
pub use output::{write_records, write_summaries, RECORD_HEADER, SUMMARY_HEADER};
pub use queries::{gen_rank, gen_uniform, RankQuery};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Time;
use crate::tdsearch::EaQuery;

/// Approximate algorithms measured by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algo {
    Freeflow,
    Tds,
    TdsA,
}

impl Algo {
    pub const ALL: [Algo; 3] = [Algo::Freeflow, Algo::Tds, Algo::TdsA];

    pub fn name(self) -> &'static str {
        match self {
            Algo::Freeflow => "freeflow",
            Algo::Tds => "tds",
            Algo::TdsA => "tds-a",
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algo::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown algorithm '{s}' (expected freeflow, tds or tds-a)")))
    }
}

/// One approximate answer compared to the exact one.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRecord<T> {
    pub query_id: usize,
    pub query: EaQuery<T>,
    pub algo: Algo,
    pub exact: T,
    pub approx: T,
    /// `approx - exact` in seconds.
    pub abs_error: f64,
    /// `abs_error` over the exact travel time; 0 when that travel time is 0.
    pub rel_error: f64,
    pub time_us: Option<f64>,
}

impl<T: Time> ErrorRecord<T> {
    /// Fails when `approx` is earlier than the exact arrival.
    pub fn new(query_id: usize, query: EaQuery<T>, algo: Algo, exact: T, approx: T) -> Result<Self> {
        if approx < exact {
            return Err(Error::NegativeError {
                query: query_id,
                exact: exact.to_string(),
                approx: approx.to_string(),
            });
        }
        let abs_error = (approx - exact).to_seconds();
        let travel = (exact - query.tau).to_seconds();
        let rel_error = if abs_error == 0.0 || travel <= 0.0 {
            0.0
        } else {
            abs_error / travel
        };
        Ok(Self {
            query_id,
            query,
            algo,
            exact,
            approx,
            abs_error,
            rel_error,
            time_us: None,
        })
    }

    pub fn is_optimal(&self) -> bool {
        self.approx == self.exact
    }
}

/// Aggregate over all records of one algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorSummary {
    pub algo: Algo,
    /// Dijkstra rank the summary is restricted to, if any.
    pub rank: Option<u32>,
    pub queries: usize,
    /// Queries the algorithm could not answer although the exact search could.
    pub unreachable: usize,
    pub optimal_fraction: f64,
    pub mean_rel_error: f64,
    pub q999_rel_error: f64,
    pub max_rel_error: f64,
    pub mean_abs_error: f64,
    pub mean_time_us: Option<f64>,
    pub median_time_us: Option<f64>,
    /// Median exact search time over median algorithm time.
    pub speedup: Option<f64>,
}

impl ErrorSummary {
    /// `exact_times_us` are the exact search times of the same queries,
    /// used for the speedup.
    pub fn from_records<T: Time>(
        algo: Algo,
        rank: Option<u32>,
        records: &[&ErrorRecord<T>],
        unreachable: usize,
        exact_times_us: &[f64],
    ) -> Self {
        let n = records.len();
        let rel: Vec<f64> = records.iter().map(|r| r.rel_error).collect();
        let mean = |xs: &[f64]| if xs.is_empty() { 0.0 } else { xs.iter().sum::<f64>() / xs.len() as f64 };
        let times: Option<Vec<f64>> = records.iter().map(|r| r.time_us).collect();
        let times = times.filter(|t| !t.is_empty());
        let median_time_us = times.as_deref().and_then(median);
        let exact_median = median(exact_times_us);
        Self {
            algo,
            rank,
            queries: n,
            unreachable,
            optimal_fraction: if n == 0 {
                0.0
            } else {
                records.iter().filter(|r| r.is_optimal()).count() as f64 / n as f64
            },
            mean_rel_error: mean(&rel),
            q999_rel_error: quantile(&rel, 0.999).unwrap_or(0.0),
            max_rel_error: rel.iter().copied().fold(0.0, f64::max),
            mean_abs_error: mean(&records.iter().map(|r| r.abs_error).collect::<Vec<_>>()),
            mean_time_us: times.as_deref().map(mean),
            median_time_us,
            speedup: match (exact_median, median_time_us) {
                (Some(e), Some(a)) if a > 0.0 => Some(e / a),
                _ => None,
            },
        }
    }
}

/// Smallest `x` in `values` such that at least `alpha * |values|` elements
/// are strictly smaller than `x`. When no element qualifies (many ties at
/// the top) the maximum is returned.
pub fn quantile(values: &[f64], alpha: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Empty);
    }
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::Config(format!("quantile level {alpha} outside [0, 1)")));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let need = alpha * sorted.len() as f64;
    let mut i = 0;
    while i < sorted.len() {
        // `i` elements are strictly smaller than sorted[i] at a run start
        if i as f64 >= need {
            return Ok(sorted[i]);
        }
        let v = sorted[i];
        while i < sorted.len() && sorted[i] == v {
            i += 1;
        }
    }
    Ok(sorted[sorted.len() - 1])
}

/// Median; the lower middle element for even lengths.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Some(sorted[(sorted.len() - 1) / 2])
}
