use std::time::Instant;

use super::{Algo, ErrorRecord, ErrorSummary};
use crate::ch::AltConfig;
use crate::engine::{QueryContext, TdsIndex, TdsOptions};
use crate::error::{Error, Result};
use crate::scalar::Time;
use crate::tdsearch::{EaQuery, EaResult, TdSearch};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub algos: Vec<Algo>,
    /// Marking options shared by `tds` and `tds-a`.
    pub options: TdsOptions,
    pub alt: AltConfig,
    pub workers: usize,
    /// Measure per-query wall clock times. Off by default so that repeated
    /// runs produce identical output.
    pub timings: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            algos: Algo::ALL.to_vec(),
            options: TdsOptions::default(),
            alt: AltConfig::default(),
            workers: 1,
            timings: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchReport<T> {
    /// Sorted by query id, then algorithm.
    pub records: Vec<ErrorRecord<T>>,
    /// One summary per algorithm over all queries, followed by per-rank
    /// summaries when ranks were given.
    pub summaries: Vec<ErrorSummary>,
    /// Queries without any path; excluded from all records.
    pub exact_unreachable: usize,
}

fn run_algo<T: Time>(
    index: &TdsIndex<T>,
    ctx: &mut QueryContext<T>,
    algo: Algo,
    q: EaQuery<T>,
    cfg: &BenchConfig,
) -> Result<Option<EaResult<T>>> {
    match algo {
        Algo::Freeflow => index.query_freeflow(ctx, q),
        Algo::Tds => index.query_with(ctx, q, &cfg.options),
        Algo::TdsA => index.query_with(
            ctx,
            q,
            &TdsOptions {
                alternatives: Some(cfg.alt),
                ..cfg.options
            },
        ),
    }
}

fn micros(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e6
}

#[derive(Default)]
struct Partial<T> {
    records: Vec<ErrorRecord<T>>,
    exact_times: Vec<(usize, f64)>,
    exact_unreachable: usize,
    /// `(query id, algo)` pairs the algorithm could not answer.
    unreachable: Vec<(usize, Algo)>,
}

fn bench_chunk<T: Time>(
    index: &TdsIndex<T>,
    queries: &[(usize, EaQuery<T>)],
    cfg: &BenchConfig,
) -> Result<Partial<T>> {
    let mut ctx = index.context();
    let mut exact_search = TdSearch::new(index.graph().node_count());
    let mut part = Partial {
        records: Vec::new(),
        exact_times: Vec::new(),
        exact_unreachable: 0,
        unreachable: Vec::new(),
    };
    for &(id, q) in queries {
        let start = Instant::now();
        let exact = exact_search.query(index.graph(), q);
        let exact_time = micros(start);
        let Some(exact) = exact else {
            part.exact_unreachable += 1;
            continue;
        };
        if cfg.timings {
            part.exact_times.push((id, exact_time));
        }
        for &algo in &cfg.algos {
            let start = Instant::now();
            let result = run_algo(index, &mut ctx, algo, q, cfg)?;
            let elapsed = micros(start);
            match result {
                Some(r) => {
                    let mut rec = ErrorRecord::new(id, q, algo, exact.arrival, r.arrival)?;
                    rec.time_us = cfg.timings.then_some(elapsed);
                    part.records.push(rec);
                }
                None => part.unreachable.push((id, algo)),
            }
        }
    }
    Ok(part)
}

/// Runs every query with the exact search and each configured algorithm.
/// `ranks`, when given, is index-aligned with `queries` and adds per-rank
/// summaries. The result does not depend on the worker count.
pub fn run_benchmark<T: Time>(
    index: &TdsIndex<T>,
    queries: &[EaQuery<T>],
    ranks: Option<&[u32]>,
    cfg: &BenchConfig,
) -> Result<BenchReport<T>> {
    if cfg.algos.is_empty() {
        return Err(Error::Config("no algorithm selected".into()));
    }
    if cfg.workers == 0 {
        return Err(Error::Config("worker count must be at least 1".into()));
    }
    if let Some(r) = ranks {
        if r.len() != queries.len() {
            return Err(Error::Config("one rank per query expected".into()));
        }
    }
    for q in queries {
        index.graph().check_node(q.s)?;
        index.graph().check_node(q.t)?;
    }
    let numbered: Vec<(usize, EaQuery<T>)> = queries.iter().copied().enumerate().collect();
    let chunk = numbered.len().div_ceil(cfg.workers).max(1);
    let parts: Vec<Result<Partial<T>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = numbered
            .chunks(chunk)
            .map(|c| scope.spawn(move || bench_chunk(index, c, cfg)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("benchmark worker panicked")).collect()
    });

    let mut merged = Partial {
        records: Vec::new(),
        exact_times: Vec::new(),
        exact_unreachable: 0,
        unreachable: Vec::new(),
    };
    for part in parts {
        let part = part?;
        merged.records.extend(part.records);
        merged.exact_times.extend(part.exact_times);
        merged.exact_unreachable += part.exact_unreachable;
        merged.unreachable.extend(part.unreachable);
    }
    merged.records.sort_by_key(|r| (r.query_id, r.algo));
    merged.exact_times.sort_by_key(|&(id, _)| id);
    merged.unreachable.sort();

    let mut groups: Vec<Option<u32>> = vec![None];
    if let Some(r) = ranks {
        let mut distinct: Vec<u32> = r.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        groups.extend(distinct.into_iter().map(Some));
    }
    let in_group = |id: usize, g: Option<u32>| g.is_none() || ranks.map(|r| r[id]) == g;
    let mut summaries = Vec::new();
    for &group in &groups {
        let exact_times: Vec<f64> = merged
            .exact_times
            .iter()
            .filter(|(id, _)| in_group(*id, group))
            .map(|&(_, t)| t)
            .collect();
        for &algo in &cfg.algos {
            let recs: Vec<&ErrorRecord<T>> = merged
                .records
                .iter()
                .filter(|r| r.algo == algo && in_group(r.query_id, group))
                .collect();
            let unreachable = merged
                .unreachable
                .iter()
                .filter(|&&(id, a)| a == algo && in_group(id, group))
                .count();
            summaries.push(ErrorSummary::from_records(algo, group, &recs, unreachable, &exact_times));
        }
    }
    Ok(BenchReport {
        records: merged.records,
        summaries,
        exact_unreachable: merged.exact_unreachable,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Class {
    Optimal,
    QuasiOptimal,
    Outlier,
}

/// Optimal when exact; quasi-optimal when the absolute error is below 10 s
/// or the relative error below 0.5 %.
pub fn classify<T: Time>(record: &ErrorRecord<T>) -> Class {
    if record.is_optimal() {
        Class::Optimal
    } else if record.abs_error < 10.0 || record.rel_error < 0.005 {
        Class::QuasiOptimal
    } else {
        Class::Outlier
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExhaustiveConfig<T> {
    /// Every `node_stride`-th node of the largest component (by id) is used
    /// as source and target.
    pub node_stride: usize,
    /// Departures `0, time_stride, 2 time_stride, ...` within one day.
    pub time_stride: T,
    /// Refuse sweeps with more queries than this.
    pub budget: u64,
    pub algo: Algo,
    pub options: TdsOptions,
    pub alt: AltConfig,
    pub workers: usize,
}

impl<T: Time> ExhaustiveConfig<T> {
    pub fn new(node_stride: usize, time_stride: T) -> Self {
        Self {
            node_stride,
            time_stride,
            budget: 10_000_000,
            algo: Algo::Tds,
            options: TdsOptions::default(),
            alt: AltConfig::default(),
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExhaustiveReport<T> {
    pub sources: usize,
    pub departures: usize,
    /// Classified queries; pairs with `s = t` are skipped.
    pub total: usize,
    pub optimal: usize,
    pub quasi_optimal: usize,
    pub outliers: usize,
    /// Queries the algorithm could not answer. Not classified.
    pub unreachable: usize,
    /// Outlier records ordered by `(s, t, tau)`.
    pub outlier_records: Vec<ErrorRecord<T>>,
}

impl<T> ExhaustiveReport<T> {
    pub fn fraction(&self, class: Class) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        let count = match class {
            Class::Optimal => self.optimal,
            Class::QuasiOptimal => self.quasi_optimal,
            Class::Outlier => self.outliers,
        };
        count as f64 / self.total as f64
    }
}

/// All pairs of the strided node set at all strided departure times.
pub fn run_exhaustive<T: Time>(index: &TdsIndex<T>, cfg: &ExhaustiveConfig<T>) -> Result<ExhaustiveReport<T>> {
    if cfg.node_stride == 0 || cfg.time_stride <= T::zero() {
        return Err(Error::Config("strides must be positive".into()));
    }
    if cfg.workers == 0 {
        return Err(Error::Config("worker count must be at least 1".into()));
    }
    let mut nodes = index.graph().largest_scc();
    nodes.sort_unstable();
    let nodes: Vec<_> = nodes.into_iter().step_by(cfg.node_stride).collect();
    let mut departures = Vec::new();
    let mut tau = T::zero();
    while tau < T::PERIOD {
        departures.push(tau);
        tau = tau + cfg.time_stride;
    }
    let k = nodes.len() as u64;
    let requested = k * k.saturating_sub(1) * departures.len() as u64;
    if requested > cfg.budget {
        return Err(Error::Budget {
            requested,
            budget: cfg.budget,
        });
    }

    let bench = BenchConfig {
        algos: vec![cfg.algo],
        options: cfg.options,
        alt: cfg.alt,
        workers: 1,
        timings: false,
    };
    let sweep_source = |si: usize, ctx: &mut QueryContext<T>, search: &mut TdSearch<T>| -> Result<ExhaustiveReport<T>> {
        let mut part = ExhaustiveReport {
            sources: 0,
            departures: 0,
            total: 0,
            optimal: 0,
            quasi_optimal: 0,
            outliers: 0,
            unreachable: 0,
            outlier_records: Vec::new(),
        };
        let s = nodes[si];
        for (di, &tau) in departures.iter().enumerate() {
            let exact = search.one_to_all(index.graph(), s, tau);
            for (ti, &t) in nodes.iter().enumerate() {
                if t == s {
                    continue;
                }
                let id = (si * nodes.len() + ti) * departures.len() + di;
                let Some(exact) = exact[t as usize] else {
                    part.unreachable += 1;
                    continue;
                };
                let q = EaQuery { s, t, tau };
                let Some(r) = run_algo(index, ctx, cfg.algo, q, &bench)? else {
                    part.unreachable += 1;
                    continue;
                };
                let rec = ErrorRecord::new(id, q, cfg.algo, exact, r.arrival)?;
                part.total += 1;
                match classify(&rec) {
                    Class::Optimal => part.optimal += 1,
                    Class::QuasiOptimal => part.quasi_optimal += 1,
                    Class::Outlier => {
                        part.outliers += 1;
                        part.outlier_records.push(rec);
                    }
                }
            }
        }
        Ok(part)
    };

    let source_ids: Vec<usize> = (0..nodes.len()).collect();
    let chunk = source_ids.len().div_ceil(cfg.workers).max(1);
    let parts: Vec<Result<Vec<ExhaustiveReport<T>>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = source_ids
            .chunks(chunk)
            .map(|c| {
                let sweep_source = &sweep_source;
                scope.spawn(move || {
                    let mut ctx = index.context();
                    let mut search = TdSearch::new(index.graph().node_count());
                    c.iter().map(|&si| sweep_source(si, &mut ctx, &mut search)).collect()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
    });

    let mut report = ExhaustiveReport {
        sources: nodes.len(),
        departures: departures.len(),
        total: 0,
        optimal: 0,
        quasi_optimal: 0,
        outliers: 0,
        unreachable: 0,
        outlier_records: Vec::new(),
    };
    for part in parts {
        for p in part? {
            report.total += p.total;
            report.optimal += p.optimal;
            report.quasi_optimal += p.quasi_optimal;
            report.outliers += p.outliers;
            report.unreachable += p.unreachable;
            report.outlier_records.extend(p.outlier_records);
        }
    }
    report.outlier_records.sort_by_key(|r| r.query_id);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(exact: i64, approx: i64) -> ErrorRecord<i64> {
        ErrorRecord::new(0, EaQuery { s: 0, t: 1, tau: 0 }, Algo::Tds, exact, approx).unwrap()
    }

    #[test]
    fn classification_thresholds() {
        assert_eq!(classify(&record(1000, 1000)), Class::Optimal);
        // 9.9 s on a 100 s trip
        assert_eq!(classify(&record(1000, 1099)), Class::QuasiOptimal);
        assert_eq!(classify(&record(1000, 1100)), Class::Outlier);
        // 20 s on a 10000 s trip is 0.2 %
        assert_eq!(classify(&record(100_000, 100_200)), Class::QuasiOptimal);
        // exactly 0.5 % is not below the threshold
        assert_eq!(classify(&record(100_000, 100_500)), Class::Outlier);
    }
}
