//! CSV output. Times and errors are written in seconds.
//!
//! Records: `query_id,s,t,tau,algo,exact,approx,abs_err,rel_err,time_us`.
//! `time_us` is empty unless timings were requested.
//!
//! Summaries: `algo,rank,queries,unreachable,optimal_fraction,mean_rel_err,
//! q999_rel_err,max_rel_err,mean_abs_err,mean_time_us,median_time_us,speedup`.
//! `rank` is empty for the summary over all queries.

use std::io::Write;

use serde::Serialize;

use super::{ErrorRecord, ErrorSummary};
use crate::error::Result;
use crate::scalar::Time;

pub const RECORD_HEADER: &str = "query_id,s,t,tau,algo,exact,approx,abs_err,rel_err,time_us";
pub const SUMMARY_HEADER: &str = "algo,rank,queries,unreachable,optimal_fraction,mean_rel_err,q999_rel_err,max_rel_err,mean_abs_err,mean_time_us,median_time_us,speedup";

#[derive(Serialize)]
struct RecordRow<'a> {
    query_id: usize,
    s: u32,
    t: u32,
    tau: f64,
    algo: &'a str,
    exact: f64,
    approx: f64,
    abs_err: f64,
    rel_err: f64,
    time_us: Option<f64>,
}

#[derive(Serialize)]
struct SummaryRow<'a> {
    algo: &'a str,
    rank: Option<u32>,
    queries: usize,
    unreachable: usize,
    optimal_fraction: f64,
    mean_rel_err: f64,
    q999_rel_err: f64,
    max_rel_err: f64,
    mean_abs_err: f64,
    mean_time_us: Option<f64>,
    median_time_us: Option<f64>,
    speedup: Option<f64>,
}

pub fn write_records<T: Time>(out: impl Write, records: &[ErrorRecord<T>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if records.is_empty() {
        w.write_record(RECORD_HEADER.split(','))?;
    }
    for r in records {
        w.serialize(RecordRow {
            query_id: r.query_id,
            s: r.query.s,
            t: r.query.t,
            tau: r.query.tau.to_seconds(),
            algo: r.algo.name(),
            exact: r.exact.to_seconds(),
            approx: r.approx.to_seconds(),
            abs_err: r.abs_error,
            rel_err: r.rel_error,
            time_us: r.time_us,
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summaries(out: impl Write, summaries: &[ErrorSummary]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if summaries.is_empty() {
        w.write_record(SUMMARY_HEADER.split(','))?;
    }
    for s in summaries {
        w.serialize(SummaryRow {
            algo: s.algo.name(),
            rank: s.rank,
            queries: s.queries,
            unreachable: s.unreachable,
            optimal_fraction: s.optimal_fraction,
            mean_rel_err: s.mean_rel_error,
            q999_rel_err: s.q999_rel_error,
            max_rel_err: s.max_rel_error,
            mean_abs_err: s.mean_abs_error,
            mean_time_us: s.mean_time_us,
            median_time_us: s.median_time_us,
            speedup: s.speedup,
        })?;
    }
    w.flush()?;
    Ok(())
}
