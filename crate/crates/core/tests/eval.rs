mod common;

use proptest::prelude::*;

use tdroute::engine::window_graph;
use tdroute::eval::{
    gen_rank, gen_uniform, quantile, run_benchmark, run_exhaustive, write_records, write_summaries, Algo, BenchConfig,
    Class, ErrorRecord, ExhaustiveConfig, RECORD_HEADER,
};
use tdroute::ttf::default_windows;
use tdroute::{EaQuery, Error, Index, TdsIndex, TimeWindow};

fn index(n: usize, td_fraction: f64, seed: u64) -> Index {
    TdsIndex::build(common::instance(n, td_fraction, seed), default_windows()).unwrap()
}

/// Scans every element: the smallest one with enough strictly smaller
/// elements, else the maximum.
fn quantile_oracle(values: &[f64], alpha: f64) -> f64 {
    let need = alpha * values.len() as f64;
    let qualifying = values
        .iter()
        .copied()
        .filter(|&x| values.iter().filter(|&&y| y < x).count() as f64 >= need);
    qualifying
        .reduce(f64::min)
        .unwrap_or_else(|| values.iter().copied().fold(f64::MIN, f64::max))
}

proptest! {
    #[test]
    fn quantile_matches_scan(values in prop::collection::vec(0u8..20, 1..60), alpha in 0.0..1.0f64) {
        let values: Vec<f64> = values.into_iter().map(f64::from).collect();
        prop_assert_eq!(quantile(&values, alpha).unwrap(), quantile_oracle(&values, alpha));
    }
}

#[test]
fn quantile_edge_cases() {
    assert!(matches!(quantile(&[], 0.5), Err(Error::Empty)));
    assert!(quantile(&[1.0], 1.0).is_err());
    assert_eq!(quantile(&[3.0, 1.0, 2.0], 0.0).unwrap(), 1.0);
    // 999 zeros and one positive value
    let mut v = vec![0.0; 999];
    v.push(0.25);
    assert_eq!(quantile(&v, 0.999).unwrap(), 0.25);
    assert_eq!(quantile(&[5.0; 10], 0.5).unwrap(), 5.0);
}

#[test]
fn error_record_rejects_faster_than_exact() {
    let q = EaQuery { s: 0, t: 1, tau: 0i64 };
    assert!(ErrorRecord::new(0, q, Algo::Tds, 1000, 990).is_err());
    let r = ErrorRecord::new(0, q, Algo::Tds, 1000, 1100).unwrap();
    assert_eq!(r.abs_error, 10.0);
    assert_eq!(r.rel_error, 0.1);
    assert!(!r.is_optimal());
    let zero = ErrorRecord::new(0, q, Algo::Tds, 0, 0).unwrap();
    assert_eq!(zero.rel_error, 0.0);
}

#[test]
fn uniform_queries_are_deterministic_and_uniform() {
    let graph = common::instance(1000, 0.05, 40);
    let a = gen_uniform(&graph, 100, 40);
    assert_eq!(a, gen_uniform(&graph, 100, 40));
    assert_ne!(a, gen_uniform(&graph, 100, 41));

    let nodes = graph.largest_scc();
    let n = 200_000;
    let mut counts = vec![0u32; graph.node_count()];
    for q in gen_uniform(&graph, n, 42) {
        counts[q.s as usize] += 1;
        assert!((0..common::DAY).contains(&q.tau));
    }
    let expected = n as f64 / nodes.len() as f64;
    let chi2: f64 = nodes.iter().map(|&v| (counts[v as usize] as f64 - expected).powi(2) / expected).sum();
    let df = (nodes.len() - 1) as f64;
    // about five standard deviations above the mean
    assert!(chi2 < df + 5.0 * (2.0 * df).sqrt(), "chi2 {chi2} df {df}");
}

#[test]
fn rank_queries_match_recount() {
    let graph = common::instance(1000, 0.1, 43);
    let scalar = window_graph(&graph, &TimeWindow::whole_day());
    let queries = gen_rank(&graph, 5, 43);
    assert!(queries.windows(2).all(|w| w[0].rank <= w[1].rank));
    assert_eq!(queries, gen_rank(&graph, 5, 43));
    for rq in &queries {
        assert!(rq.rank >= 1);
        let dist = common::textbook_dijkstra(&scalar, rq.query.s);
        let d = dist[rq.query.t as usize].unwrap();
        let less = dist.iter().flatten().filter(|&&x| x < d).count();
        let at_most = dist.iter().flatten().filter(|&&x| x <= d).count();
        // 0-based position 2^rank - 1 in settle order
        let pos = (1usize << rq.rank) - 1;
        assert!(less <= pos && pos < at_most, "rank {} less {less} at_most {at_most}", rq.rank);
    }
}

fn csv_bytes(index: &Index, queries: &[EaQuery<i64>], workers: usize) -> (Vec<u8>, Vec<u8>) {
    let cfg = BenchConfig {
        workers,
        ..BenchConfig::default()
    };
    let report = run_benchmark(index, queries, None, &cfg).unwrap();
    let (mut records, mut summaries) = (Vec::new(), Vec::new());
    write_records(&mut records, &report.records).unwrap();
    write_summaries(&mut summaries, &report.summaries).unwrap();
    (records, summaries)
}

#[test]
fn benchmark_output_is_independent_of_workers() {
    let idx = index(2000, 0.1, 44);
    let queries = gen_uniform(idx.graph(), 300, 44);
    let one = csv_bytes(&idx, &queries, 1);
    assert_eq!(one, csv_bytes(&idx, &queries, 3));
    assert_eq!(one, csv_bytes(&idx, &queries, 1));
    let text = String::from_utf8(one.0).unwrap();
    assert!(text.starts_with(RECORD_HEADER));
    assert_eq!(text.lines().count(), 1 + 3 * 300);
}

#[test]
fn benchmark_rank_summaries() {
    let idx = index(1500, 0.1, 45);
    let rq = gen_rank(idx.graph(), 3, 45);
    let queries: Vec<_> = rq.iter().map(|r| r.query).collect();
    let ranks: Vec<_> = rq.iter().map(|r| r.rank).collect();
    let report = run_benchmark(&idx, &queries, Some(&ranks), &BenchConfig::default()).unwrap();
    let max_rank = *ranks.iter().max().unwrap() as usize;
    assert_eq!(report.summaries.len(), 3 * (1 + max_rank));
    assert!(run_benchmark(&idx, &queries, Some(&ranks[1..]), &BenchConfig::default()).is_err());
}

#[test]
fn constant_instance_benchmark_is_exact() {
    let idx = index(2000, 0.0, 46);
    let queries = gen_uniform(idx.graph(), 500, 46);
    let report = run_benchmark(&idx, &queries, None, &BenchConfig::default()).unwrap();
    assert_eq!(report.records.len(), 3 * 500);
    assert!(report.records.iter().all(|r| r.is_optimal()));
    for s in &report.summaries {
        assert_eq!(s.optimal_fraction, 1.0);
        assert_eq!(s.max_rel_error, 0.0);
    }
}

#[test]
fn empty_outputs_still_have_headers() {
    let mut out = Vec::new();
    write_records::<i64>(&mut out, &[]).unwrap();
    assert_eq!(String::from_utf8(out).unwrap().trim_end(), RECORD_HEADER);
}

#[test]
fn exhaustive_sweep_on_constant_instance() {
    let idx = index(1000, 0.0, 47);
    let report = run_exhaustive(&idx, &ExhaustiveConfig::new(50, 86_400)).unwrap();
    assert_eq!(report.departures, 10);
    assert_eq!(report.total, report.sources * (report.sources - 1) * 10);
    assert_eq!(report.optimal, report.total);
    assert_eq!(report.outliers, 0);
    assert!(report.outlier_records.is_empty());
}

#[test]
fn exhaustive_fractions_sum_to_one() {
    let idx = index(1500, 0.2, 48);
    let mut cfg = ExhaustiveConfig::new(60, 28_800);
    cfg.workers = 2;
    let report = run_exhaustive(&idx, &cfg).unwrap();
    let sum: f64 = [Class::Optimal, Class::QuasiOptimal, Class::Outlier]
        .into_iter()
        .map(|c| report.fraction(c))
        .sum();
    assert!((sum - 1.0).abs() < 1e-12);
    assert_eq!(report.optimal + report.quasi_optimal + report.outliers, report.total);
    assert_eq!(report.outliers, report.outlier_records.len());
    cfg.workers = 1;
    assert_eq!(run_exhaustive(&idx, &cfg).unwrap(), report);
}

#[test]
fn exhaustive_budget_guard() {
    let idx = index(1000, 0.0, 47);
    let mut cfg = ExhaustiveConfig::new(1, 10);
    cfg.budget = 1_000_000;
    assert!(run_exhaustive(&idx, &cfg).is_err());
    assert!(run_exhaustive(&idx, &ExhaustiveConfig::new(0, 10)).is_err());
}
