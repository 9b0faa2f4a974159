mod common;

use std::sync::Arc;

use rand::Rng;

use tdroute::engine::{freeflow_graph, window_graph};
use tdroute::eval::gen_uniform;
use tdroute::network::{generate, GeneratorConfig, TdEdge};
use tdroute::ttf::default_windows;
use tdroute::{exact_profile, td_dijkstra, AltConfig, EaQuery, Index, TdGraph, TdsIndex, TdsOptions, TimeWindow, TravelTimeFunction, WindowSet};

fn index(n: usize, td_fraction: f64, seed: u64) -> Index {
    TdsIndex::build(common::instance(n, td_fraction, seed), default_windows()).unwrap()
}

#[test]
fn approximations_are_dominated() {
    let idx = index(3000, 0.1, 30);
    let mut ctx = idx.context();
    for q in gen_uniform(idx.graph(), 500, 30) {
        let exact = td_dijkstra(idx.graph(), q).unwrap().arrival;
        let tds_a = idx.query_tds_a(&mut ctx, q, AltConfig::default()).unwrap().unwrap();
        let tds = idx.query_tds(&mut ctx, q).unwrap().unwrap();
        let best = idx.best_window_path(&mut ctx, q).unwrap().unwrap();
        let free = idx.query_freeflow(&mut ctx, q).unwrap().unwrap();
        assert!(exact <= tds_a.arrival);
        assert!(tds_a.arrival <= tds.arrival);
        assert!(tds.arrival <= best.arrival);
        assert!(exact <= free.arrival);
        common::assert_walk(idx.graph(), &tds_a.path, q.s, q.t);
        common::assert_walk(idx.graph(), &tds.path, q.s, q.t);
    }
}

#[test]
fn constant_instance_is_solved_exactly() {
    let idx = index(2000, 0.0, 31);
    let mut ctx = idx.context();
    for q in gen_uniform(idx.graph(), 300, 31) {
        let exact = td_dijkstra(idx.graph(), q).unwrap().arrival;
        assert_eq!(idx.query_freeflow(&mut ctx, q).unwrap().unwrap().arrival, exact);
        assert_eq!(idx.query_tds(&mut ctx, q).unwrap().unwrap().arrival, exact);
        assert_eq!(idx.query_tds_a(&mut ctx, q, AltConfig::default()).unwrap().unwrap().arrival, exact);
        assert_eq!(idx.best_window_path(&mut ctx, q).unwrap().unwrap().arrival, exact);
    }
}

#[test]
fn whole_day_window_on_constant_graph_is_freeflow() {
    let graph = common::instance(1500, 0.0, 32);
    let idx = TdsIndex::build(Arc::clone(&graph), vec![TimeWindow::whole_day()]).unwrap();
    let mut ctx = idx.context();
    assert_eq!(window_graph(&graph, &TimeWindow::whole_day()), freeflow_graph(&graph));
    for q in gen_uniform(&graph, 200, 32) {
        let a = idx.query_tds(&mut ctx, q).unwrap().unwrap();
        let b = idx.query_freeflow(&mut ctx, q).unwrap().unwrap();
        assert_eq!(a.arrival, b.arrival);
    }
}

#[test]
fn window_weights_lie_between_freeflow_and_max() {
    let graph = common::instance(2000, 0.3, 33);
    for w in default_windows() {
        let g = window_graph(&graph, &w);
        for e in g.edges() {
            let ttf = &graph.edge(e.original).ttf;
            assert!(ttf.freeflow() <= e.weight && e.weight <= ttf.max_travel());
        }
    }
}

#[test]
fn profile_samples_equal_tds_queries() {
    let idx = index(2000, 0.2, 34);
    let mut ctx = idx.context();
    for q in gen_uniform(idx.graph(), 10, 34) {
        let p = idx.query_profile(&mut ctx, q.s, q.t, 36_000).unwrap().unwrap();
        assert_eq!(p.len(), 24);
        for i in 0..p.len() {
            let tau = p.departure(i);
            let r = idx.query_tds(&mut ctx, EaQuery { tau, ..q }).unwrap().unwrap();
            assert_eq!(p.arrivals()[i], r.arrival);
            assert_eq!(p.paths()[i], r.path);
        }
        assert!(p.count_distinct_paths() <= 24);
    }
    assert!(idx.query_profile(&mut ctx, 0, 1, 7).is_err());
}

#[test]
fn diamond_distinct_paths_match_argmin() {
    let graph = Arc::new(common::rush_hour_diamond());
    let p = exact_profile(&graph, 0, 3, 6000).unwrap().unwrap();
    let idx = TdsIndex::build(Arc::clone(&graph), default_windows()).unwrap();
    let mut ctx = idx.context();
    let approx = idx.query_profile(&mut ctx, 0, 3, 6000).unwrap().unwrap();
    // per sample, the faster of the two routes
    let mut routes = std::collections::BTreeSet::new();
    for i in 0..p.len() {
        let tau = p.departure(i);
        let top = common::fold_path(&graph, &[0, 2], tau);
        let bottom = common::fold_path(&graph, &[1, 3], tau);
        assert_eq!(p.arrivals()[i], top.min(bottom));
        assert!(approx.arrivals()[i] >= p.arrivals()[i]);
        routes.insert(if top <= bottom { "top" } else { "bottom" });
    }
    assert_eq!(routes.len(), 2);
    assert_eq!(p.count_distinct_paths(), routes.len());
}

#[test]
fn enabling_windows_never_hurts() {
    let idx = index(2000, 0.1, 35);
    let mut ctx = idx.context();
    for q in gen_uniform(idx.graph(), 300, 35) {
        let mut prev = i64::MAX;
        for k in 1..=idx.windows().len() {
            let opts = TdsOptions {
                windows: WindowSet::first(k),
                ..TdsOptions::default()
            };
            let a = idx.query_with(&mut ctx, q, &opts).unwrap().unwrap().arrival;
            assert!(a <= prev);
            prev = a;
        }
        let none = TdsOptions {
            windows: WindowSet::none(),
            ..TdsOptions::default()
        };
        assert!(idx.query_with(&mut ctx, q, &none).unwrap().is_none());
    }
}

#[test]
fn tds_result_uses_only_marked_edges() {
    let idx = index(2000, 0.1, 36);
    let mut ctx = idx.context();
    let opts = TdsOptions::default();
    for q in gen_uniform(idx.graph(), 200, 36) {
        let r = idx.query_with(&mut ctx, q, &opts).unwrap().unwrap();
        for &e in &r.path {
            assert!(ctx.marks().is_marked(e));
        }
        let paths = idx.window_paths(&mut ctx, q, WindowSet::all()).unwrap();
        let union: usize = paths.iter().flatten().map(|p| p.path.len()).sum();
        idx.mark(&mut ctx, q.s, q.t, &opts);
        assert!(ctx.marks().count() <= union);
        for p in paths.iter().flatten() {
            for &e in &p.path {
                assert!(ctx.marks().is_marked(e));
            }
        }
    }
}

#[test]
fn breakdown_agrees_with_plain_query() {
    let idx = index(2000, 0.1, 37);
    let mut ctx = idx.context();
    let mut rng = common::rng(37);
    for q in gen_uniform(idx.graph(), 200, 37) {
        let opts = TdsOptions {
            alternatives: rng.gen_bool(0.5).then_some(AltConfig::default()),
            ..TdsOptions::default()
        };
        let plain = idx.query_with(&mut ctx, q, &opts).unwrap();
        let marked = ctx.marks().count();
        let (split, times) = idx.query_breakdown(&mut ctx, q, &opts).unwrap();
        assert_eq!(split.map(|r| r.arrival), plain.map(|r| r.arrival));
        assert_eq!(times.marked_edges, marked);
    }
}

#[test]
fn invalid_nodes_are_rejected() {
    let idx = index(1500, 0.1, 38);
    let mut ctx = idx.context();
    let q = EaQuery { s: 0, t: 1_000_000, tau: 0 };
    assert!(idx.query_tds(&mut ctx, q).is_err());
    assert!(idx.query_freeflow(&mut ctx, q).is_err());
}

#[test]
fn disconnected_pair_is_none() {
    let c = TravelTimeFunction::constant;
    let graph = TdGraph::new(
        3,
        vec![
            TdEdge { tail: 0, head: 1, ttf: c(100i64) },
            TdEdge { tail: 1, head: 0, ttf: c(100) },
        ],
    )
    .unwrap();
    let idx = TdsIndex::build(Arc::new(graph), default_windows()).unwrap();
    let mut ctx = idx.context();
    let q = EaQuery { s: 0, t: 2, tau: 0 };
    assert!(idx.query_tds(&mut ctx, q).unwrap().is_none());
    assert!(idx.query_freeflow(&mut ctx, q).unwrap().is_none());
    assert!(idx.query_profile(&mut ctx, 0, 2, 36_000).unwrap().is_none());
}

#[test]
fn f64_index_agrees_with_integer_index_on_constant_graph() {
    let graph = generate(&GeneratorConfig {
        node_count: 1000,
        td_fraction: 0.0,
        seed: 39,
        ..GeneratorConfig::default()
    })
    .unwrap();
    let float = Arc::new(graph.convert::<f64>().unwrap());
    let a = TdsIndex::build(Arc::new(graph), default_windows()).unwrap();
    let b = TdsIndex::build(float, default_windows()).unwrap();
    let (mut ca, mut cb) = (a.context(), b.context());
    for q in gen_uniform(a.graph(), 100, 39) {
        let x = a.query_tds(&mut ca, q).unwrap().unwrap().arrival as f64 / 10.0;
        let qf = EaQuery { s: q.s, t: q.t, tau: q.tau as f64 / 10.0 };
        let y = b.query_tds(&mut cb, qf).unwrap().unwrap().arrival;
        assert!((x - y).abs() < 1e-6, "{x} vs {y}");
    }
}
