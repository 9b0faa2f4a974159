//! Independent oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tdroute::ch::{ScalarEdge, ScalarGraph};
use tdroute::network::{generate, GeneratorConfig, TdEdge};
use tdroute::ttf::BreakPoint;
use tdroute::{Graph, TdGraph, Time, TravelTimeFunction};

pub const DAY: i64 = 864_000;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random FIFO function with up to `max_points` breakpoints. Candidates
/// violating FIFO are redrawn.
pub fn random_ttf(rng: &mut impl Rng, max_points: usize) -> TravelTimeFunction<i64> {
    loop {
        let k = rng.gen_range(1..=max_points);
        let mut times: Vec<i64> = (0..k).map(|_| rng.gen_range(0..DAY)).collect();
        times.sort_unstable();
        times.dedup();
        let points = times
            .into_iter()
            .map(|at| BreakPoint::new(at, rng.gen_range(100..20_000)))
            .collect();
        if let Ok(f) = TravelTimeFunction::new(points) {
            return f;
        }
    }
}

/// Random graph without self-loops; parallel edges allowed.
pub fn random_td_graph(rng: &mut impl Rng, n: usize, m: usize, max_points: usize) -> Graph {
    let edges = (0..m)
        .map(|_| {
            let tail = rng.gen_range(0..n as u32);
            let mut head = rng.gen_range(0..n as u32 - 1);
            if head >= tail {
                head += 1;
            }
            TdEdge {
                tail,
                head,
                ttf: random_ttf(rng, max_points),
            }
        })
        .collect();
    TdGraph::new(n, edges).unwrap()
}

pub fn random_scalar_graph(rng: &mut impl Rng, n: usize, m: usize) -> ScalarGraph<i64> {
    let edges = (0..m)
        .map(|i| {
            let tail = rng.gen_range(0..n as u32);
            let mut head = rng.gen_range(0..n as u32 - 1);
            if head >= tail {
                head += 1;
            }
            ScalarEdge {
                tail,
                head,
                weight: rng.gen_range(1..1000),
                original: i as u32,
            }
        })
        .collect();
    ScalarGraph::new(n, edges)
}

/// Earliest arrival over all simple paths, by exhaustive enumeration.
pub fn brute_force_arrival<T: Time>(graph: &TdGraph<T>, s: u32, t: u32, tau: T) -> Option<T> {
    fn dfs<T: Time>(graph: &TdGraph<T>, v: u32, t: u32, at: T, visited: &mut Vec<bool>, best: &mut Option<T>) {
        if v == t {
            if best.is_none_or(|b| at < b) {
                *best = Some(at);
            }
            return;
        }
        visited[v as usize] = true;
        for e in graph.edges().iter().filter(|e| e.tail == v) {
            if !visited[e.head as usize] {
                let next = at + e.ttf.eval(at);
                dfs(graph, e.head, t, next, visited, best);
            }
        }
        visited[v as usize] = false;
    }
    let mut best = None;
    dfs(graph, s, t, tau, &mut vec![false; graph.node_count()], &mut best);
    best
}

/// Array-based O(n^2) Dijkstra.
pub fn textbook_dijkstra(graph: &ScalarGraph<i64>, s: u32) -> Vec<Option<i64>> {
    let n = graph.node_count();
    let mut dist: Vec<Option<i64>> = vec![None; n];
    let mut done = vec![false; n];
    dist[s as usize] = Some(0);
    loop {
        let next = (0..n)
            .filter(|&v| !done[v])
            .filter_map(|v| dist[v].map(|d| (d, v)))
            .min();
        let Some((d, v)) = next else { break };
        done[v] = true;
        for e in graph.edges().iter().filter(|e| e.tail as usize == v) {
            let nd = d + e.weight;
            if dist[e.head as usize].is_none_or(|cur| nd < cur) {
                dist[e.head as usize] = Some(nd);
            }
        }
    }
    dist
}

/// Arrival after following `path`, folded edge by edge.
pub fn fold_path(graph: &Graph, path: &[u32], tau: i64) -> i64 {
    path.iter().fold(tau, |at, &e| at + graph.edge(e).ttf.eval(at.rem_euclid(DAY)))
}

/// Checks that `path` is a walk from `s` to `t`.
pub fn assert_walk<T: Time>(graph: &TdGraph<T>, path: &[u32], s: u32, t: u32) {
    let mut at = s;
    for &e in path {
        let edge = graph.edge(e);
        assert_eq!(edge.tail, at, "path is not contiguous");
        at = edge.head;
    }
    assert_eq!(at, t, "path does not end at the target");
}

/// Generated instances, built once per test binary.
pub fn instance(node_count: usize, td_fraction: f64, seed: u64) -> Arc<Graph> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u64, u64), Arc<Graph>>>> = OnceLock::new();
    let key = (node_count, td_fraction.to_bits(), seed);
    let cache = CACHE.get_or_init(Default::default);
    if let Some(g) = cache.lock().unwrap().get(&key) {
        return Arc::clone(g);
    }
    let g = Arc::new(
        generate(&GeneratorConfig {
            node_count,
            td_fraction,
            seed,
            ..GeneratorConfig::default()
        })
        .unwrap(),
    );
    cache.lock().unwrap().insert(key, Arc::clone(&g));
    g
}

/// Two routes from 0 to 3: a top chain 0-1-3 whose first edge is slow in
/// the morning rush hour, and a constant bottom chain 0-2-3.
pub fn rush_hour_diamond() -> Graph {
    let rush = TravelTimeFunction::new(vec![
        BreakPoint::new(0, 3000),
        BreakPoint::new(252_000, 3000),
        BreakPoint::new(288_000, 9000),
        BreakPoint::new(324_000, 3000),
    ])
    .unwrap();
    let c = TravelTimeFunction::constant;
    TdGraph::new(
        4,
        vec![
            TdEdge { tail: 0, head: 1, ttf: rush },
            TdEdge { tail: 1, head: 3, ttf: c(2000) },
            TdEdge { tail: 0, head: 2, ttf: c(4000) },
            TdEdge { tail: 2, head: 3, ttf: c(4000) },
        ],
    )
    .unwrap()
}
