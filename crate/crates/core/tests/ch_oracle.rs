mod common;

use rand::Rng;

use tdroute::ch::{ChQuery, ScalarEdge, ScalarGraph};
use tdroute::engine::freeflow_graph;
use tdroute::{AltConfig, ChIndex};

fn path_weight(g: &ScalarGraph<i64>, edges: &[u32], s: u32, t: u32) -> i64 {
    let mut at = s;
    let mut sum = 0;
    for &id in edges {
        let e = g.edges().iter().find(|e| e.original == id).unwrap();
        assert_eq!(e.tail, at);
        at = e.head;
        sum += e.weight;
    }
    assert_eq!(at, t);
    sum
}

#[test]
fn all_pairs_on_small_random_graphs() {
    let mut rng = common::rng(1);
    for round in 0..40 {
        let n = rng.gen_range(2..=60);
        let m = rng.gen_range(0..=4 * n);
        let g = common::random_scalar_graph(&mut rng, n, m);
        let ch = ChIndex::build(&g);
        let mut q = ChQuery::new(&ch);
        for s in 0..n as u32 {
            let oracle = common::textbook_dijkstra(&g, s);
            for t in 0..n as u32 {
                let got = q.query(&ch, s, t);
                assert_eq!(got.as_ref().map(|p| p.distance), oracle[t as usize], "round {round} {s}->{t}");
                if let Some(p) = got {
                    assert_eq!(path_weight(&g, &p.edges, s, t), p.distance);
                }
            }
        }
    }
}

#[test]
fn sampled_pairs_on_larger_random_graphs() {
    let mut rng = common::rng(2);
    for _ in 0..10 {
        let n = rng.gen_range(100..=300);
        let g = common::random_scalar_graph(&mut rng, n, 3 * n);
        let ch = ChIndex::build(&g);
        let mut q = ChQuery::new(&ch);
        for _ in 0..5 {
            let s = rng.gen_range(0..n as u32);
            let oracle = common::textbook_dijkstra(&g, s);
            for t in 0..n as u32 {
                assert_eq!(q.distance(&ch, s, t), oracle[t as usize]);
            }
        }
    }
}

#[test]
fn generated_instance_matches_dijkstra() {
    let graph = common::instance(5000, 0.05, 3);
    let g = freeflow_graph(&graph);
    let ch = ChIndex::build(&g);
    let mut q = ChQuery::new(&ch);
    let mut rng = common::rng(3);
    let sources: Vec<u32> = (0..5).map(|_| rng.gen_range(0..5000)).collect();
    for s in sources {
        let tree = tdroute::ch::dijkstra::one_to_all(&g, s);
        for _ in 0..100 {
            let t = rng.gen_range(0..5000u32);
            let p = q.query(&ch, s, t).unwrap();
            assert_eq!(Some(p.distance), tree.dist[t as usize]);
            common::assert_walk(&graph, &p.edges, s, t);
            let sum: i64 = p.edges.iter().map(|&e| g.edges().iter().find(|x| x.original == e).unwrap().weight).sum();
            assert_eq!(sum, p.distance);
        }
    }
}

#[test]
fn isolated_node_is_unreachable() {
    let e = |tail, head, weight, original| ScalarEdge { tail, head, weight, original };
    let g = ScalarGraph::new(4, vec![e(0, 1, 5i64, 0), e(1, 2, 5, 1), e(2, 0, 5, 2)]);
    let ch = ChIndex::build(&g);
    assert!(ch.query(0, 3).is_none());
    assert!(ch.query(3, 0).is_none());
    assert_eq!(ch.query(3, 3).unwrap().distance, 0);
    assert!(ch.alternatives(0, 3, AltConfig::default()).is_none());
}

#[test]
fn alternatives_contain_shortest_path_and_grow_with_stretch() {
    let graph = common::instance(3000, 0.05, 4);
    let g = freeflow_graph(&graph);
    let ch = ChIndex::build(&g);
    let mut q = ChQuery::new(&ch);
    let mut rng = common::rng(4);
    let mut larger = 0;
    for _ in 0..1000 {
        let s = rng.gen_range(0..3000u32);
        let t = rng.gen_range(0..3000u32);
        let shortest = q.query(&ch, s, t).unwrap();
        let tight = q.alternatives(&ch, s, t, AltConfig { stretch: 1.0 }).unwrap();
        let loose = q.alternatives(&ch, s, t, AltConfig { stretch: 1.2 }).unwrap();
        assert_eq!(tight.distance, shortest.distance);
        for e in &shortest.edges {
            assert!(tight.edges.binary_search(e).is_ok());
        }
        for e in &tight.edges {
            assert!(loose.edges.binary_search(e).is_ok());
        }
        if loose.edges.len() > shortest.edges.len() {
            larger += 1;
        }
    }
    assert!(larger > 100, "alternatives rarely add edges: {larger}");
}

#[test]
fn unique_path_alternatives_equal_the_path() {
    let e = |tail, head, weight, original| ScalarEdge { tail, head, weight, original };
    let g = ScalarGraph::new(5, (0..4).map(|i| e(i, i + 1, 3i64, i)).collect());
    let ch = ChIndex::build(&g);
    let alt = ch.alternatives(0, 4, AltConfig { stretch: 2.0 }).unwrap();
    assert_eq!(alt.edges, vec![0, 1, 2, 3]);
    assert_eq!(ch.query(0, 4).unwrap().edges, vec![0, 1, 2, 3]);
}

#[test]
fn build_is_deterministic() {
    let graph = common::instance(2000, 0.05, 5);
    let g = freeflow_graph(&graph);
    assert_eq!(ChIndex::build(&g), ChIndex::build(&g));
}
