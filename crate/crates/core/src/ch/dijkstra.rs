//! Plain one-to-all Dijkstra on a [`ScalarGraph`].

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::ScalarGraph;
use crate::network::{EdgeId, NodeId};
use crate::scalar::{Key, Time};

#[derive(Debug, Clone)]
pub struct ShortestPathTree<T> {
    pub dist: Vec<Option<T>>,
    /// Original edge id used to reach each node.
    pub pred: Vec<Option<EdgeId>>,
    /// Nodes in settle order, i.e. sorted by `(distance, node id)`.
    pub order: Vec<NodeId>,
}

impl<T: Time> ShortestPathTree<T> {
    /// Path to `t` as original edge ids, `None` when unreachable.
    pub fn path_to(&self, graph: &ScalarGraph<T>, t: NodeId) -> Option<Vec<EdgeId>> {
        self.dist[t as usize]?;
        let by_original: std::collections::HashMap<EdgeId, NodeId> =
            graph.edges().iter().map(|e| (e.original, e.tail)).collect();
        let mut path = Vec::new();
        let mut v = t;
        while let Some(e) = self.pred[v as usize] {
            path.push(e);
            v = by_original[&e];
        }
        path.reverse();
        Some(path)
    }
}

pub fn one_to_all<T: Time>(graph: &ScalarGraph<T>, source: NodeId) -> ShortestPathTree<T> {
    let n = graph.node_count();
    let (first, ids) = graph.out_csr();
    let edges = graph.edges();
    let mut dist: Vec<Option<T>> = vec![None; n];
    let mut pred = vec![None; n];
    let mut settled = vec![false; n];
    let mut order = Vec::new();
    let mut heap = BinaryHeap::new();
    dist[source as usize] = Some(T::zero());
    heap.push(Reverse((Key(T::zero()), source)));
    while let Some(Reverse((Key(d), v))) = heap.pop() {
        if settled[v as usize] {
            continue;
        }
        settled[v as usize] = true;
        order.push(v);
        for &i in &ids[first[v as usize] as usize..first[v as usize + 1] as usize] {
            let e = &edges[i as usize];
            let nd = d + e.weight;
            if dist[e.head as usize].is_none_or(|cur| nd < cur) {
                dist[e.head as usize] = Some(nd);
                pred[e.head as usize] = Some(e.original);
                heap.push(Reverse((Key(nd), e.head)));
            }
        }
    }
    ShortestPathTree { dist, pred, order }
}

/// Dijkstra rank of a position in settle order (the source is position 1).
pub fn rank_of_position(position: usize) -> u32 {
    assert!(position >= 1);
    usize::BITS - (position - 1).leading_zeros()
}
