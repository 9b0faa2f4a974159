//! Exact earliest-arrival search on the time-dependent graph.
//!
//! Labels are unwrapped arrival times: a search may run past midnight, and
//! edge functions are evaluated at the label modulo one day. With FIFO
//! functions the search is label-setting, so every node is settled once.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::network::{EdgeId, NodeId, TdGraph};
use crate::scalar::{Key, Time};
use crate::scratch::TimestampedVec;

/// Set of marked edges with O(1) reset.
#[derive(Debug, Clone)]
pub struct EdgeMark {
    stamps: Vec<u32>,
    generation: u32,
    marked: Vec<EdgeId>,
}

impl EdgeMark {
    pub fn new(edge_count: usize) -> Self {
        Self {
            stamps: vec![0; edge_count],
            generation: 1,
            marked: Vec::new(),
        }
    }

    /// Every edge of a graph with `edge_count` edges marked.
    pub fn all(edge_count: usize) -> Self {
        let mut marks = Self::new(edge_count);
        for e in 0..edge_count as EdgeId {
            marks.mark(e);
        }
        marks
    }

    pub fn clear(&mut self) {
        self.marked.clear();
        if self.generation == u32::MAX {
            self.stamps.iter_mut().for_each(|s| *s = 0);
            self.generation = 1;
        } else {
            self.generation += 1;
        }
    }

    /// Returns whether the edge was newly marked.
    pub fn mark(&mut self, edge: EdgeId) -> bool {
        let stamp = &mut self.stamps[edge as usize];
        if *stamp == self.generation {
            return false;
        }
        *stamp = self.generation;
        self.marked.push(edge);
        true
    }

    pub fn is_marked(&self, edge: EdgeId) -> bool {
        self.stamps[edge as usize] == self.generation
    }

    pub fn count(&self) -> usize {
        self.marked.len()
    }

    /// Marked edges in marking order.
    pub fn marked(&self) -> &[EdgeId] {
        &self.marked
    }
}

/// Earliest-arrival query: leave `s` at `tau`, reach `t` as early as possible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EaQuery<T> {
    pub s: NodeId,
    pub t: NodeId,
    pub tau: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EaResult<T> {
    /// Unwrapped arrival time, at least `tau`.
    pub arrival: T,
    pub path: Vec<EdgeId>,
}

/// Reusable search state.
pub struct TdSearch<T> {
    arrival: TimestampedVec<T>,
    pred: Vec<EdgeId>,
    settled: TimestampedVec<()>,
    heap: BinaryHeap<Reverse<(Key<T>, NodeId)>>,
    settled_count: usize,
}

impl<T: Time> TdSearch<T> {
    pub fn new(node_count: usize) -> Self {
        Self {
            arrival: TimestampedVec::new(node_count, T::zero()),
            pred: vec![0; node_count],
            settled: TimestampedVec::new(node_count, ()),
            heap: BinaryHeap::new(),
            settled_count: 0,
        }
    }

    /// Nodes settled by the last search.
    pub fn settled_count(&self) -> usize {
        self.settled_count
    }

    pub fn query(&mut self, graph: &TdGraph<T>, q: EaQuery<T>) -> Option<EaResult<T>> {
        self.run(graph, q.s, Some(q.t), q.tau, |_| true)
    }

    /// Earliest arrival at every node when leaving `s` at `tau`; `None` for
    /// unreachable nodes.
    pub fn one_to_all(&mut self, graph: &TdGraph<T>, s: NodeId, tau: T) -> Vec<Option<T>> {
        self.run(graph, s, None, tau, |_| true);
        (0..graph.node_count()).map(|v| self.arrival.get(v)).collect()
    }

    /// Search that only relaxes marked edges.
    pub fn query_restricted(&mut self, graph: &TdGraph<T>, marks: &EdgeMark, q: EaQuery<T>) -> Option<EaResult<T>> {
        self.run(graph, q.s, Some(q.t), q.tau, |e| marks.is_marked(e))
    }

    fn run(
        &mut self,
        graph: &TdGraph<T>,
        s: NodeId,
        t: Option<NodeId>,
        tau: T,
        allowed: impl Fn(EdgeId) -> bool,
    ) -> Option<EaResult<T>> {
        let n = graph.node_count();
        self.arrival.ensure_len(n, T::zero());
        self.settled.ensure_len(n, ());
        if self.pred.len() < n {
            self.pred.resize(n, 0);
        }
        self.arrival.reset();
        self.settled.reset();
        self.heap.clear();
        self.settled_count = 0;

        self.arrival.set(s as usize, tau);
        self.heap.push(Reverse((Key(tau), s)));
        while let Some(Reverse((Key(at), v))) = self.heap.pop() {
            if self.settled.contains(v as usize) {
                continue;
            }
            self.settled.set(v as usize, ());
            self.settled_count += 1;
            if Some(v) == t {
                return Some(EaResult {
                    arrival: at,
                    path: self.path_to(graph, s, v),
                });
            }
            for (id, edge) in graph.out_edges(v) {
                if !allowed(id) || self.settled.contains(edge.head as usize) {
                    continue;
                }
                let next = at + edge.ttf.eval(at);
                if self.arrival.get(edge.head as usize).is_none_or(|cur| next < cur) {
                    self.arrival.set(edge.head as usize, next);
                    self.pred[edge.head as usize] = id;
                    self.heap.push(Reverse((Key(next), edge.head)));
                }
            }
        }
        None
    }

    fn path_to(&self, graph: &TdGraph<T>, s: NodeId, t: NodeId) -> Vec<EdgeId> {
        let mut path = Vec::new();
        let mut v = t;
        while v != s {
            let e = self.pred[v as usize];
            path.push(e);
            v = graph.edge(e).tail;
        }
        path.reverse();
        path
    }
}

/// Exact earliest arrival over the whole graph.
pub fn td_dijkstra<T: Time>(graph: &TdGraph<T>, q: EaQuery<T>) -> Option<EaResult<T>> {
    TdSearch::new(graph.node_count()).query(graph, q)
}

/// Exact earliest arrival within the subgraph of marked edges.
pub fn td_dijkstra_restricted<T: Time>(graph: &TdGraph<T>, marks: &EdgeMark, q: EaQuery<T>) -> Option<EaResult<T>> {
    TdSearch::new(graph.node_count()).query_restricted(graph, marks, q)
}

/// Arrival time after driving `path` from departure `tau`.
pub fn eval_path<T: Time>(graph: &TdGraph<T>, path: &[EdgeId], tau: T) -> Result<T> {
    let mut at = tau;
    let mut expected: Option<NodeId> = None;
    for &id in path {
        if id as usize >= graph.edge_count() {
            return Err(Error::MalformedEdge {
                edge: id as usize,
                message: "edge id out of range".into(),
            });
        }
        let edge = graph.edge(id);
        if let Some(node) = expected {
            if edge.tail != node {
                return Err(Error::NonContiguousPath {
                    edge: id as usize,
                    expected: node as usize,
                });
            }
        }
        at = at + edge.ttf.eval(at);
        expected = Some(edge.head);
    }
    Ok(at)
}
