//! Contraction hierarchies over a single scalar weighting.
//!
//! One hierarchy is built per time window and one for freeflow weights. Each
//! shortcut remembers its middle node and the two arcs it bridges, so paths
//! unpack in time linear in their length.

mod cache;
mod contraction;
pub mod dijkstra;
mod query;

pub use cache::{load_cached, save_cache, CACHE_VERSION};
pub use query::{AltConfig, AltResult, ChPath, ChQuery};

use sha2::{Digest, Sha256};

use crate::network::{EdgeId, NodeId, TdGraph};
use crate::scalar::Time;
use crate::ttf::TravelTimeFunction;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarEdge<T> {
    pub tail: NodeId,
    pub head: NodeId,
    pub weight: T,
    /// Id of the time-dependent edge this weight was derived from.
    pub original: EdgeId,
}

/// Time-independent view of a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarGraph<T> {
    node_count: usize,
    edges: Vec<ScalarEdge<T>>,
}

impl<T: Time> ScalarGraph<T> {
    /// # Panics
    /// On non-positive weights or endpoints out of range.
    pub fn new(node_count: usize, edges: Vec<ScalarEdge<T>>) -> Self {
        for e in &edges {
            assert!(e.weight > T::zero(), "scalar weights must be positive");
            assert!((e.tail as usize) < node_count && (e.head as usize) < node_count);
        }
        Self { node_count, edges }
    }

    /// One scalar edge per time-dependent edge, weighted by `weight`.
    pub fn from_td(graph: &TdGraph<T>, mut weight: impl FnMut(&TravelTimeFunction<T>) -> T) -> Self {
        let edges = graph
            .edges()
            .iter()
            .enumerate()
            .map(|(id, e)| ScalarEdge {
                tail: e.tail,
                head: e.head,
                weight: weight(&e.ttf),
                original: id as EdgeId,
            })
            .collect();
        Self::new(graph.node_count(), edges)
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[ScalarEdge<T>] {
        &self.edges
    }

    /// Outgoing adjacency as CSR: `(first_out, edge indices)`.
    pub fn out_csr(&self) -> (Vec<u32>, Vec<u32>) {
        let mut first = vec![0u32; self.node_count + 1];
        for e in &self.edges {
            first[e.tail as usize + 1] += 1;
        }
        for v in 0..self.node_count {
            first[v + 1] += first[v];
        }
        let mut fill = first.clone();
        let mut ids = vec![0u32; self.edges.len()];
        for (i, e) in self.edges.iter().enumerate() {
            ids[fill[e.tail as usize] as usize] = i as u32;
            fill[e.tail as usize] += 1;
        }
        (first, ids)
    }

    /// SHA-256 over node count and every edge.
    pub fn content_hash(&self) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update((self.node_count as u64).to_le_bytes());
        h.update((self.edges.len() as u64).to_le_bytes());
        for e in &self.edges {
            h.update(e.tail.to_le_bytes());
            h.update(e.head.to_le_bytes());
            h.update(e.weight.to_f64().to_bits().to_le_bytes());
            h.update(e.original.to_le_bytes());
        }
        h.finalize().into()
    }
}

/// How a hierarchy arc maps back onto the input graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Via {
    Original(EdgeId),
    /// `tail -> middle -> head`; the halves are `down[middle][down_arc]` and
    /// `up[middle][up_arc]` (indices local to the middle node).
    Shortcut { middle: NodeId, down_arc: u32, up_arc: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChArc<T> {
    /// Higher-ranked endpoint.
    pub node: NodeId,
    pub weight: T,
    pub via: Via,
}

/// Arcs grouped by their lower-ranked endpoint.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct ArcLists<T> {
    pub first: Vec<u32>,
    pub arcs: Vec<ChArc<T>>,
}

impl<T> ArcLists<T> {
    pub fn of(&self, v: NodeId) -> &[ChArc<T>] {
        &self.arcs[self.first[v as usize] as usize..self.first[v as usize + 1] as usize]
    }

    pub fn global(&self, v: NodeId, local: u32) -> u32 {
        self.first[v as usize] + local
    }
}

/// A built hierarchy.
///
/// `up[v]` holds arcs `v -> x` and `down[v]` holds arcs `x -> v`, in both
/// cases with `rank[x] > rank[v]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChIndex<T> {
    rank: Vec<u32>,
    up: ArcLists<T>,
    down: ArcLists<T>,
}

impl<T: Time> ChIndex<T> {
    pub fn build(graph: &ScalarGraph<T>) -> Self {
        contraction::contract(graph)
    }

    pub fn node_count(&self) -> usize {
        self.rank.len()
    }

    pub fn rank(&self, v: NodeId) -> u32 {
        self.rank[v as usize]
    }

    pub fn up_arcs(&self, v: NodeId) -> &[ChArc<T>] {
        self.up.of(v)
    }

    pub fn down_arcs(&self, v: NodeId) -> &[ChArc<T>] {
        self.down.of(v)
    }

    pub fn arc_count(&self) -> usize {
        self.up.arcs.len() + self.down.arcs.len()
    }

    pub fn shortcut_count(&self) -> usize {
        self.up
            .arcs
            .iter()
            .chain(&self.down.arcs)
            .filter(|a| matches!(a.via, Via::Shortcut { .. }))
            .count()
    }

    /// Appends the original edges of `tail -> arc.node` (or `arc.node -> head`
    /// for down arcs) to `out`, in path order.
    pub(crate) fn unpack(&self, via: Via, out: &mut Vec<EdgeId>) {
        let mut stack = vec![via];
        while let Some(via) = stack.pop() {
            match via {
                Via::Original(e) => out.push(e),
                Via::Shortcut { middle, down_arc, up_arc } => {
                    // first half runs tail -> middle, so it must come out first
                    stack.push(self.up.of(middle)[up_arc as usize].via);
                    stack.push(self.down.of(middle)[down_arc as usize].via);
                }
            }
        }
    }

    /// Visits the original edges below a shortcut, skipping arcs already seen
    /// in this query. Arc ids: `up` arcs first, then `down` arcs.
    pub(crate) fn unpack_unordered(
        &self,
        via: Via,
        seen: &mut crate::scratch::TimestampedVec<()>,
        visit: &mut impl FnMut(EdgeId),
    ) {
        let mut stack = vec![via];
        let offset = self.up.arcs.len() as u32;
        while let Some(via) = stack.pop() {
            match via {
                Via::Original(e) => visit(e),
                Via::Shortcut { middle, down_arc, up_arc } => {
                    let first = offset + self.down.global(middle, down_arc);
                    let second = self.up.global(middle, up_arc);
                    for (id, arc_via) in [
                        (first, self.down.of(middle)[down_arc as usize].via),
                        (second, self.up.of(middle)[up_arc as usize].via),
                    ] {
                        if !seen.contains(id as usize) {
                            seen.set(id as usize, ());
                            stack.push(arc_via);
                        }
                    }
                }
            }
        }
    }
}
