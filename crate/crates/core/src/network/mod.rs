//! Time-dependent road graph, the text instance format and the synthetic
//! instance generator.

mod format;
mod generate;

pub use format::{load, parse, store, write};
pub use generate::{generate, GeneratorConfig, TdPlacement};

use crate::error::{Error, Result};
use crate::scalar::Time;
use crate::ttf::TravelTimeFunction;

pub type NodeId = u32;
pub type EdgeId = u32;

#[derive(Debug, Clone, PartialEq)]
pub struct TdEdge<T> {
    pub tail: NodeId,
    pub head: NodeId,
    pub ttf: TravelTimeFunction<T>,
}

/// Directed graph with one travel-time function per edge.
///
/// Edges are stored grouped by tail; an edge's id is its position in that order.
#[derive(Debug, Clone, PartialEq)]
pub struct TdGraph<T> {
    node_count: usize,
    first_out: Vec<u32>,
    edges: Vec<TdEdge<T>>,
}

impl<T: Time> TdGraph<T> {
    /// Groups `edges` by tail (stable) and validates them.
    pub fn new(node_count: usize, mut edges: Vec<TdEdge<T>>) -> Result<Self> {
        if node_count > u32::MAX as usize || edges.len() > u32::MAX as usize {
            return Err(Error::Config("graph too large for 32-bit ids".into()));
        }
        for (i, e) in edges.iter().enumerate() {
            for node in [e.tail, e.head] {
                if node as usize >= node_count {
                    return Err(Error::MalformedEdge {
                        edge: i,
                        message: format!("node {node} out of range (n = {node_count})"),
                    });
                }
            }
            if e.tail == e.head {
                return Err(Error::MalformedEdge {
                    edge: i,
                    message: format!("self-loop at node {}", e.tail),
                });
            }
        }
        edges.sort_by_key(|e| e.tail);
        let mut first_out = vec![0u32; node_count + 1];
        for e in &edges {
            first_out[e.tail as usize + 1] += 1;
        }
        for v in 0..node_count {
            first_out[v + 1] += first_out[v];
        }
        Ok(Self {
            node_count,
            first_out,
            edges,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[TdEdge<T>] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &TdEdge<T> {
        &self.edges[id as usize]
    }

    /// Edge ids leaving `node`.
    pub fn out_edge_ids(&self, node: NodeId) -> std::ops::Range<EdgeId> {
        self.first_out[node as usize]..self.first_out[node as usize + 1]
    }

    pub fn out_edges(&self, node: NodeId) -> impl Iterator<Item = (EdgeId, &TdEdge<T>)> {
        self.out_edge_ids(node).map(move |id| (id, &self.edges[id as usize]))
    }

    pub fn check_node(&self, node: NodeId) -> Result<()> {
        if (node as usize) < self.node_count {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange {
                node: node as usize,
                count: self.node_count,
            })
        }
    }

    /// Same graph in another scalar type.
    pub fn convert<U: Time>(&self) -> Result<TdGraph<U>> {
        let edges = self
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| {
                Ok(TdEdge {
                    tail: e.tail,
                    head: e.head,
                    ttf: e.ttf.convert().map_err(|source| Error::InvalidEdge {
                        edge: i,
                        tail: e.tail as usize,
                        head: e.head as usize,
                        source,
                    })?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        TdGraph::new(self.node_count, edges)
    }

    pub fn stats(&self) -> InstanceStats {
        let td: Vec<_> = self.edges.iter().filter(|e| e.ttf.is_time_dependent()).collect();
        let breakpoints: usize = td.iter().map(|e| e.ttf.points().len()).sum();
        InstanceStats {
            node_count: self.node_count,
            edge_count: self.edges.len(),
            td_edge_count: td.len(),
            td_edge_fraction: if self.edges.is_empty() {
                0.0
            } else {
                td.len() as f64 / self.edges.len() as f64
            },
            avg_breakpoints_per_td_edge: if td.is_empty() {
                0.0
            } else {
                breakpoints as f64 / td.len() as f64
            },
        }
    }

    /// Nodes of the largest strongly connected component, ascending.
    pub fn largest_scc(&self) -> Vec<NodeId> {
        let component = strongly_connected_components(self.node_count, |v| {
            self.out_edges(v).map(|(_, e)| e.head)
        });
        let count = component.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
        let mut sizes = vec![0usize; count];
        for &c in &component {
            sizes[c as usize] += 1;
        }
        // first component of maximum size wins ties
        let Some(best) = (0..count).max_by_key(|&c| (sizes[c], std::cmp::Reverse(c))) else {
            return Vec::new();
        };
        (0..self.node_count as NodeId)
            .filter(|&v| component[v as usize] as usize == best)
            .collect()
    }
}

/// Size figures of an instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceStats {
    pub node_count: usize,
    pub edge_count: usize,
    pub td_edge_count: usize,
    pub td_edge_fraction: f64,
    pub avg_breakpoints_per_td_edge: f64,
}

/// Iterative Tarjan. Returns a component id per node.
pub(crate) fn strongly_connected_components<I>(
    node_count: usize,
    successors: impl Fn(NodeId) -> I,
) -> Vec<u32>
where
    I: Iterator<Item = NodeId>,
{
    const UNVISITED: u32 = u32::MAX;
    let mut index = vec![UNVISITED; node_count];
    let mut low = vec![0u32; node_count];
    let mut on_stack = vec![false; node_count];
    let mut component = vec![UNVISITED; node_count];
    let mut stack = Vec::new();
    let mut next_index = 0u32;
    let mut next_component = 0u32;

    for root in 0..node_count as NodeId {
        if index[root as usize] != UNVISITED {
            continue;
        }
        let mut call: Vec<(NodeId, Vec<NodeId>, usize)> = Vec::new();
        index[root as usize] = next_index;
        low[root as usize] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root as usize] = true;
        call.push((root, successors(root).collect(), 0));

        while let Some((v, succ, pos)) = call.last_mut() {
            let v = *v;
            if *pos < succ.len() {
                let w = succ[*pos];
                *pos += 1;
                if index[w as usize] == UNVISITED {
                    index[w as usize] = next_index;
                    low[w as usize] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w as usize] = true;
                    call.push((w, successors(w).collect(), 0));
                } else if on_stack[w as usize] {
                    low[v as usize] = low[v as usize].min(index[w as usize]);
                }
                continue;
            }
            call.pop();
            if let Some((parent, _, _)) = call.last() {
                low[*parent as usize] = low[*parent as usize].min(low[v as usize]);
            }
            if low[v as usize] == index[v as usize] {
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w as usize] = false;
                    component[w as usize] = next_component;
                    if w == v {
                        break;
                    }
                }
                next_component += 1;
            }
        }
    }
    component
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ttf::BreakPoint;

    fn constant(tail: NodeId, head: NodeId, w: i64) -> TdEdge<i64> {
        TdEdge {
            tail,
            head,
            ttf: TravelTimeFunction::constant(w),
        }
    }

    #[test]
    fn edges_are_grouped_by_tail() {
        let g = TdGraph::new(3, vec![constant(2, 0, 1), constant(0, 1, 2), constant(2, 1, 3), constant(0, 2, 4)])
            .unwrap();
        let tails: Vec<_> = g.edges().iter().map(|e| e.tail).collect();
        assert_eq!(tails, vec![0, 0, 2, 2]);
        // stable within a tail
        assert_eq!(g.edge(0).head, 1);
        assert_eq!(g.edge(1).head, 2);
        assert_eq!(g.out_edge_ids(1), 2..2);
        assert_eq!(g.out_edge_ids(2), 2..4);
    }

    #[test]
    fn self_loops_and_bad_nodes_are_rejected() {
        assert!(TdGraph::new(2, vec![constant(1, 1, 5)]).is_err());
        assert!(TdGraph::new(2, vec![constant(0, 2, 5)]).is_err());
    }

    #[test]
    fn stats_count_td_edges() {
        let mut edges: Vec<_> = (0..9).map(|i| constant(i % 3, (i + 1) % 3, 10)).collect();
        assert_eq!(TdGraph::new(3, edges.clone()).unwrap().stats().td_edge_fraction, 0.0);
        edges.push(TdEdge {
            tail: 0,
            head: 2,
            ttf: TravelTimeFunction::new(vec![BreakPoint::new(0, 10), BreakPoint::new(10, 20), BreakPoint::new(20, 10)])
                .unwrap(),
        });
        let s = TdGraph::new(3, edges).unwrap().stats();
        assert_eq!(s.td_edge_count, 1);
        assert!((s.td_edge_fraction - 0.1).abs() < 1e-12);
        assert_eq!(s.avg_breakpoints_per_td_edge, 3.0);
    }

    #[test]
    fn largest_scc_ignores_dangling_nodes() {
        // 0 <-> 1 <-> 2, 3 -> 0, 4 isolated
        let g = TdGraph::new(
            5,
            vec![constant(0, 1, 1), constant(1, 0, 1), constant(1, 2, 1), constant(2, 1, 1), constant(3, 0, 1)],
        )
        .unwrap();
        assert_eq!(g.largest_scc(), vec![0, 1, 2]);
        assert!(TdGraph::<i64>::new(0, vec![]).unwrap().largest_scc().is_empty());
    }
}
