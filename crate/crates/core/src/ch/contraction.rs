use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::{ArcLists, ChArc, ChIndex, ScalarGraph, Via};
use crate::network::NodeId;
use crate::scalar::{Key, Time};
use crate::scratch::TimestampedVec;

/// Settled-node budget of one witness search during contraction.
const WITNESS_SETTLE_LIMIT: usize = 400;
/// Smaller budget used when only estimating priorities.
const ESTIMATE_SETTLE_LIMIT: usize = 10;

struct DynamicGraph<T> {
    out: Vec<Vec<ChArc<T>>>,
    inc: Vec<Vec<ChArc<T>>>,
}

impl<T: Time> DynamicGraph<T> {
    /// Adds `tail -> head` or lowers the weight of the existing arc.
    fn insert_or_improve(&mut self, tail: NodeId, head: NodeId, weight: T, via: Via) {
        if let Some(arc) = self.out[tail as usize].iter_mut().find(|a| a.node == head) {
            if weight < arc.weight {
                arc.weight = weight;
                arc.via = via;
                let back = self.inc[head as usize]
                    .iter_mut()
                    .find(|a| a.node == tail)
                    .expect("adjacency lists are symmetric");
                back.weight = weight;
                back.via = via;
            }
            return;
        }
        self.out[tail as usize].push(ChArc { node: head, weight, via });
        self.inc[head as usize].push(ChArc { node: tail, weight, via });
    }
}

struct Witness<T> {
    dist: TimestampedVec<T>,
    target: TimestampedVec<()>,
    heap: BinaryHeap<Reverse<(Key<T>, NodeId)>>,
}

impl<T: Time> Witness<T> {
    /// Bounded Dijkstra from `source` that never enters `skip`. Stops once
    /// `targets` nodes marked in `self.target` are settled.
    fn search(&mut self, graph: &DynamicGraph<T>, source: NodeId, skip: NodeId, bound: T, mut targets: usize, limit: usize) {
        self.dist.reset();
        self.heap.clear();
        self.dist.set(source as usize, T::zero());
        self.heap.push(Reverse((Key(T::zero()), source)));
        let mut settled = 0;
        while let Some(Reverse((Key(d), v))) = self.heap.pop() {
            if self.dist.get(v as usize).is_some_and(|cur| d > cur) {
                continue;
            }
            settled += 1;
            if d > bound || settled > limit {
                break;
            }
            if self.target.contains(v as usize) {
                targets -= 1;
                if targets == 0 {
                    break;
                }
            }
            for arc in &graph.out[v as usize] {
                if arc.node == skip {
                    continue;
                }
                let nd = d + arc.weight;
                if self.dist.get(arc.node as usize).is_none_or(|cur| nd < cur) {
                    self.dist.set(arc.node as usize, nd);
                    self.heap.push(Reverse((Key(nd), arc.node)));
                }
            }
        }
    }

    /// Shortcuts needed to contract `v`: `(tail, head, weight, via)`.
    fn shortcuts(&mut self, graph: &DynamicGraph<T>, v: NodeId, limit: usize) -> Vec<(NodeId, NodeId, T, Via)> {
        let mut result = Vec::new();
        let outgoing = &graph.out[v as usize];
        let Some(max_out) = outgoing.iter().map(|a| a.weight).reduce(T::max_of) else {
            return result;
        };
        self.target.reset();
        for a in outgoing {
            self.target.set(a.node as usize, ());
        }
        for (i, into) in graph.inc[v as usize].iter().enumerate() {
            let u = into.node;
            let targets = outgoing.len() - usize::from(self.target.contains(u as usize));
            if targets == 0 {
                continue;
            }
            self.search(graph, u, v, into.weight + max_out, targets, limit);
            for (j, out) in outgoing.iter().enumerate() {
                let w = out.node;
                if w == u {
                    continue;
                }
                let via_v = into.weight + out.weight;
                if self.dist.get(w as usize).is_none_or(|d| d > via_v) {
                    result.push((
                        u,
                        w,
                        via_v,
                        Via::Shortcut {
                            middle: v,
                            down_arc: i as u32,
                            up_arc: j as u32,
                        },
                    ));
                }
            }
        }
        result
    }
}

/// Edge difference plus number of already contracted neighbours.
fn priority<T: Time>(graph: &DynamicGraph<T>, witness: &mut Witness<T>, contracted_neighbors: &[u32], v: NodeId) -> i64 {
    let removed = graph.out[v as usize].len() + graph.inc[v as usize].len();
    let added = witness.shortcuts(graph, v, ESTIMATE_SETTLE_LIMIT).len();
    added as i64 - removed as i64 + i64::from(contracted_neighbors[v as usize])
}

pub(super) fn contract<T: Time>(input: &ScalarGraph<T>) -> ChIndex<T> {
    let n = input.node_count();
    let mut graph = DynamicGraph {
        out: vec![Vec::new(); n],
        inc: vec![Vec::new(); n],
    };
    for e in input.edges() {
        if e.tail != e.head {
            graph.insert_or_improve(e.tail, e.head, e.weight, Via::Original(e.original));
        }
    }

    let mut witness = Witness {
        dist: TimestampedVec::new(n, T::zero()),
        target: TimestampedVec::new(n, ()),
        heap: BinaryHeap::new(),
    };
    let mut contracted_neighbors = vec![0u32; n];
    let mut current = vec![0i64; n];
    let mut contracted = vec![false; n];
    let mut queue = BinaryHeap::with_capacity(n);
    for v in 0..n as NodeId {
        current[v as usize] = priority(&graph, &mut witness, &contracted_neighbors, v);
        queue.push(Reverse((current[v as usize], v)));
    }

    let mut rank = vec![0u32; n];
    let mut up_lists: Vec<Vec<ChArc<T>>> = vec![Vec::new(); n];
    let mut down_lists: Vec<Vec<ChArc<T>>> = vec![Vec::new(); n];
    let mut next_rank = 0u32;

    while let Some(Reverse((p, v))) = queue.pop() {
        if contracted[v as usize] || p != current[v as usize] {
            continue;
        }
        // lazy update: re-evaluate before committing
        let fresh = priority(&graph, &mut witness, &contracted_neighbors, v);
        if fresh != p {
            current[v as usize] = fresh;
            if let Some(Reverse(top)) = queue.peek() {
                if (fresh, v) > *top {
                    queue.push(Reverse((fresh, v)));
                    continue;
                }
            }
        }

        let shortcuts = witness.shortcuts(&graph, v, WITNESS_SETTLE_LIMIT);
        contracted[v as usize] = true;
        rank[v as usize] = next_rank;
        next_rank += 1;

        let outgoing = std::mem::take(&mut graph.out[v as usize]);
        let incoming = std::mem::take(&mut graph.inc[v as usize]);
        for a in &outgoing {
            graph.inc[a.node as usize].retain(|b| b.node != v);
        }
        for a in &incoming {
            graph.out[a.node as usize].retain(|b| b.node != v);
        }
        for (tail, head, weight, via) in shortcuts {
            graph.insert_or_improve(tail, head, weight, via);
        }

        let mut neighbors: Vec<NodeId> = outgoing.iter().chain(&incoming).map(|a| a.node).collect();
        neighbors.sort_unstable();
        neighbors.dedup();
        up_lists[v as usize] = outgoing;
        down_lists[v as usize] = incoming;
        for x in neighbors {
            contracted_neighbors[x as usize] += 1;
            let p = priority(&graph, &mut witness, &contracted_neighbors, x);
            if p != current[x as usize] {
                current[x as usize] = p;
                queue.push(Reverse((p, x)));
            }
        }
    }
    debug_assert_eq!(next_rank as usize, n);

    ChIndex {
        rank,
        up: flatten(up_lists),
        down: flatten(down_lists),
    }
}

fn flatten<T>(lists: Vec<Vec<ChArc<T>>>) -> ArcLists<T> {
    let mut first = Vec::with_capacity(lists.len() + 1);
    first.push(0u32);
    let mut arcs = Vec::with_capacity(lists.iter().map(Vec::len).sum());
    for list in lists {
        arcs.extend(list);
        first.push(arcs.len() as u32);
    }
    ArcLists { first, arcs }
}
