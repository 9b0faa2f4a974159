use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::{ChIndex, Via};
use crate::network::{EdgeId, NodeId};
use crate::scalar::{Key, Time};
use crate::scratch::TimestampedVec;

/// Alternative-route search radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AltConfig {
    /// Meeting nodes on paths of at most `stretch` times the shortest
    /// distance are unpacked.
    pub stretch: f64,
}

impl Default for AltConfig {
    fn default() -> Self {
        Self { stretch: 1.2 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChPath<T> {
    pub distance: T,
    /// Original edge ids from source to target.
    pub edges: Vec<EdgeId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AltResult<T> {
    pub distance: T,
    pub meeting_nodes: usize,
    /// Sorted, without duplicates.
    pub edges: Vec<EdgeId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Direction {
    Forward,
    Backward,
}

struct Side<T> {
    dist: TimestampedVec<T>,
    /// `(predecessor, arc index local to the lower-ranked endpoint)`
    pred: Vec<(NodeId, u32)>,
    settled: TimestampedVec<()>,
    settled_order: Vec<NodeId>,
    heap: BinaryHeap<Reverse<(Key<T>, NodeId)>>,
}

impl<T: Time> Side<T> {
    fn new(n: usize) -> Self {
        Self {
            dist: TimestampedVec::new(n, T::zero()),
            pred: vec![(0, 0); n],
            settled: TimestampedVec::new(n, ()),
            settled_order: Vec::new(),
            heap: BinaryHeap::new(),
        }
    }

    fn init(&mut self, n: usize, source: NodeId) {
        self.dist.ensure_len(n, T::zero());
        self.settled.ensure_len(n, ());
        if self.pred.len() < n {
            self.pred.resize(n, (0, 0));
        }
        self.dist.reset();
        self.settled.reset();
        self.settled_order.clear();
        self.heap.clear();
        self.dist.set(source as usize, T::zero());
        self.pred[source as usize] = (source, u32::MAX);
        self.heap.push(Reverse((Key(T::zero()), source)));
    }

    /// Smallest tentative key still in the queue, skipping stale entries.
    fn top(&mut self) -> Option<T> {
        while let Some(&Reverse((Key(d), v))) = self.heap.peek() {
            if self.settled.contains(v as usize) || self.dist.get(v as usize).is_some_and(|cur| d > cur) {
                self.heap.pop();
            } else {
                return Some(d);
            }
        }
        None
    }

    fn settle_next(&mut self, ch: &ChIndex<T>, dir: Direction) -> Option<(NodeId, T)> {
        let Reverse((Key(d), v)) = self.heap.pop()?;
        self.settled.set(v as usize, ());
        self.settled_order.push(v);
        let arcs = match dir {
            Direction::Forward => ch.up_arcs(v),
            Direction::Backward => ch.down_arcs(v),
        };
        for (i, arc) in arcs.iter().enumerate() {
            let nd = d + arc.weight;
            if self.dist.get(arc.node as usize).is_none_or(|cur| nd < cur) {
                self.dist.set(arc.node as usize, nd);
                self.pred[arc.node as usize] = (v, i as u32);
                self.heap.push(Reverse((Key(nd), arc.node)));
            }
        }
        Some((v, d))
    }
}

/// Scratch space for bidirectional hierarchy searches.
///
/// One context serves any number of sequential queries on hierarchies with
/// at most as many nodes as it was sized for (it grows on demand).
pub struct ChQuery<T> {
    forward: Side<T>,
    backward: Side<T>,
    seen_arcs: TimestampedVec<()>,
    /// Tree nodes whose chain to the root was already unpacked; bit 0 for
    /// the forward tree, bit 1 for the backward tree.
    walked: TimestampedVec<u8>,
    meeting: Option<(NodeId, T)>,
    alt_limit: f64,
    source: NodeId,
    target: NodeId,
}

impl<T: Time> ChQuery<T> {
    pub fn new(ch: &ChIndex<T>) -> Self {
        let n = ch.node_count();
        Self {
            forward: Side::new(n),
            backward: Side::new(n),
            seen_arcs: TimestampedVec::new(ch.arc_count(), ()),
            walked: TimestampedVec::new(n, 0),
            meeting: None,
            alt_limit: 0.0,
            source: 0,
            target: 0,
        }
    }

    fn init(&mut self, ch: &ChIndex<T>, s: NodeId, t: NodeId) {
        let n = ch.node_count();
        self.forward.init(n, s);
        self.backward.init(n, t);
        self.meeting = None;
        self.source = s;
        self.target = t;
    }

    fn record_meeting(&mut self, v: NodeId, d: T, other: Direction) {
        let other = match other {
            Direction::Forward => &self.forward,
            Direction::Backward => &self.backward,
        };
        if let Some(o) = other.dist.get(v as usize) {
            let total = d + o;
            if self.meeting.is_none_or(|(_, best)| total < best) {
                self.meeting = Some((v, total));
            }
        }
    }

    /// Runs both searches until every node with key `<= radius(best)` is
    /// settled (or, when `inclusive` is false, `< radius(best)`).
    fn run(&mut self, ch: &ChIndex<T>, radius: impl Fn(T) -> f64, inclusive: bool) {
        loop {
            let bound = self.meeting.map(|(_, best)| radius(best));
            let open = |top: Option<T>| match (top, bound) {
                (None, _) => false,
                (Some(_), None) => true,
                (Some(k), Some(b)) => {
                    if inclusive {
                        k.to_f64() <= b
                    } else {
                        k.to_f64() < b
                    }
                }
            };
            let f = self.forward.top();
            let b = self.backward.top();
            let (go_f, go_b) = (open(f), open(b));
            let dir = match (go_f, go_b) {
                (false, false) => break,
                (true, false) => Direction::Forward,
                (false, true) => Direction::Backward,
                (true, true) => {
                    if f.unwrap().total_cmp(&b.unwrap()).is_le() {
                        Direction::Forward
                    } else {
                        Direction::Backward
                    }
                }
            };
            match dir {
                Direction::Forward => {
                    if let Some((v, d)) = self.forward.settle_next(ch, dir) {
                        self.record_meeting(v, d, Direction::Backward);
                    }
                }
                Direction::Backward => {
                    if let Some((v, d)) = self.backward.settle_next(ch, dir) {
                        self.record_meeting(v, d, Direction::Forward);
                    }
                }
            }
        }
    }

    /// Shortest distance from `s` to `t`, or `None` when unreachable.
    pub fn distance(&mut self, ch: &ChIndex<T>, s: NodeId, t: NodeId) -> Option<T> {
        self.init(ch, s, t);
        if s == t {
            self.meeting = Some((s, T::zero()));
            return Some(T::zero());
        }
        self.run(ch, |best| best.to_f64(), false);
        self.meeting.map(|(_, d)| d)
    }

    /// Unpacks the path of the last successful [`ChQuery::distance`] call.
    pub fn path(&self, ch: &ChIndex<T>) -> Vec<EdgeId> {
        let mut edges = Vec::new();
        if let Some((meet, _)) = self.meeting {
            self.unpack_via(ch, meet, &mut edges);
        }
        edges
    }

    pub fn query(&mut self, ch: &ChIndex<T>, s: NodeId, t: NodeId) -> Option<ChPath<T>> {
        let distance = self.distance(ch, s, t)?;
        Some(ChPath {
            distance,
            edges: self.path(ch),
        })
    }

    /// Hierarchy arcs of the last shortest path, source to target, not yet
    /// unpacked.
    pub fn arc_path(&self, ch: &ChIndex<T>) -> Vec<Via> {
        let Some((meet, _)) = self.meeting else {
            return Vec::new();
        };
        let mut chain = Vec::new();
        let mut v = meet;
        while v != self.source {
            let (p, arc) = self.forward.pred[v as usize];
            chain.push(ch.up_arcs(p)[arc as usize].via);
            v = p;
        }
        chain.reverse();
        let mut v = meet;
        while v != self.target {
            let (p, arc) = self.backward.pred[v as usize];
            chain.push(ch.down_arcs(p)[arc as usize].via);
            v = p;
        }
        chain
    }

    fn unpack_via(&self, ch: &ChIndex<T>, meet: NodeId, edges: &mut Vec<EdgeId>) {
        let mut up_chain = Vec::new();
        let mut v = meet;
        while v != self.source {
            let (p, arc) = self.forward.pred[v as usize];
            up_chain.push(ch.up_arcs(p)[arc as usize].via);
            v = p;
        }
        for via in up_chain.into_iter().rev() {
            ch.unpack(via, edges);
        }
        let mut v = meet;
        while v != self.target {
            let (p, arc) = self.backward.pred[v as usize];
            ch.unpack(ch.down_arcs(p)[arc as usize].via, edges);
            v = p;
        }
    }

    /// Runs both searches far enough to find every meeting node on a via
    /// path of at most `stretch` times the shortest distance. Returns the
    /// shortest distance, or `None` when unreachable.
    pub fn search_alternatives(&mut self, ch: &ChIndex<T>, s: NodeId, t: NodeId, cfg: AltConfig) -> Option<T> {
        assert!(cfg.stretch >= 1.0, "stretch must be at least 1");
        self.init(ch, s, t);
        if s == t {
            self.meeting = Some((s, T::zero()));
            self.alt_limit = 0.0;
            return Some(T::zero());
        }
        let stretch = cfg.stretch;
        self.run(ch, |best| stretch * best.to_f64(), true);
        let (_, best) = self.meeting?;
        self.alt_limit = stretch * best.to_f64();
        Some(best)
    }

    /// Visits the original edges of every via path found by the last
    /// [`ChQuery::search_alternatives`] call, each edge at most once.
    /// Returns the number of meeting nodes.
    pub fn unpack_alternatives(&mut self, ch: &ChIndex<T>, mut visit: impl FnMut(EdgeId)) -> usize {
        if self.meeting.is_none() {
            return 0;
        }
        let (s, t) = (self.source, self.target);
        if s == t {
            return 1;
        }
        self.seen_arcs.ensure_len(ch.arc_count(), ());
        self.seen_arcs.reset();
        self.walked.ensure_len(ch.node_count(), 0);
        self.walked.reset();
        let mut meeting_nodes = 0;
        for i in 0..self.forward.settled_order.len() {
            let v = self.forward.settled_order[i];
            if !self.backward.settled.contains(v as usize) {
                continue;
            }
            let total = self.forward.dist.get(v as usize).unwrap() + self.backward.dist.get(v as usize).unwrap();
            if total.to_f64() > self.alt_limit {
                continue;
            }
            meeting_nodes += 1;
            // Search trees share prefixes; stop at the first node whose chain
            // is already unpacked.
            for (side, bit, root) in [(&self.forward, 1u8, s), (&self.backward, 2u8, t)] {
                let mut x = v;
                while x != root {
                    let flags = self.walked.get(x as usize).unwrap_or(0);
                    if flags & bit != 0 {
                        break;
                    }
                    self.walked.set(x as usize, flags | bit);
                    let (p, arc) = side.pred[x as usize];
                    let via = if bit == 1 {
                        ch.up_arcs(p)[arc as usize].via
                    } else {
                        ch.down_arcs(p)[arc as usize].via
                    };
                    ch.unpack_unordered(via, &mut self.seen_arcs, &mut visit);
                    x = p;
                }
            }
        }
        meeting_nodes
    }

    pub fn alternatives(&mut self, ch: &ChIndex<T>, s: NodeId, t: NodeId, cfg: AltConfig) -> Option<AltResult<T>> {
        let distance = self.search_alternatives(ch, s, t, cfg)?;
        let mut edges = Vec::new();
        let meeting_nodes = self.unpack_alternatives(ch, |e| edges.push(e));
        edges.sort_unstable();
        edges.dedup();
        Some(AltResult {
            distance,
            meeting_nodes,
            edges,
        })
    }
}

impl<T: Time> ChIndex<T> {
    /// One-off query with fresh scratch space.
    pub fn query(&self, s: NodeId, t: NodeId) -> Option<ChPath<T>> {
        ChQuery::new(self).query(self, s, t)
    }

    pub fn alternatives(&self, s: NodeId, t: NodeId, cfg: AltConfig) -> Option<AltResult<T>> {
        ChQuery::new(self).alternatives(self, s, t, cfg)
    }
}
