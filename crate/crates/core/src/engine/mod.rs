//! Freeflow heuristic, TD-S, TD-S+A and sampled profiles.
//!
//! Offline, every time window turns the time-dependent graph into a scalar
//! graph of window-average travel times, and each gets its own contraction
//! hierarchy. A query marks the edges of each window's shortest path (or of
//! all near-shortest via paths) and runs an exact time-dependent search on
//! the marked subgraph only.

mod profile;

pub use profile::{error_bound, exact_profile, Profile, ProfileErrorBound};

use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::ch::{AltConfig, ChIndex, ChQuery, ScalarGraph, Via};
use crate::error::{Error, Result};
use crate::network::{EdgeId, NodeId, TdGraph};
use crate::scalar::Time;
use crate::tdsearch::{eval_path, EaQuery, EaResult, EdgeMark, TdSearch};
use crate::ttf::TimeWindow;

/// Scalar graph of window averages.
pub fn window_graph<T: Time>(graph: &TdGraph<T>, window: &TimeWindow<T>) -> ScalarGraph<T> {
    ScalarGraph::from_td(graph, |f| f.average_over_window(window))
}

/// Scalar graph of per-edge minimum travel times.
pub fn freeflow_graph<T: Time>(graph: &TdGraph<T>) -> ScalarGraph<T> {
    ScalarGraph::from_td(graph, |f| f.freeflow())
}

/// Preprocessed data: one hierarchy per window plus one for freeflow weights.
pub struct TdsIndex<T> {
    graph: Arc<TdGraph<T>>,
    windows: Vec<TimeWindow<T>>,
    window_ch: Vec<ChIndex<T>>,
    freeflow_ch: ChIndex<T>,
}

impl<T: Time> TdsIndex<T> {
    pub fn build(graph: Arc<TdGraph<T>>, windows: Vec<TimeWindow<T>>) -> Result<Self> {
        Self::build_with(graph, windows, |_, g| ChIndex::build(g))
    }

    /// Like [`TdsIndex::build`] with a custom hierarchy source (e.g. a cache).
    /// `slot` is the window index, or `None` for the freeflow hierarchy.
    pub fn build_with(
        graph: Arc<TdGraph<T>>,
        windows: Vec<TimeWindow<T>>,
        make: impl Fn(Option<usize>, &ScalarGraph<T>) -> ChIndex<T> + Sync,
    ) -> Result<Self> {
        if windows.is_empty() {
            return Err(Error::Config("at least one time window is required".into()));
        }
        if windows.len() > 64 {
            return Err(Error::Config("at most 64 time windows are supported".into()));
        }
        let slots: Vec<Option<usize>> = (0..windows.len()).map(Some).chain([None]).collect();
        let mut built: Vec<ChIndex<T>> = slots
            .par_iter()
            .map(|&slot| {
                let scalar = match slot {
                    Some(i) => window_graph(&graph, &windows[i]),
                    None => freeflow_graph(&graph),
                };
                make(slot, &scalar)
            })
            .collect();
        let freeflow_ch = built.pop().expect("freeflow slot");
        Ok(Self {
            graph,
            windows,
            window_ch: built,
            freeflow_ch,
        })
    }

    pub fn graph(&self) -> &TdGraph<T> {
        &self.graph
    }

    pub fn shared_graph(&self) -> Arc<TdGraph<T>> {
        Arc::clone(&self.graph)
    }

    pub fn windows(&self) -> &[TimeWindow<T>] {
        &self.windows
    }

    pub fn window_hierarchy(&self, i: usize) -> &ChIndex<T> {
        &self.window_ch[i]
    }

    pub fn freeflow_hierarchy(&self) -> &ChIndex<T> {
        &self.freeflow_ch
    }

    pub fn context(&self) -> QueryContext<T> {
        QueryContext {
            window_queries: self.window_ch.iter().map(ChQuery::new).collect(),
            freeflow_query: ChQuery::new(&self.freeflow_ch),
            search: TdSearch::new(self.graph.node_count()),
            marks: EdgeMark::new(self.graph.edge_count()),
        }
    }

    fn check(&self, q: &EaQuery<T>) -> Result<()> {
        self.graph.check_node(q.s)?;
        self.graph.check_node(q.t)
    }

    /// Freeflow shortest path, evaluated time-dependently.
    pub fn query_freeflow(&self, ctx: &mut QueryContext<T>, q: EaQuery<T>) -> Result<Option<EaResult<T>>> {
        self.check(&q)?;
        let Some(path) = ctx.freeflow_query.query(&self.freeflow_ch, q.s, q.t) else {
            return Ok(None);
        };
        let arrival = eval_path(&self.graph, &path.edges, q.tau)?;
        Ok(Some(EaResult {
            arrival,
            path: path.edges,
        }))
    }

    pub fn query_tds(&self, ctx: &mut QueryContext<T>, q: EaQuery<T>) -> Result<Option<EaResult<T>>> {
        self.query_with(ctx, q, &TdsOptions::default())
    }

    pub fn query_tds_a(&self, ctx: &mut QueryContext<T>, q: EaQuery<T>, alt: AltConfig) -> Result<Option<EaResult<T>>> {
        self.query_with(
            ctx,
            q,
            &TdsOptions {
                alternatives: Some(alt),
                ..TdsOptions::default()
            },
        )
    }

    /// Marks the edges for `s -> t` in `ctx.marks`. Returns false when no
    /// active window connects the two nodes.
    pub fn mark(&self, ctx: &mut QueryContext<T>, s: NodeId, t: NodeId, opts: &TdsOptions) -> bool {
        ctx.marks.clear();
        let marks = &mut ctx.marks;
        let mut reachable = false;
        for (i, ch) in self.window_ch.iter().enumerate() {
            if !opts.windows.contains(i) {
                continue;
            }
            let query = &mut ctx.window_queries[i];
            match opts.alternatives {
                None => {
                    if query.distance(ch, s, t).is_some() {
                        reachable = true;
                        for e in query.path(ch) {
                            marks.mark(e);
                        }
                    }
                }
                Some(cfg) => {
                    if query.search_alternatives(ch, s, t, cfg).is_some() {
                        reachable = true;
                        query.unpack_alternatives(ch, |e| {
                            marks.mark(e);
                        });
                    }
                }
            }
        }
        if opts.include_freeflow && ctx.freeflow_query.distance(&self.freeflow_ch, s, t).is_some() {
            reachable = true;
            for e in ctx.freeflow_query.path(&self.freeflow_ch) {
                marks.mark(e);
            }
        }
        reachable
    }

    /// TD-S with explicit options. `None` when no active window connects
    /// `s` and `t`.
    pub fn query_with(&self, ctx: &mut QueryContext<T>, q: EaQuery<T>, opts: &TdsOptions) -> Result<Option<EaResult<T>>> {
        self.check(&q)?;
        if !self.mark(ctx, q.s, q.t, opts) {
            return Ok(None);
        }
        Ok(ctx.search.query_restricted(&self.graph, &ctx.marks, q))
    }

    /// Each active window's shortest path evaluated at `q.tau`; `None`
    /// entries for inactive or disconnected windows.
    pub fn window_paths(&self, ctx: &mut QueryContext<T>, q: EaQuery<T>, windows: WindowSet) -> Result<Vec<Option<EaResult<T>>>> {
        self.check(&q)?;
        let mut out = Vec::with_capacity(self.window_ch.len());
        for (i, ch) in self.window_ch.iter().enumerate() {
            if !windows.contains(i) {
                out.push(None);
                continue;
            }
            out.push(match ctx.window_queries[i].query(ch, q.s, q.t) {
                Some(p) => Some(EaResult {
                    arrival: eval_path(&self.graph, &p.edges, q.tau)?,
                    path: p.edges,
                }),
                None => None,
            });
        }
        Ok(out)
    }

    /// The best single window path, i.e. what TD-S would return if it
    /// picked one window path instead of searching their union.
    pub fn best_window_path(&self, ctx: &mut QueryContext<T>, q: EaQuery<T>) -> Result<Option<EaResult<T>>> {
        let paths = self.window_paths(ctx, q, WindowSet::all())?;
        Ok(paths
            .into_iter()
            .flatten()
            .reduce(|a, b| if b.arrival < a.arrival { b } else { a }))
    }

    /// TD-S with distance search, path extraction and the time-dependent
    /// search run as separate timed phases. Slower than [`TdsIndex::query_with`]
    /// because intermediate results are stored between phases.
    pub fn query_breakdown(
        &self,
        ctx: &mut QueryContext<T>,
        q: EaQuery<T>,
        opts: &TdsOptions,
    ) -> Result<(Option<EaResult<T>>, PhaseTimes)> {
        self.check(&q)?;
        let mut times = PhaseTimes::default();

        let start = Instant::now();
        let mut found = vec![false; self.window_ch.len()];
        let mut chains: Vec<Vec<Via>> = vec![Vec::new(); self.window_ch.len()];
        for (i, ch) in self.window_ch.iter().enumerate() {
            if !opts.windows.contains(i) {
                continue;
            }
            let query = &mut ctx.window_queries[i];
            found[i] = match opts.alternatives {
                None => {
                    let hit = query.distance(ch, q.s, q.t).is_some();
                    if hit {
                        chains[i] = query.arc_path(ch);
                    }
                    hit
                }
                Some(cfg) => query.search_alternatives(ch, q.s, q.t, cfg).is_some(),
            };
        }
        times.ch_distance = start.elapsed();

        let start = Instant::now();
        ctx.marks.clear();
        let mut scratch = Vec::new();
        for (i, ch) in self.window_ch.iter().enumerate() {
            if !found[i] {
                continue;
            }
            match opts.alternatives {
                None => {
                    for &via in &chains[i] {
                        scratch.clear();
                        ch.unpack(via, &mut scratch);
                        for &e in &scratch {
                            ctx.marks.mark(e);
                        }
                    }
                }
                Some(_) => {
                    let marks = &mut ctx.marks;
                    ctx.window_queries[i].unpack_alternatives(ch, |e| {
                        marks.mark(e);
                    });
                }
            }
        }
        times.ch_path = start.elapsed();
        times.marked_edges = ctx.marks.count();
        if !found.iter().any(|&f| f) {
            return Ok((None, times));
        }

        let start = Instant::now();
        let result = ctx.search.query_restricted(&self.graph, &ctx.marks, q);
        times.td_search = start.elapsed();
        Ok((result, times))
    }

    /// Marks once, then samples the restricted search at departures
    /// `0, rate, 2 rate, ...`. `None` when unreachable.
    pub fn query_profile(&self, ctx: &mut QueryContext<T>, s: NodeId, t: NodeId, rate: T) -> Result<Option<Profile<T>>> {
        let samples = profile::sample_count(rate)?;
        self.check(&EaQuery { s, t, tau: T::zero() })?;
        if !self.mark(ctx, s, t, &TdsOptions::default()) {
            return Ok(None);
        }
        let mut arrivals = Vec::with_capacity(samples);
        let mut paths = Vec::with_capacity(samples);
        let mut departure = T::zero();
        for _ in 0..samples {
            let Some(r) = ctx.search.query_restricted(&self.graph, &ctx.marks, EaQuery { s, t, tau: departure }) else {
                return Ok(None);
            };
            arrivals.push(r.arrival);
            paths.push(r.path);
            departure = departure + rate;
        }
        Ok(Some(Profile::new(rate, arrivals, paths)))
    }
}

/// Per-query scratch space for one [`TdsIndex`].
pub struct QueryContext<T> {
    window_queries: Vec<ChQuery<T>>,
    freeflow_query: ChQuery<T>,
    search: TdSearch<T>,
    marks: EdgeMark,
}

impl<T: Time> QueryContext<T> {
    /// Edges marked by the last TD-S query.
    pub fn marks(&self) -> &EdgeMark {
        &self.marks
    }

    pub fn search(&mut self) -> &mut TdSearch<T> {
        &mut self.search
    }
}

/// Subset of window indices, as a bit mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowSet(u64);

impl WindowSet {
    pub fn all() -> Self {
        Self(u64::MAX)
    }

    pub fn none() -> Self {
        Self(0)
    }

    pub fn first(n: usize) -> Self {
        Self(if n >= 64 { u64::MAX } else { (1u64 << n) - 1 })
    }

    pub fn of(indices: &[usize]) -> Self {
        Self(indices.iter().fold(0, |m, &i| m | (1u64 << i)))
    }

    pub fn with(self, i: usize) -> Self {
        Self(self.0 | (1u64 << i))
    }

    pub fn contains(self, i: usize) -> bool {
        i < 64 && self.0 & (1u64 << i) != 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TdsOptions {
    pub windows: WindowSet,
    /// Mark all near-shortest via paths per window (TD-S+A).
    pub alternatives: Option<AltConfig>,
    /// Also mark the freeflow shortest path. Off in plain TD-S.
    pub include_freeflow: bool,
}

impl Default for TdsOptions {
    fn default() -> Self {
        Self {
            windows: WindowSet::all(),
            alternatives: None,
            include_freeflow: false,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PhaseTimes {
    pub ch_distance: Duration,
    pub ch_path: Duration,
    pub td_search: Duration,
    pub marked_edges: usize,
}

/// Convenience constructor returning the built index.
pub fn build_index<T: Time>(graph: Arc<TdGraph<T>>, windows: Vec<TimeWindow<T>>) -> Result<TdsIndex<T>> {
    TdsIndex::build(graph, windows)
}

#[allow(dead_code)]
fn assert_send_sync<T: Time>() {
    fn check<X: Send + Sync>() {}
    check::<TdsIndex<T>>();
}

/// Edge ids of a result, for callers that only need the path.
pub fn path_edges<T>(r: &EaResult<T>) -> &[EdgeId] {
    &r.path
}
