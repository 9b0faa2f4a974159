use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ch::dijkstra::{one_to_all, rank_of_position};
use crate::ch::ScalarGraph;
use crate::network::TdGraph;
use crate::scalar::Time;
use crate::tdsearch::EaQuery;
use crate::ttf::TimeWindow;

/// Query whose target is the `2^rank`-th node settled from its source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankQuery<T> {
    pub query: EaQuery<T>,
    pub rank: u32,
}

fn departure<T: Time>(rng: &mut ChaCha8Rng) -> T {
    T::from_ticks_f64(rng.gen_range(0.0..T::PERIOD.to_f64())).wrap()
}

/// `n` queries with source and target drawn uniformly from the largest
/// strongly connected component and a uniform departure time.
pub fn gen_uniform<T: Time>(graph: &TdGraph<T>, n: usize, seed: u64) -> Vec<EaQuery<T>> {
    let nodes = graph.largest_scc();
    if nodes.is_empty() {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let s = nodes[rng.gen_range(0..nodes.len())];
            let t = nodes[rng.gen_range(0..nodes.len())];
            EaQuery {
                s,
                t,
                tau: departure(&mut rng),
            }
        })
        .collect()
}

/// `per_rank` queries for every rank reachable from the sampled sources.
/// Distances use travel times averaged over the whole day. Output is
/// ordered by rank, then by source draw.
pub fn gen_rank<T: Time>(graph: &TdGraph<T>, per_rank: usize, seed: u64) -> Vec<RankQuery<T>> {
    let nodes = graph.largest_scc();
    if nodes.is_empty() {
        return Vec::new();
    }
    let day = TimeWindow::whole_day();
    let scalar = ScalarGraph::from_td(graph, |f| f.average_over_window(&day));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for _ in 0..per_rank {
        let s = nodes[rng.gen_range(0..nodes.len())];
        let order = one_to_all(&scalar, s).order;
        let mut rank = 1;
        while let Some(&t) = order.get((1usize << rank) - 1) {
            debug_assert_eq!(rank_of_position(1 << rank), rank);
            out.push(RankQuery {
                query: EaQuery {
                    s,
                    t,
                    tau: departure(&mut rng),
                },
                rank,
            });
            rank += 1;
        }
    }
    out.sort_by_key(|q| q.rank);
    out
}
