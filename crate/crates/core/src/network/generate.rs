//! Synthetic road networks with rush-hour travel-time functions.
//!
//! Nodes sit on a jittered grid. Every grid neighbour pair is connected in
//! both directions, so the graph is strongly connected. On top come a sparse
//! lattice of fast motorway edges, diagonal local roads and random regional
//! shortcuts until the requested average out-degree is reached.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{NodeId, TdEdge, TdGraph};
use crate::error::{Error, Result};
use crate::scalar::Time;
use crate::ttf::{BreakPoint, TravelTimeFunction};

const SPACING_M: f64 = 250.0;
const MOTORWAY_STRIDE: usize = 8;

/// Where time-dependent functions are placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TdPlacement {
    /// Strongly prefer motorways and shortcuts.
    Important,
    /// Every edge is equally likely.
    Uniform,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub node_count: usize,
    /// Target number of edges per node.
    pub avg_degree: f64,
    pub td_fraction: f64,
    pub breakpoints_per_td_edge: usize,
    pub rush_hour_peaks: usize,
    pub seed: u64,
    pub placement: TdPlacement,
    /// Round speeds to multiples of this many km/h.
    pub speed_step_kmh: Option<f64>,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            node_count: 10_000,
            avg_degree: 5.0,
            td_fraction: 0.05,
            breakpoints_per_td_edge: 16,
            rush_hour_peaks: 2,
            seed: 1,
            placement: TdPlacement::Important,
            speed_step_kmh: None,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.node_count < 2 {
            return fail(format!("node_count must be at least 2, got {}", self.node_count));
        }
        if self.node_count > u32::MAX as usize / 2 {
            return fail("node_count too large".into());
        }
        if !(0.0..=1.0).contains(&self.td_fraction) {
            return fail(format!("td_fraction must lie in [0, 1], got {}", self.td_fraction));
        }
        if !(self.avg_degree.is_finite() && self.avg_degree > 0.0 && self.avg_degree <= 32.0) {
            return fail(format!("avg_degree must lie in (0, 32], got {}", self.avg_degree));
        }
        if self.breakpoints_per_td_edge < 2 || self.breakpoints_per_td_edge > 1000 {
            return fail(format!(
                "breakpoints_per_td_edge must lie in [2, 1000], got {}",
                self.breakpoints_per_td_edge
            ));
        }
        if let Some(step) = self.speed_step_kmh {
            if !(step.is_finite() && step > 0.0) {
                return fail(format!("speed step must be positive, got {step}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RoadClass {
    Local,
    Arterial,
    Regional,
    Motorway,
}

impl RoadClass {
    fn td_weight(self) -> f64 {
        match self {
            RoadClass::Local => 1.0,
            RoadClass::Arterial => 4.0,
            RoadClass::Regional => 20.0,
            RoadClass::Motorway => 60.0,
        }
    }

    fn speed_kmh(self, rng: &mut impl Rng) -> f64 {
        match self {
            RoadClass::Local => *[30.0, 40.0, 50.0].choose(rng).unwrap(),
            RoadClass::Arterial => *[50.0, 60.0, 70.0].choose(rng).unwrap(),
            RoadClass::Regional => rng.gen_range(80.0..100.0),
            RoadClass::Motorway => rng.gen_range(110.0..130.0),
        }
    }
}

struct RawEdge {
    tail: NodeId,
    head: NodeId,
    length_m: f64,
    speed_kmh: f64,
    class: RoadClass,
}

pub fn generate(cfg: &GeneratorConfig) -> Result<TdGraph<i64>> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.node_count;
    let side = (n as f64).sqrt().ceil() as usize;
    let rows = n.div_ceil(side);
    let cell = |r: usize, c: usize| -> Option<NodeId> {
        let id = r * side + c;
        (c < side && id < n).then_some(id as NodeId)
    };
    let coords: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let (r, c) = (i / side, i % side);
            (
                c as f64 * SPACING_M + rng.gen_range(-0.3..0.3) * SPACING_M,
                r as f64 * SPACING_M + rng.gen_range(-0.3..0.3) * SPACING_M,
            )
        })
        .collect();
    let dist = |a: NodeId, b: NodeId| {
        let (pa, pb) = (coords[a as usize], coords[b as usize]);
        ((pa.0 - pb.0).powi(2) + (pa.1 - pb.1).powi(2)).sqrt().max(10.0)
    };

    let mut raw = Vec::new();
    let mut pairs = HashSet::new();
    let mut add_pair = |raw: &mut Vec<RawEdge>, rng: &mut ChaCha8Rng, a: NodeId, b: NodeId, class: RoadClass| {
        let key = (a.min(b), a.max(b));
        if a == b || !pairs.insert(key) {
            return false;
        }
        let length_m = dist(a, b);
        for (tail, head) in [(a, b), (b, a)] {
            raw.push(RawEdge {
                tail,
                head,
                length_m,
                speed_kmh: class.speed_kmh(rng),
                class,
            });
        }
        true
    };

    for r in 0..rows {
        for c in 0..side {
            let Some(v) = cell(r, c) else { continue };
            let arterial_row = r % 4 == 0;
            let arterial_col = c % 4 == 0;
            if let Some(w) = cell(r, c + 1) {
                let class = if arterial_row { RoadClass::Arterial } else { RoadClass::Local };
                add_pair(&mut raw, &mut rng, v, w, class);
            }
            if let Some(w) = cell(r + 1, c) {
                let class = if arterial_col { RoadClass::Arterial } else { RoadClass::Local };
                add_pair(&mut raw, &mut rng, v, w, class);
            }
        }
    }
    for r in (0..rows).step_by(MOTORWAY_STRIDE) {
        for c in (0..side).step_by(MOTORWAY_STRIDE) {
            let Some(v) = cell(r, c) else { continue };
            for (dr, dc) in [(0, MOTORWAY_STRIDE), (MOTORWAY_STRIDE, 0)] {
                if let Some(w) = cell(r + dr, c + dc) {
                    add_pair(&mut raw, &mut rng, v, w, RoadClass::Motorway);
                }
            }
        }
    }

    let target = (cfg.avg_degree * n as f64).round() as usize;
    let missing_pairs = target.saturating_sub(raw.len()) / 2;
    let diagonal_pairs = missing_pairs * 3 / 4;
    let diagonal_slots = 2 * (rows.saturating_sub(1)) * side.saturating_sub(1);
    let mut added = 0;
    let mut attempts = 0;
    while added < diagonal_pairs.min(diagonal_slots / 2) && attempts < 20 * diagonal_pairs + 100 {
        attempts += 1;
        let r = rng.gen_range(0..rows);
        let c = rng.gen_range(0..side);
        let forward = rng.gen_bool(0.5);
        let (a, b) = if forward {
            (cell(r, c), cell(r + 1, c + 1))
        } else {
            (cell(r, c + 1), cell(r + 1, c))
        };
        if let (Some(a), Some(b)) = (a, b) {
            if add_pair(&mut raw, &mut rng, a, b, RoadClass::Local) {
                added += 1;
            }
        }
    }
    let shortcut_pairs = missing_pairs.saturating_sub(added);
    let reach = (MOTORWAY_STRIDE as i64).min(side as i64 - 1).max(1);
    added = 0;
    attempts = 0;
    while added < shortcut_pairs && attempts < 20 * shortcut_pairs + 100 {
        attempts += 1;
        let v = rng.gen_range(0..n) as NodeId;
        let (r, c) = (v as usize / side, v as usize % side);
        let dr = rng.gen_range(-reach..=reach);
        let dc = rng.gen_range(-reach..=reach);
        if dr.abs() + dc.abs() < 2 {
            continue;
        }
        let (r2, c2) = (r as i64 + dr, c as i64 + dc);
        if r2 < 0 || c2 < 0 {
            continue;
        }
        if let Some(w) = cell(r2 as usize, c2 as usize) {
            if add_pair(&mut raw, &mut rng, v, w, RoadClass::Regional) {
                added += 1;
            }
        }
    }

    let td_count = (cfg.td_fraction * raw.len() as f64).round() as usize;
    let td_edges = pick_weighted(&raw, td_count, cfg.placement, &mut rng);

    let edges = raw
        .iter()
        .zip(td_edges)
        .map(|(e, td)| {
            let ttf = if td {
                rush_hour_function(e, cfg, &mut rng)
            } else {
                let speed = quantize(e.speed_kmh, cfg.speed_step_kmh);
                TravelTimeFunction::constant(travel_decis(e.length_m, speed))
            };
            TdEdge {
                tail: e.tail,
                head: e.head,
                ttf,
            }
        })
        .collect();
    TdGraph::new(n, edges)
}

// Weighted sampling without replacement (Efraimidis-Spirakis keys).
fn pick_weighted(raw: &[RawEdge], count: usize, placement: TdPlacement, rng: &mut impl Rng) -> Vec<bool> {
    let mut keys: Vec<(f64, usize)> = raw
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let w = match placement {
                TdPlacement::Important => e.class.td_weight(),
                TdPlacement::Uniform => 1.0,
            };
            let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
            (u.ln() / w, i)
        })
        .collect();
    keys.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut chosen = vec![false; raw.len()];
    for &(_, i) in keys.iter().take(count) {
        chosen[i] = true;
    }
    chosen
}

fn quantize(speed: f64, step: Option<f64>) -> f64 {
    match step {
        Some(step) => ((speed / step).round() * step).max(step),
        None => speed,
    }
}

fn travel_decis(length_m: f64, speed_kmh: f64) -> i64 {
    ((length_m / (speed_kmh / 3.6)) * 10.0).round().max(1.0) as i64
}

struct Peak {
    center: f64,
    width: f64,
    amplitude: f64,
}

const PEAK_CENTERS_H: [f64; 4] = [8.0, 17.5, 12.5, 21.0];
const PEAK_AMPLITUDES: [f64; 4] = [1.2, 1.0, 0.35, 0.25];

fn rush_hour_function(e: &RawEdge, cfg: &GeneratorConfig, rng: &mut impl Rng) -> TravelTimeFunction<i64> {
    let day = 86_400.0;
    let peaks: Vec<Peak> = (0..cfg.rush_hour_peaks)
        .map(|i| {
            let (center_h, amplitude) = match (PEAK_CENTERS_H.get(i), PEAK_AMPLITUDES.get(i)) {
                (Some(&c), Some(&a)) => (c, a),
                _ => (rng.gen_range(6.0..22.0), 0.3),
            };
            Peak {
                center: (center_h + rng.gen_range(-0.75..0.75)) * 3600.0,
                width: rng.gen_range(0.6..1.4) * 3600.0,
                amplitude: amplitude * rng.gen_range(0.4..1.6),
            }
        })
        .collect();
    let slowdown = |t: f64| -> f64 {
        1.0 + peaks
            .iter()
            .map(|p| {
                let mut d = (t - p.center).abs() % day;
                d = d.min(day - d);
                p.amplitude * (-0.5 * (d / p.width).powi(2)).exp()
            })
            .sum::<f64>()
    };

    let k = cfg.breakpoints_per_td_edge;
    let gap = day / k as f64;
    let mut times: Vec<i64> = (0..k)
        .map(|i| {
            let jitter = if i == 0 { 0.0 } else { rng.gen_range(-0.3..0.3) * gap };
            // whole seconds
            ((i as f64 * gap + jitter).round() as i64 * 10).clamp(0, i64::PERIOD - 10)
        })
        .collect();
    times.dedup();
    for i in 1..times.len() {
        if times[i] <= times[i - 1] {
            times[i] = times[i - 1] + 10;
        }
    }
    times.retain(|&t| t < i64::PERIOD);

    let mut travel: Vec<i64> = times
        .iter()
        .map(|&t| {
            let speed = quantize(e.speed_kmh / slowdown(t as f64 / 10.0), cfg.speed_step_kmh);
            travel_decis(e.length_m, speed)
        })
        .collect();
    clamp_fifo(&times, &mut travel);
    let points = times
        .into_iter()
        .zip(travel)
        .map(|(t, w)| BreakPoint::new(t, w))
        .collect();
    TravelTimeFunction::new(points).expect("clamped function is FIFO")
}

/// Raises breakpoint values until every segment has slope >= -1.
fn clamp_fifo(times: &[i64], travel: &mut [i64]) {
    let k = times.len();
    if k < 2 {
        return;
    }
    loop {
        let mut changed = false;
        for i in 0..k {
            let j = (i + 1) % k;
            let span = if j == 0 { times[0] + i64::PERIOD - times[i] } else { times[j] - times[i] };
            let floor = travel[i] - span;
            if travel[j] < floor {
                travel[j] = floor;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
}
