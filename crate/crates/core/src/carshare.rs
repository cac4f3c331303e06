//! Minimum-fleet car-sharing schedules.
//!
//! Trips become DAG nodes; an edge `a → b` means one car can serve `b` right
//! after `a`. A minimum path partition of the DAG is a minimum fleet. It is
//! found as `n − |M|` for a maximum matching `M` of the split bipartite graph
//! (left copy `i`, right copy `j'`, edge per DAG edge). Shifting every edge
//! weight by `N·T` (`T` the largest weight) makes a maximum-weight matching
//! also maximum-cardinality, so among minimum fleets the one with the most
//! similar consecutive hand-overs is returned.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{psim, wgm_sim, Role, TimeMode, WgmWeights};
use crate::trip::{ScaleContext, Trip};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DagEdge {
    pub from: usize,
    pub to: usize,
    pub weight: f64,
}

/// What an edge weight scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeScore {
    /// Point similarity of `a`'s destination and `b`'s origin.
    #[default]
    Handover,
    /// WGM similarity of the two trips' OD representations.
    WholeTrip,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DagParams {
    /// Meters between `a`'s destination and `b`'s origin.
    pub dist_threshold: f64,
    /// Seconds between `a`'s end and `b`'s start.
    pub time_threshold: f64,
    pub weights: WgmWeights,
    pub edge_score: EdgeScore,
}

impl Default for DagParams {
    fn default() -> Self {
        DagParams {
            dist_threshold: 1800.0,
            time_threshold: 900.0,
            weights: WgmWeights::default(),
            edge_score: EdgeScore::Handover,
        }
    }
}

/// Trip succession graph. Edges are sorted by `(from, to)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripDag {
    pub n: usize,
    pub edges: Vec<DagEdge>,
}

impl TripDag {
    /// Kahn topological order, or `None` if the graph has a cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let mut indeg = vec![0usize; self.n];
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); self.n];
        for e in &self.edges {
            indeg[e.to] += 1;
            out[e.from].push(e.to);
        }
        let mut stack: Vec<usize> = (0..self.n).rev().filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(self.n);
        while let Some(v) = stack.pop() {
            order.push(v);
            for &w in &out[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    stack.push(w);
                }
            }
        }
        (order.len() == self.n).then_some(order)
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.edges
            .binary_search_by(|e| (e.from, e.to).cmp(&(from, to)))
            .is_ok()
    }
}

/// Edge `a → b` iff `b` starts strictly after `a` ends, within the time
/// threshold, and `b`'s origin is within the distance threshold of `a`'s destination.
pub fn build_trip_dag(trips: &[Trip], ctx: &ScaleContext, params: &DagParams) -> Result<TripDag> {
    if !(params.dist_threshold > 0.0 && params.time_threshold > 0.0) {
        return Err(Error::invalid("thresholds must be positive"));
    }
    let w = params.weights;
    let od: Vec<_> = trips
        .iter()
        .map(|t| [ctx.scale(t.origin()).0, ctx.scale(t.destination()).0])
        .collect();
    let edges: Vec<DagEdge> = (0..trips.len())
        .into_par_iter()
        .map(|a| {
            let ta = &trips[a];
            let mut out = Vec::new();
            for (b, tb) in trips.iter().enumerate() {
                let gap = tb.start_time() - ta.end_time();
                if !(gap > 0.0 && gap <= params.time_threshold) {
                    continue;
                }
                if ta.destination().distance(tb.origin()) > params.dist_threshold {
                    continue;
                }
                let weight = match params.edge_score {
                    EdgeScore::Handover => psim(&od[a][1], &od[b][0], w, TimeMode::Absolute, Role::Interior),
                    EdgeScore::WholeTrip => wgm_sim(&od[a], &od[b], w, TimeMode::Absolute)?,
                };
                out.push(DagEdge { from: a, to: b, weight });
            }
            Ok(out)
        })
        .collect::<Result<Vec<Vec<DagEdge>>>>()?
        .into_iter()
        .flatten()
        .collect();
    let dag = TripDag { n: trips.len(), edges };
    assert!(dag.topological_order().is_some(), "strict time order admits no cycle");
    Ok(dag)
}

/// Bipartite graph with `n_left` left and `n_right` right nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BipartiteGraph {
    pub n_left: usize,
    pub n_right: usize,
    /// `(left, right, weight)`.
    pub edges: Vec<(usize, usize, f64)>,
}

/// Split graph: left node `i` and right node `j'` per trip, edge `(i, j')` per DAG edge.
pub fn dag_to_bipartite(dag: &TripDag) -> BipartiteGraph {
    BipartiteGraph {
        n_left: dag.n,
        n_right: dag.n,
        edges: dag.edges.iter().map(|e| (e.from, e.to, e.weight)).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matching {
    /// `(left, right)` pairs sorted by left node.
    pub pairs: Vec<(usize, usize)>,
    /// Sum of the original (unshifted) weights.
    pub weight: f64,
}

impl Matching {
    pub fn cardinality(&self) -> usize {
        self.pairs.len()
    }
}

/// Maximum-cardinality matching of maximum original weight among those,
/// via a weight shift and an O(n³) Hungarian solve.
pub fn max_card_max_weight_matching(b: &BipartiteGraph) -> Result<Matching> {
    let n = b.n_left.max(b.n_right);
    if b.edges.is_empty() {
        return Ok(Matching { pairs: Vec::new(), weight: 0.0 });
    }
    let mut original: Vec<Option<f64>> = vec![None; n * n];
    for &(l, r, w) in &b.edges {
        if l >= b.n_left || r >= b.n_right {
            return Err(Error::invalid(format!("edge ({l}, {r}) out of range")));
        }
        if !(w.is_finite() && w >= 0.0) {
            return Err(Error::invalid(format!("edge weight {w} is not a nonnegative number")));
        }
        let slot = &mut original[l * n + r];
        *slot = Some(slot.map_or(w, |old| old.max(w)));
    }
    let top = b.edges.iter().map(|e| e.2).fold(0.0, f64::max);
    let top = if top > 0.0 { top } else { 1.0 };
    let shift = n as f64 * top;
    let profit: Vec<f64> = original.iter().map(|o| o.map_or(0.0, |w| w + shift)).collect();
    let ceiling = shift + top;
    let cost: Vec<f64> = profit.iter().map(|p| ceiling - p).collect();
    let assignment = hungarian_min(&cost, n);

    let mut pairs = Vec::new();
    let mut weight = 0.0;
    for (l, &r) in assignment.iter().enumerate() {
        if let Some(w) = original[l * n + r] {
            pairs.push((l, r));
            weight += w;
        }
    }
    Ok(Matching { pairs, weight })
}

/// Minimum-cost perfect assignment of a dense `n × n` row-major cost matrix;
/// returns the column of each row.
fn hungarian_min(cost: &[f64], n: usize) -> Vec<usize> {
    // potentials and links are 1-based; index 0 is the virtual root column
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col_of = vec![0usize; n];
    for j in 1..=n {
        col_of[row_of[j] - 1] = j - 1;
    }
    col_of
}

/// Trip chains, one per car.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSchedule {
    /// Trip indices per chain, in service order.
    pub chains: Vec<Vec<usize>>,
    pub n_cars: usize,
    pub cardinality: usize,
    pub singleton_count: usize,
}

impl ChainSchedule {
    pub fn mean_chain_length(&self) -> f64 {
        let trips: usize = self.chains.iter().map(Vec::len).sum();
        trips as f64 / self.chains.len().max(1) as f64
    }

    /// Mean length over chains with more than one trip.
    pub fn mean_multi_chain_length(&self) -> Option<f64> {
        let multi: Vec<usize> = self.chains.iter().map(Vec::len).filter(|&l| l > 1).collect();
        (!multi.is_empty()).then(|| multi.iter().sum::<usize>() as f64 / multi.len() as f64)
    }
}

/// Follows matched successors from every trip whose right copy is unmatched.
pub fn extract_chains(dag: &TripDag, matching: &Matching) -> Result<ChainSchedule> {
    let n = dag.n;
    let mut next: Vec<Option<usize>> = vec![None; n];
    let mut has_pred = vec![false; n];
    for &(l, r) in &matching.pairs {
        if l >= n || r >= n {
            return Err(Error::invalid(format!("pair ({l}, {r}) out of range")));
        }
        if next[l].is_some() || has_pred[r] {
            return Err(Error::invalid(format!("pair ({l}, {r}) shares an endpoint")));
        }
        if !dag.has_edge(l, r) {
            return Err(Error::invalid(format!("pair ({l}, {r}) is not a DAG edge")));
        }
        next[l] = Some(r);
        has_pred[r] = true;
    }
    let mut chains = Vec::new();
    for start in (0..n).filter(|&j| !has_pred[j]) {
        let mut chain = vec![start];
        let mut cur = start;
        while let Some(nx) = next[cur] {
            chain.push(nx);
            cur = nx;
        }
        chains.push(chain);
    }
    let covered: usize = chains.iter().map(Vec::len).sum();
    debug_assert_eq!(covered, n);
    let singleton_count = chains.iter().filter(|c| c.len() == 1).count();
    Ok(ChainSchedule {
        n_cars: chains.len(),
        cardinality: matching.cardinality(),
        singleton_count,
        chains,
    })
}

/// Travel and hand-over totals of one chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainStats {
    pub chain: usize,
    pub length: usize,
    pub travel_km: f64,
    /// Destination-to-next-origin distance summed over hand-overs.
    pub pickup_km: f64,
    /// End-to-next-start gap summed over hand-overs.
    pub pickup_s: f64,
}

pub fn chain_stats(schedule: &ChainSchedule, trips: &[Trip]) -> Result<Vec<ChainStats>> {
    schedule
        .chains
        .iter()
        .enumerate()
        .map(|(c, chain)| {
            if let Some(&bad) = chain.iter().find(|&&i| i >= trips.len()) {
                return Err(Error::invalid(format!("chain {c} references trip {bad}")));
            }
            let travel: f64 = chain.iter().map(|&i| trips[i].path_length()).sum();
            let (mut km, mut s) = (0.0, 0.0);
            for hop in chain.windows(2) {
                let (a, b) = (&trips[hop[0]], &trips[hop[1]]);
                km += a.destination().distance(b.origin()) / 1000.0;
                s += b.start_time() - a.end_time();
            }
            Ok(ChainStats {
                chain: c,
                length: chain.len(),
                travel_km: travel / 1000.0,
                pickup_km: km,
                pickup_s: s,
            })
        })
        .collect()
}

/// Headline numbers of a schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleSummary {
    pub n_trips: usize,
    pub n_edges: usize,
    pub n_cars: usize,
    pub cardinality: usize,
    pub singleton_count: usize,
    pub mean_chain_length: f64,
    pub mean_multi_chain_length: Option<f64>,
    pub total_weight: f64,
}

/// Full pipeline: DAG, bipartite reduction, matching and chains.
pub fn schedule(trips: &[Trip], ctx: &ScaleContext, params: &DagParams) -> Result<(TripDag, Matching, ChainSchedule)> {
    let dag = build_trip_dag(trips, ctx, params)?;
    let matching = max_card_max_weight_matching(&dag_to_bipartite(&dag))?;
    let chains = extract_chains(&dag, &matching)?;
    Ok((dag, matching, chains))
}

pub fn summarize(dag: &TripDag, matching: &Matching, schedule: &ChainSchedule) -> ScheduleSummary {
    ScheduleSummary {
        n_trips: dag.n,
        n_edges: dag.edges.len(),
        n_cars: schedule.n_cars,
        cardinality: schedule.cardinality,
        singleton_count: schedule.singleton_count,
        mean_chain_length: schedule.mean_chain_length(),
        mean_multi_chain_length: schedule.mean_multi_chain_length(),
        total_weight: matching.weight,
    }
}
