//! Threshold-filtered dynamic ride matching for Catch-a-Ride and CarPool.
//!
//! Each request is matched independently: its candidate rides are filtered by
//! origin/destination distance and time thresholds plus the scenario's temporal
//! order, and the best candidate under the chosen metric wins. Rides have no
//! capacity, so per-request greedy selection is optimal.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{
    car_score, cp_score, dtw, frechet_discrete, lcss, DtwCost, Metric, MetricParams, Sense,
    WgmWeights,
};
use crate::trip::{sample_waypoints, ScaleContext, ScaledPoint, Trip, Waypoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Catch-a-Ride: the rider joins a ride that starts later and ends earlier.
    Car,
    /// CarPool: the ride detours for the rider and still arrives on time.
    Carpool,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "car" => Ok(Mode::Car),
            "carpool" | "cp" => Ok(Mode::Carpool),
            _ => Err(Error::invalid(format!("unknown mode `{s}`"))),
        }
    }
}

/// How trips are reduced to point sequences before scoring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    /// Origin and destination only.
    Od,
    /// Index-uniform sample of this many waypoints.
    Sampled(usize),
}

/// A trip with its raw endpoints and its scaled representation.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedTrip {
    pub id: String,
    pub origin: Waypoint,
    pub destination: Waypoint,
    /// Path length in meters.
    pub travel: f64,
    pub points: Vec<ScaledPoint>,
}

impl PreparedTrip {
    pub fn new(trip: &Trip, ctx: &ScaleContext, repr: Representation) -> Result<Self> {
        let points = match repr {
            Representation::Od => vec![ctx.scale(trip.origin()).0, ctx.scale(trip.destination()).0],
            Representation::Sampled(k) => ctx.scale_all(sample_waypoints(trip, k)?.waypoints()).0,
        };
        Ok(PreparedTrip {
            id: trip.id().to_string(),
            origin: *trip.origin(),
            destination: *trip.destination(),
            travel: trip.path_length(),
            points,
        })
    }

    pub fn prepare_all(trips: &[Trip], ctx: &ScaleContext, repr: Representation) -> Result<Vec<Self>> {
        trips.iter().map(|t| PreparedTrip::new(t, ctx, repr)).collect()
    }

    pub fn start(&self) -> f64 {
        self.origin.t
    }

    pub fn end(&self) -> f64 {
        self.destination.t
    }
}

/// Matching configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchScenario {
    pub mode: Mode,
    /// Meters.
    pub dist_threshold: f64,
    /// Seconds.
    pub time_threshold: f64,
    pub weights: WgmWeights,
    pub metric: Metric,
    /// LCSS thresholds in scaled units.
    pub lcss: MetricParams,
}

pub const DEFAULT_DIST_THRESHOLD: f64 = 1800.0;
pub const DEFAULT_TIME_THRESHOLD: f64 = 900.0;

impl MatchScenario {
    /// Default thresholds and WGM weights; LCSS thresholds mirror the filter
    /// thresholds through `ctx`.
    pub fn new(mode: Mode, ctx: &ScaleContext) -> Result<Self> {
        Ok(MatchScenario {
            mode,
            dist_threshold: DEFAULT_DIST_THRESHOLD,
            time_threshold: DEFAULT_TIME_THRESHOLD,
            weights: WgmWeights::default(),
            metric: Metric::Wgm,
            lcss: MetricParams::from_raw(ctx, DEFAULT_DIST_THRESHOLD, DEFAULT_TIME_THRESHOLD)?,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dist_threshold > 0.0 && self.time_threshold > 0.0) {
            return Err(Error::invalid("thresholds must be positive"));
        }
        WgmWeights::new(self.weights.space, self.weights.time)?;
        MetricParams::new(self.lcss.eps_space, self.lcss.eps_time)?;
        Ok(())
    }

    fn order_feasible(&self, request: &PreparedTrip, ride: &PreparedTrip) -> bool {
        match self.mode {
            Mode::Car => ride.start() >= request.start() && ride.end() <= request.end(),
            Mode::Carpool => ride.start() <= request.start() && ride.end() >= request.end(),
        }
    }

    /// Whether `ride` passes every filter for `request`.
    pub fn is_candidate(&self, request: &PreparedTrip, ride: &PreparedTrip) -> bool {
        request.origin.distance(&ride.origin) <= self.dist_threshold
            && request.destination.distance(&ride.destination) <= self.dist_threshold
            && (request.start() - ride.start()).abs() <= self.time_threshold
            && (request.end() - ride.end()).abs() <= self.time_threshold
            && self.order_feasible(request, ride)
    }

    /// Score of `ride` for `request` under `metric`.
    pub fn score(&self, metric: Metric, request: &PreparedTrip, ride: &PreparedTrip) -> Result<f64> {
        let (a, b) = (&request.points[..], &ride.points[..]);
        let wgm = |w: WgmWeights| match self.mode {
            Mode::Car => car_score(a, b, w),
            Mode::Carpool => cp_score(a, b, w),
        };
        match metric {
            Metric::Wgm => wgm(self.weights).map(|s| s.value),
            Metric::WgmTime => wgm(WgmWeights::time_heavy()).map(|s| s.value),
            Metric::Lcss => Ok(lcss(a, b, &self.lcss) as f64),
            Metric::Dtw => dtw(a, b, DtwCost::Distance),
            Metric::DtwTime => dtw(a, b, DtwCost::DistanceTimesTime),
            Metric::Frechet => frechet_discrete(a, b),
        }
    }
}

/// Indices of the rides that pass the filters for `request`.
pub fn feasible_candidates(
    request: &PreparedTrip,
    rides: &[PreparedTrip],
    scenario: &MatchScenario,
) -> Vec<usize> {
    rides
        .iter()
        .enumerate()
        .filter(|(_, r)| scenario.is_candidate(request, r))
        .map(|(i, _)| i)
        .collect()
}

/// The chosen ride of one request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchedRide {
    pub ride_id: String,
    pub score: f64,
    pub oo_dist_m: f64,
    pub dd_dist_m: f64,
    pub oo_time_s: f64,
    pub dd_time_s: f64,
    pub ride_travel_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchRow {
    pub request_id: String,
    pub request_travel_m: f64,
    pub candidates: usize,
    pub matched: Option<MatchedRide>,
}

/// Travel totals that drive the savings arithmetic. Any consistent unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TravelTotals {
    pub req_travels: f64,
    pub match_travels: f64,
    pub req_travels_matched: f64,
    pub oo_dist: f64,
    pub dd_dist: f64,
}

/// Fractional decrease in total traveled distance.
///
/// Catch-a-Ride: matched riders stop driving, so travel drops to the unmatched
/// requests plus the rides. CarPool: rides absorb matched riders at the cost of
/// the pick-up and drop-off detours.
pub fn savings_accounting(totals: &TravelTotals, mode: Mode) -> Result<f64> {
    let baseline = totals.req_travels + totals.match_travels;
    if !(baseline > 0.0) {
        return Err(Error::UndefinedReport("no traveled distance".into()));
    }
    let shared = match mode {
        Mode::Car => totals.req_travels - totals.req_travels_matched + totals.match_travels,
        Mode::Carpool => totals.req_travels + totals.oo_dist + totals.dd_dist,
    };
    Ok(1.0 - shared / baseline)
}

/// Report aggregates, keyed by the column names of the reference result tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchAggregates {
    #[serde(rename = "match travels (km)")]
    pub match_travels_km: f64,
    #[serde(rename = "match travels, distinct rides (km)")]
    pub match_travels_distinct_km: f64,
    #[serde(rename = "req travels (km)")]
    pub req_travels_km: f64,
    #[serde(rename = "match to total travel ratio")]
    pub match_to_total_ratio: Option<f64>,
    #[serde(rename = "origin-origin distance (km)")]
    pub oo_dist_km: f64,
    #[serde(rename = "dest-dest distance (km)")]
    pub dd_dist_km: f64,
    #[serde(rename = "origin-origin times (sec)")]
    pub oo_time_s: f64,
    #[serde(rename = "dest-dest times (sec)")]
    pub dd_time_s: f64,
    #[serde(rename = "# req with at least a match")]
    pub n_matched: usize,
    #[serde(rename = "req travels for least a match (km)")]
    pub req_travels_matched_km: f64,
    #[serde(rename = "match to total travel ratio (at least a match)")]
    pub ratio_at_least_a_match: Option<f64>,
    #[serde(rename = "savings (%)")]
    pub savings_pct: Option<f64>,
    #[serde(rename = "# requests")]
    pub n_requests: usize,
}

impl MatchAggregates {
    pub fn from_rows(rows: &[MatchRow], mode: Mode) -> Self {
        let mut req = 0.0;
        let mut req_matched = 0.0;
        let mut matched_travel = 0.0;
        let (mut oo, mut dd, mut oo_t, mut dd_t) = (0.0, 0.0, 0.0, 0.0);
        let mut n_matched = 0;
        let mut distinct: BTreeSet<&str> = BTreeSet::new();
        let mut distinct_travel = 0.0;
        for row in rows {
            req += row.request_travel_m;
            if let Some(m) = &row.matched {
                n_matched += 1;
                req_matched += row.request_travel_m;
                matched_travel += m.ride_travel_m;
                oo += m.oo_dist_m;
                dd += m.dd_dist_m;
                oo_t += m.oo_time_s;
                dd_t += m.dd_time_s;
                if distinct.insert(&m.ride_id) {
                    distinct_travel += m.ride_travel_m;
                }
            }
        }
        let ratio = |num: f64, den: f64| (den > 0.0).then(|| num / den);
        let totals = TravelTotals {
            req_travels: req,
            match_travels: matched_travel,
            req_travels_matched: req_matched,
            oo_dist: oo,
            dd_dist: dd,
        };
        MatchAggregates {
            match_travels_km: matched_travel / 1000.0,
            match_travels_distinct_km: distinct_travel / 1000.0,
            req_travels_km: req / 1000.0,
            match_to_total_ratio: ratio(matched_travel, req + matched_travel),
            oo_dist_km: oo / 1000.0,
            dd_dist_km: dd / 1000.0,
            oo_time_s: oo_t,
            dd_time_s: dd_t,
            n_matched,
            req_travels_matched_km: req_matched / 1000.0,
            ratio_at_least_a_match: ratio(matched_travel, req_matched + matched_travel),
            savings_pct: savings_accounting(&totals, mode).ok().map(|s| 100.0 * s),
            n_requests: rows.len(),
        }
    }

    pub fn totals_km(&self) -> TravelTotals {
        TravelTotals {
            req_travels: self.req_travels_km,
            match_travels: self.match_travels_km,
            req_travels_matched: self.req_travels_matched_km,
            oo_dist: self.oo_dist_km,
            dd_dist: self.dd_dist_km,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    pub mode: Mode,
    pub metric: Metric,
    pub rows: Vec<MatchRow>,
    pub aggregates: MatchAggregates,
}

/// Whether `a` beats `b`; ties go to the lexicographically smaller ride id.
fn better(sense: Sense, a: (f64, &str), b: (f64, &str)) -> bool {
    let ord = match sense {
        Sense::Similarity => a.0.total_cmp(&b.0),
        Sense::Distance => b.0.total_cmp(&a.0),
    };
    ord == Ordering::Greater || (ord == Ordering::Equal && a.1 < b.1)
}

fn match_one(
    request: &PreparedTrip,
    rides: &[PreparedTrip],
    candidates: &[usize],
    scenario: &MatchScenario,
    metric: Metric,
) -> Result<MatchRow> {
    let mut best: Option<(f64, usize)> = None;
    for &c in candidates {
        let s = scenario.score(metric, request, &rides[c])?;
        let wins = match best {
            None => true,
            Some((bs, bi)) => better(metric.sense(), (s, &rides[c].id), (bs, &rides[bi].id)),
        };
        if wins {
            best = Some((s, c));
        }
    }
    let matched = best.map(|(score, i)| {
        let ride = &rides[i];
        MatchedRide {
            ride_id: ride.id.clone(),
            score,
            oo_dist_m: request.origin.distance(&ride.origin),
            dd_dist_m: request.destination.distance(&ride.destination),
            oo_time_s: (request.start() - ride.start()).abs(),
            dd_time_s: (request.end() - ride.end()).abs(),
            ride_travel_m: ride.travel,
        }
    });
    Ok(MatchRow {
        request_id: request.id.clone(),
        request_travel_m: request.travel,
        candidates: candidates.len(),
        matched,
    })
}

fn all_candidates(
    requests: &[PreparedTrip],
    rides: &[PreparedTrip],
    scenario: &MatchScenario,
) -> Vec<Vec<usize>> {
    requests
        .par_iter()
        .map(|r| feasible_candidates(r, rides, scenario))
        .collect()
}

fn match_with(
    requests: &[PreparedTrip],
    rides: &[PreparedTrip],
    candidates: &[Vec<usize>],
    scenario: &MatchScenario,
    metric: Metric,
) -> Result<MatchReport> {
    let rows = requests
        .par_iter()
        .zip(candidates.par_iter())
        .map(|(req, cands)| match_one(req, rides, cands, scenario, metric))
        .collect::<Result<Vec<_>>>()?;
    let aggregates = MatchAggregates::from_rows(&rows, scenario.mode);
    Ok(MatchReport { mode: scenario.mode, metric, rows, aggregates })
}

/// Matches every request to its best feasible ride under `scenario.metric`.
pub fn greedy_match(
    requests: &[PreparedTrip],
    rides: &[PreparedTrip],
    scenario: &MatchScenario,
) -> Result<MatchReport> {
    scenario.validate()?;
    let candidates = all_candidates(requests, rides, scenario);
    match_with(requests, rides, &candidates, scenario, scenario.metric)
}

/// One report per metric over identical candidate sets.
pub fn compare_metrics(
    requests: &[PreparedTrip],
    rides: &[PreparedTrip],
    metrics: &[Metric],
    scenario: &MatchScenario,
) -> Result<Vec<MatchReport>> {
    scenario.validate()?;
    let lens: BTreeSet<usize> = requests.iter().chain(rides).map(|t| t.points.len()).collect();
    if lens.len() > 1 {
        return Err(Error::invalid(format!(
            "trips have differing representation lengths {lens:?}"
        )));
    }
    let candidates = all_candidates(requests, rides, scenario);
    metrics
        .iter()
        .map(|&m| match_with(requests, rides, &candidates, scenario, m))
        .collect()
}

/// Which threshold a curve sweeps while the other stays fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepKind {
    Distance,
    Time,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub kind: SweepKind,
    pub threshold: f64,
    pub at_least: usize,
    pub requests: usize,
}

/// Number of requests with at least `L` candidates, per swept threshold and `L`.
pub fn match_counts_curve(
    requests: &[PreparedTrip],
    rides: &[PreparedTrip],
    scenario: &MatchScenario,
    kind: SweepKind,
    thresholds: &[f64],
    at_least: &[usize],
) -> Vec<CurvePoint> {
    let mut out = Vec::with_capacity(thresholds.len() * at_least.len());
    for &threshold in thresholds {
        let mut s = *scenario;
        match kind {
            SweepKind::Distance => s.dist_threshold = threshold,
            SweepKind::Time => s.time_threshold = threshold,
        }
        let counts: Vec<usize> = requests
            .par_iter()
            .map(|r| rides.iter().filter(|ride| s.is_candidate(r, ride)).count())
            .collect();
        for &l in at_least {
            out.push(CurvePoint {
                kind,
                threshold,
                at_least: l,
                requests: counts.iter().filter(|&&c| c >= l).count(),
            });
        }
    }
    out
}

/// Pick-up and drop-off totals of WGM matching as the temporal weight varies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightSweepPoint {
    pub time_weight: f64,
    pub oo_dist_km: f64,
    pub dd_dist_km: f64,
    pub oo_time_s: f64,
    pub dd_time_s: f64,
    pub n_matched: usize,
}

/// Re-runs WGM matching with weights `(1 − w_t, w_t)` for each `w_t`.
pub fn weight_sweep(
    requests: &[PreparedTrip],
    rides: &[PreparedTrip],
    scenario: &MatchScenario,
    time_weights: &[f64],
) -> Result<Vec<WeightSweepPoint>> {
    scenario.validate()?;
    let candidates = all_candidates(requests, rides, scenario);
    time_weights
        .iter()
        .map(|&wt| {
            let mut s = *scenario;
            s.weights = WgmWeights::new(1.0 - wt, wt)?;
            let r = match_with(requests, rides, &candidates, &s, Metric::Wgm)?;
            Ok(WeightSweepPoint {
                time_weight: wt,
                oo_dist_km: r.aggregates.oo_dist_km,
                dd_dist_km: r.aggregates.dd_dist_km,
                oo_time_s: r.aggregates.oo_time_s,
                dd_time_s: r.aggregates.dd_time_s,
                n_matched: r.aggregates.n_matched,
            })
        })
        .collect()
}

/// Seeded random split of a trip set into `n_requests` requests and the remaining rides.
pub fn split_requests(trips: &[Trip], n_requests: usize, seed: u64) -> Result<(Vec<Trip>, Vec<Trip>)> {
    if n_requests > trips.len() {
        return Err(Error::invalid(format!(
            "cannot draw {n_requests} requests from {} trips",
            trips.len()
        )));
    }
    let mut idx: Vec<usize> = (0..trips.len()).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut is_request = vec![false; trips.len()];
    for &i in &idx[..n_requests] {
        is_request[i] = true;
    }
    let (req, rides): (Vec<_>, Vec<_>) = trips.iter().cloned().zip(is_request).partition(|(_, r)| *r);
    Ok((req.into_iter().map(|(t, _)| t).collect(), rides.into_iter().map(|(t, _)| t).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> ScaleContext {
        ScaleContext::new((0.0, 20_000.0), (0.0, 20_000.0), (0.0, 3600.0)).unwrap()
    }

    fn trip(id: &str, o: (f64, f64, f64), d: (f64, f64, f64)) -> Trip {
        Trip::new(id, vec![Waypoint::new(o.0, o.1, o.2), Waypoint::new(d.0, d.1, d.2)]).unwrap()
    }

    fn prep(t: &Trip) -> PreparedTrip {
        PreparedTrip::new(t, &ctx(), Representation::Od).unwrap()
    }

    fn scenario(mode: Mode) -> MatchScenario {
        MatchScenario::new(mode, &ctx()).unwrap()
    }

    #[test]
    fn candidate_filter_examples() {
        let req = prep(&trip("r", (1000.0, 1000.0, 100.0), (8000.0, 8000.0, 1000.0)));
        let s = scenario(Mode::Car);
        assert_eq!(feasible_candidates(&req, std::slice::from_ref(&req), &s), vec![0]);

        let far = prep(&trip("f", (3000.0, 1000.0, 200.0), (8000.0, 8000.0, 900.0)));
        assert!(feasible_candidates(&req, &[far], &s).is_empty());

        let early = prep(&trip("e", (1000.0, 1000.0, 50.0), (8000.0, 8000.0, 900.0)));
        assert!(feasible_candidates(&req, std::slice::from_ref(&early), &s).is_empty());
        // the mirrored order holds for carpool only if the ride also ends later
        let cp = scenario(Mode::Carpool);
        assert!(feasible_candidates(&req, &[early], &cp).is_empty());
        let wraps = prep(&trip("w", (1000.0, 1000.0, 50.0), (8000.0, 8000.0, 1100.0)));
        assert_eq!(feasible_candidates(&req, &[wraps], &cp), vec![0]);
    }

    #[test]
    fn single_match_reports_offsets() {
        let req = prep(&trip("r", (1000.0, 1000.0, 100.0), (8000.0, 8000.0, 1000.0)));
        let ride = prep(&trip("a", (1300.0, 1400.0, 160.0), (8000.0, 8600.0, 950.0)));
        let rep = greedy_match(&[req], std::slice::from_ref(&ride), &scenario(Mode::Car)).unwrap();
        let m = rep.rows[0].matched.as_ref().unwrap();
        assert_eq!(m.ride_id, "a");
        assert!((m.oo_dist_m - 500.0).abs() < 1e-9);
        assert!((m.dd_dist_m - 600.0).abs() < 1e-9);
        assert_eq!((m.oo_time_s, m.dd_time_s), (60.0, 50.0));
        assert_eq!(rep.aggregates.n_matched, 1);
        assert!((rep.aggregates.match_travels_km - ride.travel / 1000.0).abs() < 1e-12);
    }

    #[test]
    fn unmatched_request_is_excluded_from_matched_totals() {
        let req = prep(&trip("r", (1000.0, 1000.0, 100.0), (8000.0, 8000.0, 1000.0)));
        let rep = greedy_match(std::slice::from_ref(&req), &[], &scenario(Mode::Car)).unwrap();
        assert!(rep.rows[0].matched.is_none());
        assert_eq!(rep.aggregates.n_matched, 0);
        assert_eq!(rep.aggregates.req_travels_matched_km, 0.0);
        assert_eq!(rep.aggregates.savings_pct, Some(0.0));
        assert!((rep.aggregates.req_travels_km - req.travel / 1000.0).abs() < 1e-12);
    }

    #[test]
    fn ties_prefer_lowest_ride_id() {
        let req = prep(&trip("r", (1000.0, 1000.0, 100.0), (8000.0, 8000.0, 1000.0)));
        let twin_b = prep(&trip("b", (1100.0, 1000.0, 200.0), (8000.0, 8000.0, 900.0)));
        let mut twin_a = twin_b.clone();
        twin_a.id = "a".into();
        for metric in Metric::ALL {
            let mut s = scenario(Mode::Car);
            s.metric = metric;
            let rep = greedy_match(std::slice::from_ref(&req), &[twin_b.clone(), twin_a.clone()], &s).unwrap();
            assert_eq!(rep.rows[0].matched.as_ref().unwrap().ride_id, "a", "{metric}");
        }
    }

    #[test]
    fn savings_on_reference_totals() {
        let car = TravelTotals {
            req_travels: 8633.831,
            match_travels: 4356.368,
            req_travels_matched: 5235.319,
            oo_dist: 1017.665,
            dd_dist: 1045.912,
        };
        let s = savings_accounting(&car, Mode::Car).unwrap();
        assert!((100.0 * s - 40.3).abs() < 0.1, "{s}");

        let cp = TravelTotals {
            req_travels: 8633.8,
            match_travels: 5486.8,
            req_travels_matched: 4938.073,
            oo_dist: 948.4,
            dd_dist: 1019.5,
        };
        let s = savings_accounting(&cp, Mode::Carpool).unwrap();
        assert!((100.0 * s - 24.92).abs() < 0.01, "{s}");

        let empty = TravelTotals { req_travels: 0.0, match_travels: 0.0, req_travels_matched: 0.0, oo_dist: 0.0, dd_dist: 0.0 };
        assert!(matches!(savings_accounting(&empty, Mode::Car), Err(Error::UndefinedReport(_))));
    }

    #[test]
    fn curve_single_feasible_ride() {
        let req = prep(&trip("r", (1000.0, 1000.0, 100.0), (8000.0, 8000.0, 1000.0)));
        let ride = prep(&trip("a", (1100.0, 1000.0, 200.0), (8000.0, 8000.0, 900.0)));
        let pts = match_counts_curve(&[req], &[ride], &scenario(Mode::Car), SweepKind::Distance, &[1800.0], &[1, 2]);
        assert_eq!(pts[0].requests, 1);
        assert_eq!(pts[1].requests, 0);
    }

    #[test]
    fn split_is_seeded_and_disjoint() {
        let trips: Vec<Trip> = (0..20)
            .map(|i| trip(&format!("t{i:02}"), (0.0, 0.0, i as f64), (1.0, 1.0, 100.0 + i as f64)))
            .collect();
        let (a, b) = split_requests(&trips, 5, 3).unwrap();
        assert_eq!((a.len(), b.len()), (5, 15));
        assert_eq!(split_requests(&trips, 5, 3).unwrap().0, a);
        assert!(a.iter().all(|t| !b.contains(t)));
        assert!(split_requests(&trips, 21, 3).is_err());
    }

    #[test]
    fn compare_rejects_mixed_lengths() {
        let req = prep(&trip("r", (1000.0, 1000.0, 100.0), (8000.0, 8000.0, 1000.0)));
        let mut long = req.clone();
        long.points.push(long.points[1]);
        assert!(compare_metrics(&[req], &[long], &Metric::ALL, &scenario(Mode::Car)).is_err());
    }
}
