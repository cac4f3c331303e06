//! Trajectory similarity and distance measures over scaled point sequences.
//!
//! The weighted-geometric-mean score combines a spatial similarity
//! `1/(1+d)` and a temporal similarity `1/(1+τ)` per point pair:
//!
//! ```text
//! psim(p, q) = exp[(w_s·ln(1/(1+d)) + w_t·ln(1/(1+τ))) / (w_s + w_t)]
//! sim(a, b)  = mean_i psim(a_i, b_i)
//! ```
//!
//! It is linear in the number of points. LCSS, DTW and discrete Fréchet are
//! quadratic dynamic programs and exist for comparison.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trip::{ScaleContext, ScaledPoint};

/// Evaluation counters, per thread.
pub mod counters {
    use std::cell::Cell;

    thread_local! {
        static PSIM: Cell<u64> = const { Cell::new(0) };
        static DP_CELLS: Cell<u64> = const { Cell::new(0) };
    }

    pub(crate) fn count_psim() {
        PSIM.with(|c| c.set(c.get() + 1));
    }

    pub(crate) fn count_cells(n: u64) {
        DP_CELLS.with(|c| c.set(c.get() + n));
    }

    /// Point-similarity evaluations on this thread since the last [`reset`].
    pub fn psim_evaluations() -> u64 {
        PSIM.with(Cell::get)
    }

    /// Dynamic-programming table cells filled on this thread since the last [`reset`].
    pub fn dp_cells() -> u64 {
        DP_CELLS.with(Cell::get)
    }

    pub fn reset() {
        PSIM.with(|c| c.set(0));
        DP_CELLS.with(|c| c.set(0));
    }
}

/// Spatial and temporal weights of the geometric mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WgmWeights {
    pub space: f64,
    pub time: f64,
}

impl WgmWeights {
    pub fn new(space: f64, time: f64) -> Result<Self> {
        let ok = space.is_finite() && time.is_finite() && space >= 0.0 && time >= 0.0;
        if !ok || space + time <= 0.0 {
            return Err(Error::invalid(format!(
                "weights ({space}, {time}) must be nonnegative with a positive sum"
            )));
        }
        Ok(WgmWeights { space, time })
    }

    /// Time-dominated weights used by the `wgm_time` metric.
    pub fn time_heavy() -> Self {
        WgmWeights { space: 0.1, time: 0.9 }
    }
}

impl Default for WgmWeights {
    fn default() -> Self {
        WgmWeights { space: 0.6, time: 0.4 }
    }
}

/// How the time term of a point pair is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeMode {
    /// `|t1 − t2|` everywhere.
    Absolute,
    /// Catch-a-Ride: the second trip should start after and end before the first.
    SignedCar,
    /// CarPool: the transpose of [`TimeMode::SignedCar`].
    SignedCp,
}

/// Position of a point pair within the compared sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Origin,
    Destination,
    Interior,
}

impl Role {
    pub fn at(i: usize, n: usize) -> Role {
        if i == 0 {
            Role::Origin
        } else if i + 1 == n {
            Role::Destination
        } else {
            Role::Interior
        }
    }
}

/// Signed time term; negative values mean the pair is in the wrong temporal order.
pub fn time_term(p1: &ScaledPoint, p2: &ScaledPoint, mode: TimeMode, role: Role) -> f64 {
    let forward = p2.t - p1.t;
    match (mode, role) {
        (TimeMode::Absolute, _) | (_, Role::Interior) => forward.abs(),
        (TimeMode::SignedCar, Role::Origin) | (TimeMode::SignedCp, Role::Destination) => forward,
        (TimeMode::SignedCar, Role::Destination) | (TimeMode::SignedCp, Role::Origin) => -forward,
    }
}

/// A score plus whether every signed time term had the required sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scored {
    pub value: f64,
    pub feasible: bool,
}

/// Point similarity in `(0, 1]`. Negative signed time terms are clipped to zero;
/// use [`psim_scored`] to see the feasibility flag.
pub fn psim(p1: &ScaledPoint, p2: &ScaledPoint, w: WgmWeights, mode: TimeMode, role: Role) -> f64 {
    psim_scored(p1, p2, w, mode, role).value
}

pub fn psim_scored(
    p1: &ScaledPoint,
    p2: &ScaledPoint,
    w: WgmWeights,
    mode: TimeMode,
    role: Role,
) -> Scored {
    counters::count_psim();
    let d = p1.spatial_distance(p2);
    let tau = time_term(p1, p2, mode, role);
    Scored {
        value: wgm_point(d, tau.max(0.0), w),
        feasible: tau >= 0.0,
    }
}

/// Closed form of the point score for spatial distance `d` and time gap `tau`.
pub fn wgm_point(d: f64, tau: f64, w: WgmWeights) -> f64 {
    (-(w.space * d.ln_1p() + w.time * tau.ln_1p()) / (w.space + w.time)).exp()
}

/// Mean point similarity of two equal-length sequences; exactly `n` point evaluations.
pub fn wgm_sim(t1: &[ScaledPoint], t2: &[ScaledPoint], w: WgmWeights, mode: TimeMode) -> Result<f64> {
    wgm_sim_scored(t1, t2, w, mode).map(|s| s.value)
}

pub fn wgm_sim_scored(
    t1: &[ScaledPoint],
    t2: &[ScaledPoint],
    w: WgmWeights,
    mode: TimeMode,
) -> Result<Scored> {
    if t1.len() != t2.len() {
        return Err(Error::invalid(format!(
            "sequence lengths differ: {} vs {}",
            t1.len(),
            t2.len()
        )));
    }
    if t1.is_empty() {
        return Err(Error::invalid("empty sequences"));
    }
    let n = t1.len();
    let mut sum = 0.0;
    let mut feasible = true;
    for (i, (p, q)) in t1.iter().zip(t2).enumerate() {
        let s = psim_scored(p, q, w, mode, Role::at(i, n));
        sum += s.value;
        feasible &= s.feasible;
    }
    Ok(Scored {
        value: sum / n as f64,
        feasible,
    })
}

/// Catch-a-Ride score of `ride` for `rider`: the ride should start no earlier and
/// end no later than the rider.
pub fn car_score(rider: &[ScaledPoint], ride: &[ScaledPoint], w: WgmWeights) -> Result<Scored> {
    wgm_sim_scored(rider, ride, w, TimeMode::SignedCar)
}

/// CarPool score; `cp_score(a, b) == car_score(b, a)`.
pub fn cp_score(a: &[ScaledPoint], b: &[ScaledPoint], w: WgmWeights) -> Result<Scored> {
    car_score(b, a, w)
}

/// Laplacian kernel `exp(−γ(1 − score))`, used to spread score distributions.
pub fn laplacian_kernel(score: f64, gamma: f64) -> f64 {
    (-gamma * (1.0 - score)).exp()
}

pub const DEFAULT_KERNEL_GAMMA: f64 = 3.0;

/// Matching thresholds for LCSS, in scaled units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricParams {
    pub eps_space: f64,
    pub eps_time: f64,
}

impl MetricParams {
    pub fn new(eps_space: f64, eps_time: f64) -> Result<Self> {
        if !(eps_space > 0.0 && eps_time > 0.0) {
            return Err(Error::invalid("LCSS thresholds must be positive"));
        }
        Ok(MetricParams { eps_space, eps_time })
    }

    /// Thresholds given in meters and seconds, converted through `ctx`.
    pub fn from_raw(ctx: &ScaleContext, meters: f64, seconds: f64) -> Result<Self> {
        MetricParams::new(ctx.scaled_distance(meters), ctx.scaled_duration(seconds))
    }
}

/// Per-cell cost of DTW.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DtwCost {
    Distance,
    DistanceTimesTime,
}

impl DtwCost {
    fn cost(self, p: &ScaledPoint, q: &ScaledPoint) -> f64 {
        match self {
            DtwCost::Distance => p.spatial_distance(q),
            DtwCost::DistanceTimesTime => p.spatial_distance(q) * p.time_gap(q),
        }
    }
}

fn lcss_match(p: &ScaledPoint, q: &ScaledPoint, params: &MetricParams) -> bool {
    p.spatial_distance(q) <= params.eps_space && p.time_gap(q) <= params.eps_time
}

/// Longest common subsequence under spatial and temporal thresholds.
pub fn lcss(t1: &[ScaledPoint], t2: &[ScaledPoint], params: &MetricParams) -> usize {
    let (m, n) = (t1.len(), t2.len());
    let mut prev = vec![0usize; n + 1];
    let mut cur = vec![0usize; n + 1];
    for p in t1 {
        for (j, q) in t2.iter().enumerate() {
            cur[j + 1] = if lcss_match(p, q, params) {
                prev[j] + 1
            } else {
                prev[j + 1].max(cur[j])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    counters::count_cells((m * n) as u64);
    prev[n]
}

fn check_nonempty(t1: &[ScaledPoint], t2: &[ScaledPoint]) -> Result<()> {
    if t1.is_empty() || t2.is_empty() {
        return Err(Error::invalid("empty sequence"));
    }
    Ok(())
}

/// Dynamic time warping without a window constraint.
pub fn dtw(t1: &[ScaledPoint], t2: &[ScaledPoint], cost: DtwCost) -> Result<f64> {
    check_nonempty(t1, t2)?;
    let n = t2.len();
    let mut prev = vec![f64::INFINITY; n + 1];
    let mut cur = vec![f64::INFINITY; n + 1];
    prev[0] = 0.0;
    for p in t1 {
        cur[0] = f64::INFINITY;
        for (j, q) in t2.iter().enumerate() {
            let best = prev[j].min(prev[j + 1]).min(cur[j]);
            cur[j + 1] = cost.cost(p, q) + best;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    counters::count_cells((t1.len() * n) as u64);
    Ok(prev[n])
}

/// Discrete Fréchet distance over the spatial coordinates.
pub fn frechet_discrete(t1: &[ScaledPoint], t2: &[ScaledPoint]) -> Result<f64> {
    check_nonempty(t1, t2)?;
    let n = t2.len();
    let mut prev = vec![f64::INFINITY; n + 1];
    let mut cur = vec![f64::INFINITY; n + 1];
    prev[0] = f64::NEG_INFINITY;
    for p in t1 {
        cur[0] = f64::INFINITY;
        for (j, q) in t2.iter().enumerate() {
            let reach = prev[j].min(prev[j + 1]).min(cur[j]);
            cur[j + 1] = p.spatial_distance(q).max(reach);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    counters::count_cells((t1.len() * n) as u64);
    Ok(prev[n])
}

/// Whether larger metric values mean more alike.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Similarity,
    Distance,
}

/// Named trajectory comparison metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Wgm,
    WgmTime,
    Lcss,
    Dtw,
    DtwTime,
    Frechet,
}

impl Metric {
    pub const ALL: [Metric; 6] = [
        Metric::Wgm,
        Metric::Lcss,
        Metric::Frechet,
        Metric::Dtw,
        Metric::DtwTime,
        Metric::WgmTime,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Metric::Wgm => "wgm",
            Metric::WgmTime => "wgm_time",
            Metric::Lcss => "lcss",
            Metric::Dtw => "dtw",
            Metric::DtwTime => "dtw_time",
            Metric::Frechet => "frechet",
        }
    }

    pub fn sense(&self) -> Sense {
        match self {
            Metric::Wgm | Metric::WgmTime | Metric::Lcss => Sense::Similarity,
            Metric::Dtw | Metric::DtwTime | Metric::Frechet => Sense::Distance,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown metric `{s}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sp(x: f64, y: f64, t: f64) -> ScaledPoint {
        ScaledPoint::new(x, y, t)
    }

    const W: WgmWeights = WgmWeights { space: 0.6, time: 0.4 };

    #[test]
    fn psim_examples() {
        let p = sp(0.2, 0.3, 0.4);
        assert_eq!(psim(&p, &p, W, TimeMode::Absolute, Role::Interior), 1.0);
        let q = sp(1.2, 0.3, 1.4);
        for w in [W, WgmWeights::new(3.0, 0.1).unwrap()] {
            let v = psim(&p, &q, w, TimeMode::Absolute, Role::Interior);
            assert!((v - 0.5).abs() < 1e-12);
        }
        let r = sp(3.2, 0.3, 0.9);
        let v = psim(&p, &r, WgmWeights::new(1.0, 0.0).unwrap(), TimeMode::Absolute, Role::Origin);
        assert!((v - 0.25).abs() < 1e-12);
        // d = 1, τ = 0: 0.5^0.6, evaluated at 30 digits
        let s = sp(1.2, 0.3, 0.4);
        let v = psim(&p, &s, W, TimeMode::Absolute, Role::Origin);
        assert!((v - 0.659_753_955_386_447_1).abs() < 1e-12);
    }

    #[test]
    fn weights_validation() {
        assert!(WgmWeights::new(0.0, 0.0).is_err());
        assert!(WgmWeights::new(-1.0, 2.0).is_err());
        assert!(WgmWeights::new(0.0, 1.0).is_ok());
    }

    #[test]
    fn signed_modes() {
        let a = sp(0.0, 0.0, 0.2);
        let b = sp(0.0, 0.0, 0.5);
        assert_eq!(time_term(&a, &b, TimeMode::SignedCar, Role::Origin), 0.3);
        assert_eq!(time_term(&a, &b, TimeMode::SignedCar, Role::Destination), -0.3);
        assert_eq!(time_term(&a, &b, TimeMode::SignedCp, Role::Origin), -0.3);
        assert_eq!(time_term(&a, &b, TimeMode::SignedCp, Role::Interior), 0.3);
        let s = psim_scored(&a, &b, W, TimeMode::SignedCar, Role::Destination);
        assert!(!s.feasible);
        assert_eq!(s.value, 1.0);
    }

    #[test]
    fn wgm_sim_examples() {
        let t: Vec<ScaledPoint> = (0..5).map(|i| sp(i as f64 * 0.1, 0.5, i as f64 * 0.2)).collect();
        assert_eq!(wgm_sim(&t, &t, W, TimeMode::Absolute).unwrap(), 1.0);

        let a = [sp(0.0, 0.0, 0.0), sp(0.0, 0.0, 0.0)];
        let b = [sp(0.0, 0.0, 0.0), sp(1.0, 0.0, 1.0)];
        assert!((wgm_sim(&a, &b, W, TimeMode::Absolute).unwrap() - 0.75).abs() < 1e-12);
        assert!(wgm_sim(&a, &t, W, TimeMode::Absolute).is_err());
    }

    #[test]
    fn wgm_counts_one_psim_per_point() {
        let t: Vec<ScaledPoint> = (0..50).map(|i| sp(0.0, 0.0, i as f64 / 50.0)).collect();
        counters::reset();
        wgm_sim(&t, &t, W, TimeMode::SignedCar).unwrap();
        assert_eq!(counters::psim_evaluations(), 50);
    }

    #[test]
    fn car_score_examples() {
        let rider = [sp(0.0, 0.0, 0.0), sp(1.0, 0.0, 0.5)];
        let s = car_score(&rider, &rider, W).unwrap();
        assert_eq!(s.value, 1.0);
        assert!(s.feasible);

        let ride = [sp(0.0, 0.0, 0.1), sp(1.0, 0.0, 0.4)];
        let s = car_score(&rider, &ride, W).unwrap();
        let expected = (0.4 * (1.0f64 / 1.1).ln()).exp();
        assert!((s.value - expected).abs() < 1e-12);
        assert!((s.value - 0.9626).abs() < 1e-4);
        assert!(s.feasible);

        let early = [sp(0.0, 0.0, 0.0), sp(1.0, 0.0, 0.4)];
        assert!(car_score(&ride, &early, W).map(|s| !s.feasible).unwrap());
    }

    #[test]
    fn cp_is_transposed_car() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let a: Vec<ScaledPoint> = (0..3).map(|_| sp(rng.random(), rng.random(), rng.random())).collect();
            let b: Vec<ScaledPoint> = (0..3).map(|_| sp(rng.random(), rng.random(), rng.random())).collect();
            assert_eq!(cp_score(&a, &b, W).unwrap(), car_score(&b, &a, W).unwrap());
        }
    }

    #[test]
    fn laplacian_kernel_examples() {
        assert_eq!(laplacian_kernel(1.0, 3.0), 1.0);
        assert!((laplacian_kernel(0.0, 1.0) - (-1f64).exp()).abs() < 1e-15);
        let scores = [0.1, 0.35, 0.5, 0.9, 0.99];
        let k: Vec<f64> = scores.iter().map(|&s| laplacian_kernel(s, 3.0)).collect();
        assert!(k.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn metric_names_round_trip() {
        for m in Metric::ALL {
            assert_eq!(m.name().parse::<Metric>().unwrap(), m);
        }
        assert!("edit".parse::<Metric>().is_err());
    }

    fn seq(rng: &mut ChaCha8Rng, len: usize) -> Vec<ScaledPoint> {
        (0..len).map(|_| sp(rng.random(), rng.random(), rng.random())).collect()
    }

    // Plain recursions over the definitions.
    fn lcss_rec(a: &[ScaledPoint], b: &[ScaledPoint], p: &MetricParams) -> usize {
        match (a.split_last(), b.split_last()) {
            (Some((x, ra)), Some((y, rb))) => {
                if lcss_match(x, y, p) {
                    1 + lcss_rec(ra, rb, p)
                } else {
                    lcss_rec(ra, b, p).max(lcss_rec(a, rb, p))
                }
            }
            _ => 0,
        }
    }

    fn dtw_rec(a: &[ScaledPoint], b: &[ScaledPoint], cost: DtwCost) -> f64 {
        let (i, j) = (a.len(), b.len());
        let c = cost.cost(&a[i - 1], &b[j - 1]);
        if i == 1 && j == 1 {
            return c;
        }
        let mut best = f64::INFINITY;
        if i > 1 {
            best = best.min(dtw_rec(&a[..i - 1], b, cost));
        }
        if j > 1 {
            best = best.min(dtw_rec(a, &b[..j - 1], cost));
        }
        if i > 1 && j > 1 {
            best = best.min(dtw_rec(&a[..i - 1], &b[..j - 1], cost));
        }
        c + best
    }

    fn frechet_rec(a: &[ScaledPoint], b: &[ScaledPoint]) -> f64 {
        let (i, j) = (a.len(), b.len());
        let d = a[i - 1].spatial_distance(&b[j - 1]);
        if i == 1 && j == 1 {
            return d;
        }
        let mut best = f64::INFINITY;
        if i > 1 {
            best = best.min(frechet_rec(&a[..i - 1], b));
        }
        if j > 1 {
            best = best.min(frechet_rec(a, &b[..j - 1]));
        }
        if i > 1 && j > 1 {
            best = best.min(frechet_rec(&a[..i - 1], &b[..j - 1]));
        }
        d.max(best)
    }

    #[test]
    fn dp_metrics_match_recursions() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let params = MetricParams::new(0.3, 0.3).unwrap();
        for _ in 0..200 {
            let m = rng.random_range(1..=6);
            let n = rng.random_range(1..=6);
            let a = seq(&mut rng, m);
            let b = seq(&mut rng, n);
            assert_eq!(lcss(&a, &b, &params), lcss_rec(&a, &b, &params));
            for cost in [DtwCost::Distance, DtwCost::DistanceTimesTime] {
                let got = dtw(&a, &b, cost).unwrap();
                assert!((got - dtw_rec(&a, &b, cost)).abs() <= 1e-12);
            }
            assert_eq!(frechet_discrete(&a, &b).unwrap(), frechet_rec(&a, &b));
        }
    }

    #[test]
    fn dp_examples() {
        let a: Vec<ScaledPoint> = (0..5).map(|i| sp(i as f64 * 0.1, 0.1, i as f64 * 0.1)).collect();
        let params = MetricParams::new(0.01, 0.01).unwrap();
        assert_eq!(lcss(&a, &a, &params), 5);
        let far: Vec<ScaledPoint> = a.iter().map(|p| sp(p.x, p.y + 0.8, p.t)).collect();
        assert_eq!(lcss(&a, &far, &params), 0);
        assert_eq!(lcss(&a, &[], &params), 0);

        assert_eq!(dtw(&a, &a, DtwCost::Distance).unwrap(), 0.0);
        let (p, q) = (sp(0.0, 0.0, 0.0), sp(0.3, 0.4, 0.5));
        assert!((dtw(&[p], &[q], DtwCost::Distance).unwrap() - 0.5).abs() < 1e-15);
        assert!((dtw(&[p], &[q], DtwCost::DistanceTimesTime).unwrap() - 0.25).abs() < 1e-15);
        assert!(dtw(&[], &[q], DtwCost::Distance).is_err());

        assert_eq!(frechet_discrete(&a, &a).unwrap(), 0.0);
        let shifted: Vec<ScaledPoint> = a.iter().map(|p| sp(p.x, p.y + 0.2, p.t)).collect();
        assert!((frechet_discrete(&a, &shifted).unwrap() - 0.2).abs() < 1e-12);
        assert!(frechet_discrete(&a, &[]).is_err());
    }

    #[test]
    fn dp_cell_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = seq(&mut rng, 7);
        let b = seq(&mut rng, 4);
        let params = MetricParams::new(0.1, 0.1).unwrap();
        counters::reset();
        lcss(&a, &b, &params);
        assert_eq!(counters::dp_cells(), 28);
        dtw(&a, &b, DtwCost::Distance).unwrap();
        frechet_discrete(&a, &b).unwrap();
        assert_eq!(counters::dp_cells(), 84);
    }

    fn point() -> impl Strategy<Value = ScaledPoint> {
        (0f64..=1.0, 0f64..=1.0, 0f64..=1.0).prop_map(|(x, y, t)| sp(x, y, t))
    }

    proptest! {
        #[test]
        fn psim_in_unit_interval_and_symmetric(a in point(), b in point(), ws in 0.01f64..5.0, wt in 0.01f64..5.0) {
            let w = WgmWeights::new(ws, wt).unwrap();
            let ab = psim(&a, &b, w, TimeMode::Absolute, Role::Interior);
            let ba = psim(&b, &a, w, TimeMode::Absolute, Role::Interior);
            prop_assert!(ab > 0.0 && ab <= 1.0);
            prop_assert_eq!(ab, ba);
        }

        #[test]
        fn psim_scale_invariant_in_weights(a in point(), b in point(), ws in 0.0f64..5.0, wt in 0.01f64..5.0, c in 0.01f64..100.0) {
            let w = WgmWeights::new(ws, wt).unwrap();
            let wc = WgmWeights::new(ws * c, wt * c).unwrap();
            let x = psim(&a, &b, w, TimeMode::Absolute, Role::Origin);
            let y = psim(&a, &b, wc, TimeMode::Absolute, Role::Origin);
            prop_assert!((x - y).abs() <= 1e-12);
        }

        #[test]
        fn psim_nonincreasing(d in 0f64..2.0, dd in 0f64..1.0, tau in 0f64..1.0, dt in 0f64..1.0) {
            let w = W;
            prop_assert!(wgm_point(d + dd, tau, w) <= wgm_point(d, tau, w));
            prop_assert!(wgm_point(d, tau + dt, w) <= wgm_point(d, tau, w));
        }
    }
}
