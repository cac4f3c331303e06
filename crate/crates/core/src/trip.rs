//! Trip representations, coordinate scaling and waypoint sampling.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One spatio-temporal sample of a trip, in planar meters and seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Waypoint {
    pub x: f64,
    pub y: f64,
    pub t: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub speed: Option<f64>,
}

impl Waypoint {
    pub fn new(x: f64, y: f64, t: f64) -> Self {
        Waypoint { x, y, t, speed: None }
    }

    pub fn with_speed(mut self, speed: f64) -> Self {
        self.speed = Some(speed);
        self
    }

    /// Planar Euclidean distance in meters.
    pub fn distance(&self, other: &Waypoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    fn is_valid(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.t.is_finite() && self.t >= 0.0
    }
}

/// An identified, time-ordered sequence of waypoints.
///
/// Always holds at least one waypoint, so origin and destination exist.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trip {
    id: String,
    waypoints: Vec<Waypoint>,
}

impl Trip {
    /// Builds a trip from waypoints already sorted by time.
    pub fn new(id: impl Into<String>, waypoints: Vec<Waypoint>) -> Result<Self> {
        let id = id.into();
        if waypoints.is_empty() {
            return Err(Error::invalid(format!("trip {id} has no waypoints")));
        }
        if let Some(bad) = waypoints.iter().position(|w| !w.is_valid()) {
            return Err(Error::invalid(format!(
                "trip {id}: waypoint {bad} is not finite or has negative time"
            )));
        }
        if waypoints.windows(2).any(|w| w[1].t < w[0].t) {
            return Err(Error::invalid(format!(
                "trip {id}: waypoints are not sorted by time"
            )));
        }
        Ok(Trip { id, waypoints })
    }

    /// Builds a trip, stable-sorting the waypoints by time first.
    pub fn from_unsorted(id: impl Into<String>, mut waypoints: Vec<Waypoint>) -> Result<Self> {
        waypoints.sort_by(|a, b| a.t.total_cmp(&b.t));
        Trip::new(id, waypoints)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn waypoints(&self) -> &[Waypoint] {
        &self.waypoints
    }

    pub fn len(&self) -> usize {
        self.waypoints.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn origin(&self) -> &Waypoint {
        &self.waypoints[0]
    }

    pub fn destination(&self) -> &Waypoint {
        &self.waypoints[self.waypoints.len() - 1]
    }

    pub fn start_time(&self) -> f64 {
        self.origin().t
    }

    pub fn end_time(&self) -> f64 {
        self.destination().t
    }

    pub fn duration(&self) -> f64 {
        self.end_time() - self.start_time()
    }

    /// Traveled distance: sum of consecutive waypoint distances, in meters.
    pub fn path_length(&self) -> f64 {
        self.waypoints.windows(2).map(|w| w[0].distance(&w[1])).sum()
    }

    /// Straight-line origin-destination displacement, in meters.
    pub fn od_displacement(&self) -> f64 {
        self.origin().distance(self.destination())
    }
}

/// First and last waypoints of a trip.
pub fn extract_od(trip: &Trip) -> (Waypoint, Waypoint) {
    (*trip.origin(), *trip.destination())
}

/// Keeps the waypoints at indices `round(i·(n−1)/(k−1))`, `i = 0..k`.
///
/// Trips with `n <= k` are returned unchanged.
pub fn sample_waypoints(trip: &Trip, k: usize) -> Result<Trip> {
    if k < 2 {
        return Err(Error::invalid(format!("sample size must be >= 2, got {k}")));
    }
    let n = trip.len();
    if n <= k {
        return Ok(trip.clone());
    }
    let waypoints = sample_indices(n, k)
        .into_iter()
        .map(|i| trip.waypoints[i])
        .collect();
    Ok(Trip {
        id: trip.id.clone(),
        waypoints,
    })
}

/// Index selection used by [`sample_waypoints`], rounding halves up.
pub fn sample_indices(n: usize, k: usize) -> Vec<usize> {
    debug_assert!(k >= 2 && n >= k);
    let (num, den) = (n - 1, k - 1);
    (0..k).map(|i| (2 * i * num + den) / (2 * den)).collect()
}

/// A point mapped into the unit cube.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledPoint {
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

impl ScaledPoint {
    pub fn new(x: f64, y: f64, t: f64) -> Self {
        ScaledPoint { x, y, t }
    }

    pub fn spatial_distance(&self, other: &ScaledPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn time_gap(&self, other: &ScaledPoint) -> f64 {
        (self.t - other.t).abs()
    }
}

/// Bounds mapping raw coordinates and times into `[0,1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleContext {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub t_min: f64,
    pub t_max: f64,
}

impl ScaleContext {
    pub fn new(x: (f64, f64), y: (f64, f64), t: (f64, f64)) -> Result<Self> {
        let ctx = ScaleContext {
            x_min: x.0,
            x_max: x.1,
            y_min: y.0,
            y_max: y.1,
            t_min: t.0,
            t_max: t.1,
        };
        ctx.validate()?;
        Ok(ctx)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, lo, hi) in [
            ("x", self.x_min, self.x_max),
            ("y", self.y_min, self.y_max),
            ("t", self.t_min, self.t_max),
        ] {
            if !(lo.is_finite() && hi.is_finite() && hi > lo) {
                return Err(Error::invalid(format!(
                    "degenerate {name} bounds [{lo}, {hi}]"
                )));
            }
        }
        Ok(())
    }

    /// Tight bounds over every waypoint of `trips`.
    pub fn from_trips<'a, I>(trips: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Trip>,
    {
        let mut ctx = ScaleContext {
            x_min: f64::INFINITY,
            x_max: f64::NEG_INFINITY,
            y_min: f64::INFINITY,
            y_max: f64::NEG_INFINITY,
            t_min: f64::INFINITY,
            t_max: f64::NEG_INFINITY,
        };
        for w in trips.into_iter().flat_map(|t| t.waypoints()) {
            ctx.x_min = ctx.x_min.min(w.x);
            ctx.x_max = ctx.x_max.max(w.x);
            ctx.y_min = ctx.y_min.min(w.y);
            ctx.y_max = ctx.y_max.max(w.y);
            ctx.t_min = ctx.t_min.min(w.t);
            ctx.t_max = ctx.t_max.max(w.t);
        }
        ctx.validate()?;
        Ok(ctx)
    }

    pub fn x_span(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn y_span(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn t_span(&self) -> f64 {
        self.t_max - self.t_min
    }

    pub fn diagonal(&self) -> f64 {
        self.x_span().hypot(self.y_span())
    }

    /// Scales one waypoint; the flag reports whether any component was clamped.
    pub fn scale(&self, p: &Waypoint) -> (ScaledPoint, bool) {
        let (x, cx) = clamp_unit((p.x - self.x_min) / self.x_span());
        let (y, cy) = clamp_unit((p.y - self.y_min) / self.y_span());
        let (t, ct) = clamp_unit((p.t - self.t_min) / self.t_span());
        (ScaledPoint { x, y, t }, cx || cy || ct)
    }

    /// Scales a sequence, returning the number of clamped points.
    pub fn scale_all(&self, points: &[Waypoint]) -> (Vec<ScaledPoint>, usize) {
        let mut clamped = 0;
        let scaled = points
            .iter()
            .map(|p| {
                let (s, c) = self.scale(p);
                clamped += c as usize;
                s
            })
            .collect();
        (scaled, clamped)
    }

    pub fn unscale(&self, p: &ScaledPoint) -> Waypoint {
        Waypoint::new(
            self.x_min + p.x * self.x_span(),
            self.y_min + p.y * self.y_span(),
            self.t_min + p.t * self.t_span(),
        )
    }

    /// Converts a raw distance in meters to the scaled plane, using the mean axis span.
    pub fn scaled_distance(&self, meters: f64) -> f64 {
        meters / (0.5 * (self.x_span() + self.y_span()))
    }

    pub fn scaled_duration(&self, seconds: f64) -> f64 {
        seconds / self.t_span()
    }
}

fn clamp_unit(v: f64) -> (f64, bool) {
    if v < 0.0 {
        (0.0, true)
    } else if v > 1.0 {
        (1.0, true)
    } else {
        (v, false)
    }
}
