//! Trace parsing, time windows, trip assembly and synthetic trip sets.

use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, LogNormal, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trip::{ScaleContext, Trip, Waypoint};

/// One line of a vehicle trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub t: f64,
    pub id: String,
    pub x: f64,
    pub y: f64,
    pub speed: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Column {
    Time,
    Id,
    X,
    Y,
    Speed,
    Ignore,
}

/// Column layout of a whitespace-separated trace, e.g. `"t id x y speed"`.
///
/// Unknown column names (conventionally `_`) are skipped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceFormat {
    columns: Vec<Column>,
}

impl Default for TraceFormat {
    fn default() -> Self {
        "t id x y speed".parse().unwrap()
    }
}

impl FromStr for TraceFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let columns: Vec<Column> = s
            .split_whitespace()
            .map(|c| match c {
                "t" | "time" => Column::Time,
                "id" => Column::Id,
                "x" => Column::X,
                "y" => Column::Y,
                "speed" => Column::Speed,
                _ => Column::Ignore,
            })
            .collect();
        for (required, name) in [
            (Column::Time, "t"),
            (Column::Id, "id"),
            (Column::X, "x"),
            (Column::Y, "y"),
        ] {
            match columns.iter().filter(|&&c| c == required).count() {
                1 => {}
                0 => return Err(Error::invalid(format!("trace format lacks column `{name}`"))),
                _ => return Err(Error::invalid(format!("trace format repeats column `{name}`"))),
            }
        }
        Ok(TraceFormat { columns })
    }
}

impl TraceFormat {
    pub fn arity(&self) -> usize {
        self.columns.len()
    }

    fn parse_line(&self, line: &str) -> Option<TraceRecord> {
        let mut rec = TraceRecord {
            t: f64::NAN,
            id: String::new(),
            x: f64::NAN,
            y: f64::NAN,
            speed: 0.0,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != self.arity() {
            return None;
        }
        for (field, column) in fields.into_iter().zip(&self.columns) {
            match column {
                Column::Time => rec.t = field.parse().ok()?,
                Column::Id => rec.id = field.to_string(),
                Column::X => rec.x = field.parse().ok()?,
                Column::Y => rec.y = field.parse().ok()?,
                Column::Speed => rec.speed = field.parse().ok()?,
                Column::Ignore => {}
            }
        }
        let finite = rec.t.is_finite() && rec.x.is_finite() && rec.y.is_finite();
        (finite && rec.t >= 0.0).then_some(rec)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParsedTrace {
    pub records: Vec<TraceRecord>,
    /// Non-blank lines that could not be parsed.
    pub malformed: usize,
}

/// Largest tolerated share of malformed lines.
pub const MAX_MALFORMED_FRACTION: f64 = 0.10;

/// Parses a whitespace-separated trace. Blank lines and `#` comments are ignored.
pub fn parse_trace<R: BufRead>(reader: R, format: &TraceFormat) -> Result<ParsedTrace> {
    let mut parsed = ParsedTrace::default();
    let mut lines = 0usize;
    for line in reader.lines() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        lines += 1;
        match format.parse_line(trimmed) {
            Some(rec) => parsed.records.push(rec),
            None => parsed.malformed += 1,
        }
    }
    if lines > 0 && parsed.malformed as f64 > MAX_MALFORMED_FRACTION * lines as f64 {
        return Err(Error::Format(format!(
            "{} of {lines} lines are malformed",
            parsed.malformed
        )));
    }
    Ok(parsed)
}

/// Half-open interval `[start, end)` in trace seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeWindow {
    pub start: f64,
    pub end: f64,
}

impl TimeWindow {
    pub fn new(start: f64, end: f64) -> Result<Self> {
        if !(start.is_finite() && end.is_finite() && end > start) {
            return Err(Error::invalid(format!("empty time window [{start}, {end})")));
        }
        Ok(TimeWindow { start, end })
    }

    /// The one-hour window starting at `hour` o'clock.
    pub fn hour(hour: u32) -> Self {
        let start = hour as f64 * 3600.0;
        TimeWindow { start, end: start + 3600.0 }
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.start && t < self.end
    }
}

/// Groups in-window records by id into trips.
///
/// Trips come out in order of each id's first in-window record; waypoints are
/// stable-sorted by time. Records outside the window are dropped, so trips
/// crossing a window edge are clipped to it.
pub fn build_trips(records: &[TraceRecord], window: TimeWindow) -> Vec<Trip> {
    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut groups: Vec<(&str, Vec<Waypoint>)> = Vec::new();
    for rec in records.iter().filter(|r| window.contains(r.t)) {
        let slot = *index.entry(rec.id.as_str()).or_insert_with(|| {
            groups.push((rec.id.as_str(), Vec::new()));
            groups.len() - 1
        });
        groups[slot]
            .1
            .push(Waypoint::new(rec.x, rec.y, rec.t).with_speed(rec.speed));
    }
    groups
        .into_iter()
        .map(|(id, wps)| Trip::from_unsorted(id, wps).expect("parsed records are finite"))
        .collect()
}

#[derive(Serialize, Deserialize)]
struct TripLine {
    id: String,
    points: Vec<[f64; 3]>,
}

/// Writes trips as line-delimited JSON: `{"id": .., "points": [[t,x,y], ..]}`.
pub fn write_trips_jsonl<W: Write>(mut w: W, trips: &[Trip]) -> Result<()> {
    for trip in trips {
        let line = TripLine {
            id: trip.id().to_string(),
            points: trip.waypoints().iter().map(|p| [p.t, p.x, p.y]).collect(),
        };
        serde_json::to_writer(&mut w, &line).map_err(|e| Error::Format(e.to_string()))?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trips_jsonl<R: BufRead>(reader: R) -> Result<Vec<Trip>> {
    let mut trips = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: TripLine = serde_json::from_str(&line)
            .map_err(|e| Error::Format(format!("line {}: {e}", lineno + 1)))?;
        let wps = parsed
            .points
            .iter()
            .map(|&[t, x, y]| Waypoint::new(x, y, t))
            .collect();
        trips.push(Trip::new(parsed.id, wps)?);
    }
    Ok(trips)
}

/// Parameters of the synthetic trip generator.
///
/// `bbox` bounds both space and time: every waypoint lands inside it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_trips: usize,
    pub bbox: ScaleContext,
    pub duration_shape: f64,
    pub duration_scale: f64,
    pub displacement_mu: f64,
    pub displacement_sigma: f64,
    pub waypoints: usize,
    /// Standard deviation of the cross-track jitter on interior waypoints, meters.
    pub jitter: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_trips: 1000,
            bbox: ScaleContext {
                x_min: 0.0,
                x_max: 30_000.0,
                y_min: 0.0,
                y_max: 25_000.0,
                t_min: 28_800.0,
                t_max: 32_400.0,
            },
            duration_shape: 2.0,
            duration_scale: 300.0,
            displacement_mu: 3000f64.ln(),
            displacement_sigma: 0.6,
            waypoints: 50,
            jitter: 20.0,
            seed: 7,
        }
    }
}

const MAX_REDRAWS: usize = 10_000;

impl SynthConfig {
    fn validate(&self) -> Result<()> {
        self.bbox.validate()?;
        if self.n_trips == 0 {
            return Err(Error::invalid("n_trips must be >= 1"));
        }
        if self.waypoints < 2 {
            return Err(Error::invalid("synthetic trips need >= 2 waypoints"));
        }
        let positive = [
            self.duration_shape,
            self.duration_scale,
            self.displacement_sigma,
        ];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::invalid("distribution parameters must be positive"));
        }
        if !self.displacement_mu.is_finite() || !(self.jitter >= 0.0) {
            return Err(Error::invalid("invalid displacement location or jitter"));
        }
        if self.displacement_mu.exp() >= self.bbox.diagonal() {
            return Err(Error::invalid(format!(
                "median displacement {:.1} m does not fit the {:.1} m bbox diagonal",
                self.displacement_mu.exp(),
                self.bbox.diagonal()
            )));
        }
        if self.duration_shape * self.duration_scale >= self.bbox.t_span() {
            return Err(Error::invalid("mean duration does not fit the time window"));
        }
        Ok(())
    }
}

/// Generates a deterministic synthetic trip set.
///
/// Start times are uniform over the window, durations gamma-distributed and
/// OD displacements lognormal; interior waypoints follow the OD segment with
/// Gaussian cross-track jitter. Draws that cannot fit the bbox are redrawn.
pub fn generate_synthetic(cfg: &SynthConfig) -> Result<Vec<Trip>> {
    cfg.validate()?;
    let bbox = &cfg.bbox;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let durations = Gamma::new(cfg.duration_shape, cfg.duration_scale)
        .map_err(|e| Error::invalid(e.to_string()))?;
    let displacements = LogNormal::new(cfg.displacement_mu, cfg.displacement_sigma)
        .map_err(|e| Error::invalid(e.to_string()))?;
    let jitter = Normal::new(0.0, cfg.jitter).map_err(|e| Error::invalid(e.to_string()))?;
    let width = cfg.n_trips.to_string().len().max(5);

    let mut trips = Vec::with_capacity(cfg.n_trips);
    for i in 0..cfg.n_trips {
        let duration = redraw(&mut rng, |rng| {
            let d: f64 = durations.sample(rng);
            (d > 0.0 && d < bbox.t_span()).then_some(d)
        })
        .ok_or_else(|| Error::invalid("durations do not fit the time window"))?;
        let (dx, dy) = redraw(&mut rng, |rng| {
            let r: f64 = displacements.sample(rng);
            let theta = rng.random_range(0.0..std::f64::consts::TAU);
            let (dx, dy) = (r * theta.cos(), r * theta.sin());
            (dx.abs() < bbox.x_span() && dy.abs() < bbox.y_span()).then_some((dx, dy))
        })
        .ok_or_else(|| Error::invalid("displacements exceed the bbox"))?;

        let ox = rng.random_range(bbox.x_min + (-dx).max(0.0)..=bbox.x_max - dx.max(0.0));
        let oy = rng.random_range(bbox.y_min + (-dy).max(0.0)..=bbox.y_max - dy.max(0.0));
        let start = rng.random_range(bbox.t_min..=bbox.t_max - duration);

        let len = dx.hypot(dy);
        let (nx, ny) = if len > 0.0 { (-dy / len, dx / len) } else { (0.0, 0.0) };
        let last = cfg.waypoints - 1;
        let waypoints = (0..cfg.waypoints)
            .map(|k| {
                let f = k as f64 / last as f64;
                let t = if k == last { start + duration } else { start + f * duration };
                if k == 0 || k == last {
                    return Waypoint::new(ox + f * dx, oy + f * dy, t);
                }
                let off: f64 = jitter.sample(&mut rng);
                let x = (ox + f * dx + off * nx).clamp(bbox.x_min, bbox.x_max);
                let y = (oy + f * dy + off * ny).clamp(bbox.y_min, bbox.y_max);
                Waypoint::new(x, y, t)
            })
            .collect();
        trips.push(Trip::new(format!("s{i:0width$}"), waypoints)?);
    }
    Ok(trips)
}

fn redraw<T>(rng: &mut ChaCha8Rng, mut draw: impl FnMut(&mut ChaCha8Rng) -> Option<T>) -> Option<T> {
    (0..MAX_REDRAWS).find_map(|_| draw(rng))
}
