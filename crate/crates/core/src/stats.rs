//! Exploratory statistics: distribution fits, correlation, CDFs and spatial grids.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trip::{ScaleContext, Trip, Waypoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Lognormal,
    Gamma,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Lognormal => "lognormal",
            Family::Gamma => "gamma",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FitParams {
    Lognormal { mu: f64, sigma: f64 },
    Gamma { shape: f64, scale: f64 },
}

/// Maximum-likelihood fit of one distribution family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub family: Family,
    pub params: FitParams,
    pub log_likelihood: f64,
    pub n: usize,
}

impl FitResult {
    /// Akaike information criterion; both families have two parameters.
    pub fn aic(&self) -> f64 {
        4.0 - 2.0 * self.log_likelihood
    }
}

fn check_positive(samples: &[f64]) -> Result<()> {
    if samples.len() < 2 {
        return Err(Error::invalid(format!(
            "need at least 2 samples, got {}",
            samples.len()
        )));
    }
    if let Some(bad) = samples.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(Error::invalid(format!("sample {bad} is not positive")));
    }
    Ok(())
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Lognormal MLE: `mu = mean(ln x)`, `sigma` = population std of `ln x`.
pub fn fit_lognormal(samples: &[f64]) -> Result<FitResult> {
    check_positive(samples)?;
    let logs: Vec<f64> = samples.iter().map(|v| v.ln()).collect();
    let n = logs.len() as f64;
    let mu = mean(&logs);
    let var = logs.iter().map(|l| (l - mu).powi(2)).sum::<f64>() / n;
    if var == 0.0 {
        return Err(Error::DegenerateFit("log-samples have zero variance".into()));
    }
    let sigma = var.sqrt();
    // at the MLE the quadratic term sums to n/2
    let log_likelihood =
        -logs.iter().sum::<f64>() - n * sigma.ln() - 0.5 * n * (2.0 * PI).ln() - 0.5 * n;
    Ok(FitResult {
        family: Family::Lognormal,
        params: FitParams::Lognormal { mu, sigma },
        log_likelihood,
        n: samples.len(),
    })
}

const GAMMA_MAX_ITER: usize = 100;
const GAMMA_REL_TOL: f64 = 1e-10;

/// Gamma MLE by Newton iteration on `ln k − ψ(k) = ln(mean) − mean(ln x)`.
pub fn fit_gamma(samples: &[f64]) -> Result<FitResult> {
    check_positive(samples)?;
    let n = samples.len() as f64;
    let m = mean(samples);
    let logs: Vec<f64> = samples.iter().map(|v| v.ln()).collect();
    let mean_log = mean(&logs);
    if logs.iter().all(|&l| l == logs[0]) {
        return Err(Error::DegenerateFit("samples are constant".into()));
    }
    let s = m.ln() - mean_log;
    if !(s > 0.0) {
        return Err(Error::DegenerateFit(format!(
            "log-mean gap {s} is not positive"
        )));
    }

    let mut k = (3.0 - s + ((s - 3.0).powi(2) + 24.0 * s).sqrt()) / (12.0 * s);
    for _ in 0..GAMMA_MAX_ITER {
        let f = k.ln() - digamma(k) - s;
        let df = 1.0 / k - trigamma(k);
        let mut next = k - f / df;
        if !(next > 0.0) {
            next = 0.5 * k;
        }
        let step = (next - k).abs();
        k = next;
        if step < GAMMA_REL_TOL * k {
            break;
        }
    }
    let scale = m / k;
    let sum_log: f64 = logs.iter().sum();
    let log_likelihood =
        (k - 1.0) * sum_log - n * m / scale - n * k * scale.ln() - n * ln_gamma(k);
    if !log_likelihood.is_finite() {
        return Err(Error::DegenerateFit("non-finite gamma likelihood".into()));
    }
    Ok(FitResult {
        family: Family::Gamma,
        params: FitParams::Gamma { shape: k, scale },
        log_likelihood,
        n: samples.len(),
    })
}

const ASYMPTOTIC_FROM: f64 = 6.0;

/// Digamma ψ(x) for x > 0.
pub fn digamma(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < ASYMPTOTIC_FROM {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let r = 1.0 / (x * x);
    let series = r
        * (1.0 / 12.0
            - r * (1.0 / 120.0
                - r * (1.0 / 252.0
                    - r * (1.0 / 240.0
                        - r * (1.0 / 132.0 - r * (691.0 / 32760.0 - r * (1.0 / 12.0 - r * 3617.0 / 8160.0)))))));
    acc + x.ln() - 0.5 / x - series
}

/// Trigamma ψ'(x) for x > 0.
pub fn trigamma(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < ASYMPTOTIC_FROM {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let r = 1.0 / (x * x);
    let series = (1.0 / x)
        * r
        * (1.0 / 6.0
            - r * (1.0 / 30.0
                - r * (1.0 / 42.0
                    - r * (1.0 / 30.0 - r * (5.0 / 66.0 - r * (691.0 / 2730.0 - r * (7.0 / 6.0 - r * 3617.0 / 510.0)))))));
    acc + 1.0 / x + 0.5 * r + series
}

/// ln Γ(x) for x > 0, Stirling series after shifting to x ≥ 6.
pub fn ln_gamma(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < ASYMPTOTIC_FROM {
        acc -= x.ln();
        x += 1.0;
    }
    let r = 1.0 / (x * x);
    let series = (1.0 / x)
        * (1.0 / 12.0
            - r * (1.0 / 360.0
                - r * (1.0 / 1260.0
                    - r * (1.0 / 1680.0 - r * (1.0 / 1188.0 - r * (691.0 / 360360.0 - r / 156.0))))));
    acc + (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + series
}

/// Sample Pearson correlation coefficient.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::invalid(format!(
            "length mismatch: {} vs {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 2 {
        return Err(Error::invalid("need at least 2 pairs"));
    }
    let (mx, my) = (mean(xs), mean(ys));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation("zero variance".into()));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Empirical CDF as `(value, P[X <= value])` steps; ties collapse onto one step.
pub fn empirical_cdf(samples: &[f64]) -> Vec<(f64, f64)> {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (i, v) in sorted.iter().enumerate() {
        let p = (i + 1) as f64 / n;
        match out.last_mut() {
            Some(last) if last.0 == *v => last.1 = p,
            _ => out.push((*v, p)),
        }
    }
    out
}

/// Five-number summary with linearly interpolated quartiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxStats {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub count: usize,
}

impl BoxStats {
    /// `None` for an empty sample.
    pub fn from_samples(samples: &[f64]) -> Option<Self> {
        if samples.is_empty() {
            return None;
        }
        let mut s = samples.to_vec();
        s.sort_by(f64::total_cmp);
        Some(BoxStats {
            min: s[0],
            q1: quantile_sorted(&s, 0.25),
            median: quantile_sorted(&s, 0.5),
            q3: quantile_sorted(&s, 0.75),
            max: s[s.len() - 1],
            count: s.len(),
        })
    }
}

/// Quantile of sorted data, interpolating between order statistics.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Row-major `rows × cols` grid over the scaled plane; row indexes y, column x.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridStats<T> {
    pub rows: usize,
    pub cols: usize,
    pub cells: Vec<T>,
}

impl<T> GridStats<T> {
    pub fn get(&self, row: usize, col: usize) -> &T {
        &self.cells[row * self.cols + col]
    }

    /// `(row, col, value)` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        self.cells
            .iter()
            .enumerate()
            .map(move |(i, v)| (i / self.cols, i % self.cols, v))
    }
}

/// Grid cell holding `p`; out-of-bounds points are clamped to the border cells.
pub fn grid_cell(ctx: &ScaleContext, rows: usize, cols: usize, p: &Waypoint) -> (usize, usize) {
    let (s, _) = ctx.scale(p);
    let row = ((s.y * rows as f64) as usize).min(rows - 1);
    let col = ((s.x * cols as f64) as usize).min(cols - 1);
    (row, col)
}

fn check_grid(ctx: &ScaleContext, rows: usize, cols: usize) -> Result<()> {
    ctx.validate()?;
    if rows == 0 || cols == 0 {
        return Err(Error::invalid("grid needs at least one row and column"));
    }
    Ok(())
}

/// Number of distinct trips with at least one waypoint in each cell.
pub fn grid_unique_counts(
    trips: &[Trip],
    ctx: &ScaleContext,
    rows: usize,
    cols: usize,
) -> Result<GridStats<usize>> {
    check_grid(ctx, rows, cols)?;
    let mut cells = vec![0usize; rows * cols];
    let mut visited = Vec::new();
    for trip in trips {
        visited.clear();
        visited.extend(trip.waypoints().iter().map(|w| {
            let (r, c) = grid_cell(ctx, rows, cols, w);
            r * cols + c
        }));
        visited.sort_unstable();
        visited.dedup();
        for &cell in &visited {
            cells[cell] += 1;
        }
    }
    Ok(GridStats { rows, cols, cells })
}

/// Duration summary of the trips starting in each cell; `None` marks empty cells.
pub fn grid_duration_stats(
    trips: &[Trip],
    ctx: &ScaleContext,
    rows: usize,
    cols: usize,
) -> Result<GridStats<Option<BoxStats>>> {
    check_grid(ctx, rows, cols)?;
    let mut buckets = vec![Vec::new(); rows * cols];
    for trip in trips {
        let (r, c) = grid_cell(ctx, rows, cols, trip.origin());
        buckets[r * cols + c].push(trip.duration());
    }
    Ok(GridStats {
        rows,
        cols,
        cells: buckets.iter().map(|b| BoxStats::from_samples(b)).collect(),
    })
}
