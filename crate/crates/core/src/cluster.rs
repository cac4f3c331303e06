//! Affinity matrices, symmetric decomposition, spectral clustering and 2-D embeddings.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{power_eigenpairs, symmetric_eigen_ascending, POWER_TOL};
use crate::metrics::{car_score, cp_score, wgm_sim, TimeMode, WgmWeights};
use crate::stats::quantile_sorted;
use crate::trip::{ScaledPoint, Trip};

pub const SYMMETRY_TOL: f64 = 1e-9;

/// Dense pairwise score matrix over a trip set.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinityMatrix {
    pub values: DMatrix<f64>,
    pub symmetric: bool,
}

impl AffinityMatrix {
    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn from_values(values: DMatrix<f64>) -> Result<Self> {
        if !values.is_square() {
            return Err(Error::invalid(format!(
                "affinity matrix is {}x{}",
                values.nrows(),
                values.ncols()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("affinity matrix has non-finite entries"));
        }
        let symmetric = is_symmetric(&values, SYMMETRY_TOL);
        Ok(AffinityMatrix { values, symmetric })
    }
}

pub fn is_symmetric(m: &DMatrix<f64>, tol: f64) -> bool {
    m.is_square()
        && (0..m.nrows()).all(|i| (0..i).all(|j| (m[(i, j)] - m[(j, i)]).abs() <= tol))
}

/// Pairwise trip scorer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum AffinityScore {
    /// Symmetric WGM similarity with absolute time gaps.
    Wgm(WgmWeights),
    /// Catch-a-Ride score, `A[i][j] = car_score(trip_i, trip_j)`.
    Car(WgmWeights),
    /// CarPool score, the transpose of [`AffinityScore::Car`].
    Cp(WgmWeights),
}

impl AffinityScore {
    pub fn is_symmetric(&self) -> bool {
        matches!(self, AffinityScore::Wgm(_))
    }

    pub fn score(&self, a: &[ScaledPoint], b: &[ScaledPoint]) -> Result<f64> {
        match *self {
            AffinityScore::Wgm(w) => wgm_sim(a, b, w, TimeMode::Absolute),
            AffinityScore::Car(w) => car_score(a, b, w).map(|s| s.value),
            AffinityScore::Cp(w) => cp_score(a, b, w).map(|s| s.value),
        }
    }
}

/// Scores every ordered pair, or only `i <= j` for symmetric scorers.
pub fn build_affinity<F>(trips: &[Vec<ScaledPoint>], scorer: F, symmetric: bool) -> Result<AffinityMatrix>
where
    F: Fn(&[ScaledPoint], &[ScaledPoint]) -> Result<f64> + Sync,
{
    let n = trips.len();
    if n < 2 {
        return Err(Error::invalid("affinity needs at least 2 trips"));
    }
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let from = if symmetric { i } else { 0 };
            (from..n).map(|j| scorer(&trips[i], &trips[j])).collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let mut values = DMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        let from = if symmetric { i } else { 0 };
        for (off, v) in row.iter().enumerate() {
            values[(i, from + off)] = *v;
            if symmetric {
                values[(from + off, i)] = *v;
            }
        }
    }
    AffinityMatrix::from_values(values)
}

/// Symmetric and skew-symmetric parts of a square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub symmetric: DMatrix<f64>,
    pub skew: DMatrix<f64>,
    /// `‖S‖²_F / ‖A‖²_F`.
    pub ratio: f64,
}

pub fn sym_decompose(a: &DMatrix<f64>) -> Result<Decomposition> {
    if !a.is_square() {
        return Err(Error::invalid(format!(
            "cannot decompose a {}x{} matrix",
            a.nrows(),
            a.ncols()
        )));
    }
    let at = a.transpose();
    let symmetric = (a + &at) * 0.5;
    let skew = (a - &at) * 0.5;
    let total = a.norm_squared();
    let ratio = if total == 0.0 { 1.0 } else { symmetric.norm_squared() / total };
    Ok(Decomposition { symmetric, skew, ratio })
}

/// Cluster index per trip, numbered by first appearance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterLabels {
    pub k: usize,
    pub labels: Vec<usize>,
}

pub const KMEANS_RESTARTS: usize = 20;
pub const KMEANS_MAX_RESTARTS: usize = 100;
const KMEANS_MAX_ITER: usize = 300;

/// Normalized spectral clustering: embed with the eigenvectors of the `k`
/// smallest eigenvalues of `I − D^{-1/2} S D^{-1/2}`, row-normalize, then k-means.
pub fn spectral_cluster(s: &AffinityMatrix, k: usize, seed: u64) -> Result<ClusterLabels> {
    let n = s.n();
    if !is_symmetric(&s.values, SYMMETRY_TOL) {
        return Err(Error::invalid("spectral clustering needs a symmetric affinity"));
    }
    if k < 2 || k > n {
        return Err(Error::invalid(format!("k = {k} outside [2, {n}]")));
    }
    let degrees: Vec<f64> = s.values.row_iter().map(|r| r.sum()).collect();
    if let Some(i) = degrees.iter().position(|&d| !(d > 0.0)) {
        return Err(Error::DegenerateInput(format!("trip {i} has zero affinity degree")));
    }
    let inv_sqrt: Vec<f64> = degrees.iter().map(|d| 1.0 / d.sqrt()).collect();
    let laplacian = DMatrix::from_fn(n, n, |i, j| {
        let m = inv_sqrt[i] * s.values[(i, j)] * inv_sqrt[j];
        if i == j {
            1.0 - m
        } else {
            -m
        }
    });
    let (_, vectors) = symmetric_eigen_ascending(&laplacian);
    let embedding: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let row: Vec<f64> = (0..k).map(|c| vectors[(i, c)]).collect();
            let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                row.iter().map(|v| v / norm).collect()
            } else {
                row
            }
        })
        .collect();
    let (labels, _) = kmeans(&embedding, k, seed, KMEANS_RESTARTS)?;
    Ok(ClusterLabels { k, labels })
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

/// Lloyd's k-means with k-means++ seeding; keeps the restart with the lowest
/// inertia. Labels are renumbered by first appearance.
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64, restarts: usize) -> Result<(Vec<usize>, f64)> {
    let n = points.len();
    if k == 0 || k > n {
        return Err(Error::invalid(format!("k = {k} outside [1, {n}]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(Vec<usize>, f64)> = None;
    for _ in 0..restarts.clamp(1, KMEANS_MAX_RESTARTS) {
        let run = lloyd(points, kmeans_pp(points, k, &mut rng));
        if best.as_ref().is_none_or(|b| run.1 < b.1) {
            best = Some(run);
        }
    }
    let (labels, inertia) = best.expect("at least one restart");
    Ok((canonical_labels(&labels), inertia))
}

fn kmeans_pp(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut chosen = vec![false; n];
    let first = rng.random_range(0..n);
    chosen[first] = true;
    let mut centers = vec![points[first].clone()];
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut idx = n - 1;
            for (i, &d) in d2.iter().enumerate() {
                if d > 0.0 && target < d {
                    idx = i;
                    break;
                }
                target -= d;
            }
            if chosen[idx] || d2[idx] == 0.0 {
                d2.iter().position(|&d| d > 0.0).unwrap_or(idx)
            } else {
                idx
            }
        } else {
            chosen.iter().position(|c| !c).unwrap_or(0)
        };
        chosen[pick] = true;
        centers.push(points[pick].clone());
        for (i, p) in points.iter().enumerate() {
            d2[i] = d2[i].min(sq_dist(p, &points[pick]));
        }
    }
    centers
}

fn nearest(p: &[f64], centers: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, center) in centers.iter().enumerate() {
        let d = sq_dist(p, center);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn lloyd(points: &[Vec<f64>], mut centers: Vec<Vec<f64>>) -> (Vec<usize>, f64) {
    let k = centers.len();
    let dim = points[0].len();
    let mut labels: Vec<usize> = points.iter().map(|p| nearest(p, &centers).0).collect();
    for _ in 0..KMEANS_MAX_ITER {
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &l) in points.iter().zip(&labels) {
            counts[l] += 1;
            for (s, v) in sums[l].iter_mut().zip(p) {
                *s += v;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                centers[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            } else {
                // reseed an empty cluster at the worst-served point
                let far = (0..points.len())
                    .max_by(|&a, &b| {
                        sq_dist(&points[a], &centers[labels[a]])
                            .total_cmp(&sq_dist(&points[b], &centers[labels[b]]))
                    })
                    .unwrap();
                centers[c] = points[far].clone();
            }
        }
        let next: Vec<usize> = points.iter().map(|p| nearest(p, &centers).0).collect();
        if next == labels {
            break;
        }
        labels = next;
    }
    let inertia = points.iter().map(|p| nearest(p, &centers).1).sum();
    (labels, inertia)
}

fn canonical_labels(labels: &[usize]) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    labels
        .iter()
        .map(|l| {
            let next = map.len();
            *map.entry(*l).or_insert(next)
        })
        .collect()
}

/// Adjusted Rand index between two labelings of the same items.
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::invalid("labelings differ in length"));
    }
    let n = a.len();
    let ka = a.iter().max().map_or(0, |m| m + 1);
    let kb = b.iter().max().map_or(0, |m| m + 1);
    let mut table = vec![vec![0u64; kb]; ka];
    for (&x, &y) in a.iter().zip(b) {
        table[x][y] += 1;
    }
    let pairs = |c: u64| (c * c.saturating_sub(1)) as f64 / 2.0;
    let index: f64 = table.iter().flatten().map(|&c| pairs(c)).sum();
    let sum_a: f64 = table.iter().map(|r| pairs(r.iter().sum())).sum();
    let sum_b: f64 = (0..kb).map(|j| pairs(table.iter().map(|r| r[j]).sum())).sum();
    let expected = sum_a * sum_b / pairs(n as u64);
    let max = 0.5 * (sum_a + sum_b);
    if max == expected {
        return Ok(1.0);
    }
    Ok((index - expected) / (max - expected))
}

/// Two-component PCA projection.
#[derive(Debug, Clone, PartialEq)]
pub struct Pca {
    pub coords: Vec<[f64; 2]>,
    /// Share of total variance captured by each component.
    pub explained_ratio: [f64; 2],
    pub total_variance: f64,
}

/// Projects the rows of `data` (n × d) onto their first two principal components.
pub fn pca_2d(data: &DMatrix<f64>) -> Result<Pca> {
    let (n, d) = data.shape();
    if n < 3 || d < 2 {
        return Err(Error::invalid(format!("PCA needs n >= 3 and d >= 2, got {n}x{d}")));
    }
    let means = data.row_mean();
    let centered = DMatrix::from_fn(n, d, |i, j| data[(i, j)] - means[j]);
    let cov = centered.transpose() * &centered / (n - 1) as f64;
    let total_variance = cov.trace();
    if !(total_variance > 0.0) {
        return Err(Error::DegenerateInput("data has zero variance".into()));
    }
    let pairs = power_eigenpairs(&cov, 2, POWER_TOL);
    let coords = (0..n)
        .map(|i| {
            let row = centered.row(i);
            [row.dot(&pairs[0].1.transpose()), row.dot(&pairs[1].1.transpose())]
        })
        .collect();
    Ok(Pca {
        coords,
        explained_ratio: [
            pairs[0].0.max(0.0) / total_variance,
            pairs[1].0.max(0.0) / total_variance,
        ],
        total_variance,
    })
}

/// Classical (Torgerson) MDS of a symmetric distance matrix into two dimensions.
pub fn mds_2d(dist: &DMatrix<f64>) -> Result<Vec<[f64; 2]>> {
    let n = dist.nrows();
    if !is_symmetric(dist, SYMMETRY_TOL) {
        return Err(Error::invalid("MDS needs a symmetric distance matrix"));
    }
    if n < 2 {
        return Err(Error::invalid("MDS needs at least 2 points"));
    }
    if (0..n).any(|i| dist[(i, i)].abs() > SYMMETRY_TOL) {
        return Err(Error::invalid("distance matrix has a nonzero diagonal"));
    }
    let sq = dist.map(|v| v * v);
    let row_means: Vec<f64> = sq.row_iter().map(|r| r.mean()).collect();
    let grand = sq.mean();
    // B = −½ J D² J, expanded
    let b = DMatrix::from_fn(n, n, |i, j| -0.5 * (sq[(i, j)] - row_means[i] - row_means[j] + grand));
    let (values, vectors) = symmetric_eigen_ascending(&b);
    let scale: Vec<f64> = (0..2)
        .map(|c| values.get(n.wrapping_sub(1 + c)).copied().unwrap_or(0.0).max(0.0).sqrt())
        .collect();
    Ok((0..n)
        .map(|i| {
            let mut xy = [0.0; 2];
            for (c, s) in scale.iter().enumerate() {
                if c < n {
                    xy[c] = vectors[(i, n - 1 - c)] * s;
                }
            }
            xy
        })
        .collect())
}

/// `1 − S`, the distance matrix used to embed similarities.
pub fn similarity_to_distance(s: &DMatrix<f64>) -> DMatrix<f64> {
    let n = s.nrows();
    DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { 1.0 - s[(i, j)] })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSummary {
    pub name: String,
    pub mean: f64,
    pub median: f64,
    pub std: f64,
}

/// Per-cluster spread of trip endpoints and times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSummary {
    pub cluster: usize,
    pub count: usize,
    pub features: Vec<FeatureSummary>,
}

pub fn cluster_summary(trips: &[Trip], labels: &ClusterLabels) -> Result<Vec<ClusterSummary>> {
    if trips.len() != labels.labels.len() {
        return Err(Error::invalid("labels do not match trips"));
    }
    type Extract = fn(&Trip) -> f64;
    let features: [(&str, Extract); 6] = [
        ("origin_x", |t| t.origin().x),
        ("origin_y", |t| t.origin().y),
        ("dest_x", |t| t.destination().x),
        ("dest_y", |t| t.destination().y),
        ("start_t", |t| t.start_time()),
        ("end_t", |t| t.end_time()),
    ];
    Ok((0..labels.k)
        .map(|c| {
            let members: Vec<&Trip> = trips
                .iter()
                .zip(&labels.labels)
                .filter(|(_, &l)| l == c)
                .map(|(t, _)| t)
                .collect();
            let features = features
                .iter()
                .map(|(name, f)| {
                    let mut vals: Vec<f64> = members.iter().map(|t| f(t)).collect();
                    vals.sort_by(f64::total_cmp);
                    summarize(name, &vals)
                })
                .collect();
            ClusterSummary { cluster: c, count: members.len(), features }
        })
        .collect())
}

fn summarize(name: &str, sorted: &[f64]) -> FeatureSummary {
    if sorted.is_empty() {
        return FeatureSummary { name: name.into(), mean: f64::NAN, median: f64::NAN, std: f64::NAN };
    }
    let n = sorted.len() as f64;
    let mean = sorted.iter().sum::<f64>() / n;
    let std = (sorted.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    FeatureSummary {
        name: name.into(),
        mean,
        median: quantile_sorted(sorted, 0.5),
        std,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::{Distribution, Normal};

    fn od(ox: f64, oy: f64, ot: f64, dx: f64, dy: f64, dt: f64) -> Vec<ScaledPoint> {
        vec![ScaledPoint::new(ox, oy, ot), ScaledPoint::new(dx, dy, dt)]
    }

    #[test]
    fn identical_trips_give_all_ones() {
        let t = od(0.1, 0.2, 0.3, 0.4, 0.5, 0.6);
        let w = WgmWeights::default();
        let s = AffinityScore::Wgm(w);
        let a = build_affinity(&[t.clone(), t], |x, y| s.score(x, y), true).unwrap();
        assert!(a.values.iter().all(|&v| v == 1.0));
        assert!(a.symmetric);
    }

    #[test]
    fn car_affinity_is_asymmetric_and_cp_is_its_transpose() {
        let trips = vec![
            od(0.1, 0.1, 0.0, 0.5, 0.5, 0.5),
            od(0.12, 0.1, 0.1, 0.5, 0.52, 0.4),
            od(0.3, 0.3, 0.2, 0.9, 0.9, 0.9),
        ];
        let w = WgmWeights::default();
        let car = AffinityScore::Car(w);
        let cp = AffinityScore::Cp(w);
        let a = build_affinity(&trips, |x, y| car.score(x, y), false).unwrap();
        let b = build_affinity(&trips, |x, y| cp.score(x, y), false).unwrap();
        assert!(!a.symmetric);
        assert_eq!(b.values, a.values.transpose());
    }

    #[test]
    fn symmetric_build_calls_upper_triangle_only() {
        let trips: Vec<Vec<ScaledPoint>> = (0..6).map(|i| od(i as f64 * 0.1, 0.0, 0.0, 0.5, 0.5, 0.5)).collect();
        let calls = std::sync::atomic::AtomicUsize::new(0);
        let scorer = |a: &[ScaledPoint], b: &[ScaledPoint]| {
            calls.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
            wgm_sim(a, b, WgmWeights::default(), TimeMode::Absolute)
        };
        build_affinity(&trips, scorer, true).unwrap();
        assert_eq!(calls.load(std::sync::atomic::Ordering::Relaxed), 21);
        calls.store(0, std::sync::atomic::Ordering::Relaxed);
        build_affinity(&trips, scorer, false).unwrap();
        assert_eq!(calls.load(std::sync::atomic::Ordering::Relaxed), 36);
    }

    #[test]
    fn decomposition_examples() {
        let s = DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, 1.0]);
        let d = sym_decompose(&s).unwrap();
        assert_eq!(d.skew, DMatrix::zeros(2, 2));
        assert_eq!(d.ratio, 1.0);

        let k = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let d = sym_decompose(&k).unwrap();
        assert_eq!(d.symmetric, DMatrix::zeros(2, 2));
        assert_eq!(d.ratio, 0.0);

        assert!(sym_decompose(&DMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn decomposition_ratio_matches_elementwise_sums() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let a = DMatrix::from_fn(5, 5, |_, _| rng.random::<f64>());
        let d = sym_decompose(&a).unwrap();
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..5 {
            for j in 0..5 {
                let s = 0.5 * (a[(i, j)] + a[(j, i)]);
                num += s * s;
                den += a[(i, j)] * a[(i, j)];
            }
        }
        assert!((d.ratio - num / den).abs() < 1e-14);
        assert!((&d.symmetric + &d.skew - &a).amax() < 1e-15);
    }

    fn block_affinity(sizes: &[usize], within: f64, across: f64) -> (AffinityMatrix, Vec<usize>) {
        let truth: Vec<usize> = sizes.iter().enumerate().flat_map(|(g, &s)| vec![g; s]).collect();
        let n = truth.len();
        let values = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                1.0
            } else if truth[i] == truth[j] {
                within
            } else {
                across
            }
        });
        (AffinityMatrix::from_values(values).unwrap(), truth)
    }

    #[test]
    fn block_diagonal_two_clusters() {
        let (a, truth) = block_affinity(&[7, 5], 0.9, 0.0);
        let labels = spectral_cluster(&a, 2, 1).unwrap();
        assert_eq!(adjusted_rand_index(&labels.labels, &truth).unwrap(), 1.0);
    }

    #[test]
    fn planted_partition_weak_links() {
        let (a, truth) = block_affinity(&[30, 20, 25], 0.95, 0.01);
        let labels = spectral_cluster(&a, 3, 4).unwrap();
        assert_eq!(adjusted_rand_index(&labels.labels, &truth).unwrap(), 1.0);
    }

    #[test]
    fn spectral_n_equals_k() {
        let trips: Vec<Vec<ScaledPoint>> =
            (0..4).map(|i| od(i as f64 * 0.3, 0.0, 0.0, 0.5, i as f64 * 0.2, 0.5)).collect();
        let s = AffinityScore::Wgm(WgmWeights::default());
        let a = build_affinity(&trips, |x, y| s.score(x, y), true).unwrap();
        let labels = spectral_cluster(&a, 4, 0).unwrap();
        assert_eq!(labels.labels, vec![0, 1, 2, 3]);
    }

    #[test]
    fn spectral_errors() {
        let zero_row = DMatrix::from_row_slice(3, 3, &[1.0, 0.5, 0.0, 0.5, 1.0, 0.0, 0.0, 0.0, 0.0]);
        let a = AffinityMatrix::from_values(zero_row).unwrap();
        assert!(matches!(spectral_cluster(&a, 2, 0), Err(Error::DegenerateInput(_))));
        let asym = AffinityMatrix::from_values(DMatrix::from_row_slice(2, 2, &[1.0, 0.2, 0.4, 1.0])).unwrap();
        assert!(spectral_cluster(&asym, 2, 0).is_err());
        let (ok, _) = block_affinity(&[2, 2], 0.9, 0.1);
        assert!(spectral_cluster(&ok, 1, 0).is_err());
        assert!(spectral_cluster(&ok, 5, 0).is_err());
    }

    #[test]
    fn spectral_is_deterministic() {
        let (a, _) = block_affinity(&[10, 10, 10], 0.6, 0.2);
        assert_eq!(spectral_cluster(&a, 3, 9).unwrap(), spectral_cluster(&a, 3, 9).unwrap());
    }

    #[test]
    fn ari_values() {
        assert_eq!(adjusted_rand_index(&[0, 0, 1, 1], &[1, 1, 0, 0]).unwrap(), 1.0);
        let ari = adjusted_rand_index(&[0, 0, 1, 1], &[0, 1, 0, 1]).unwrap();
        assert!(ari < 0.0);
        assert!(adjusted_rand_index(&[0], &[0, 1]).is_err());
    }

    #[test]
    fn pca_on_a_line() {
        let data = DMatrix::from_fn(10, 3, |i, j| i as f64 * [1.0, -2.0, 0.5][j]);
        let p = pca_2d(&data).unwrap();
        assert!((p.explained_ratio[0] - 1.0).abs() < 1e-9);
        assert!(p.explained_ratio[1].abs() < 1e-9);
    }

    #[test]
    fn pca_isotropic_gaussian() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let normal = Normal::new(0.0, 1.0).unwrap();
        let d = 4;
        let data = DMatrix::from_fn(1000, d, |_, _| normal.sample(&mut rng));
        let p = pca_2d(&data).unwrap();
        for r in p.explained_ratio {
            assert!((r - 1.0 / d as f64).abs() < 0.05, "ratio {r}");
        }
    }

    #[test]
    fn pca_reconstruction_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let data = DMatrix::from_fn(50, 4, |_, j| rng.random::<f64>() * (j + 1) as f64);
        let p = pca_2d(&data).unwrap();
        let n = data.nrows();
        let means = data.row_mean();
        let centered = DMatrix::from_fn(n, 4, |i, j| data[(i, j)] - means[j]);
        let total: f64 = centered.norm_squared() / (n - 1) as f64;
        let explained: f64 = p.coords.iter().map(|c| c[0] * c[0] + c[1] * c[1]).sum::<f64>() / (n - 1) as f64;
        let residual_ratio = 1.0 - p.explained_ratio[0] - p.explained_ratio[1];
        assert!(((total - explained) / total - residual_ratio).abs() < 1e-8);
    }

    #[test]
    fn pca_errors() {
        assert!(matches!(pca_2d(&DMatrix::from_element(5, 3, 2.0)), Err(Error::DegenerateInput(_))));
        assert!(pca_2d(&DMatrix::zeros(2, 3)).is_err());
    }

    fn pairwise(coords: &[[f64; 2]]) -> DMatrix<f64> {
        let n = coords.len();
        DMatrix::from_fn(n, n, |i, j| {
            (coords[i][0] - coords[j][0]).hypot(coords[i][1] - coords[j][1])
        })
    }

    #[test]
    fn mds_equilateral_triangle() {
        let d = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.0]);
        let got = pairwise(&mds_2d(&d).unwrap());
        assert!((got - d).abs().max() < 1e-6);
    }

    #[test]
    fn mds_two_points() {
        let d = DMatrix::from_row_slice(2, 2, &[0.0, 4.0, 4.0, 0.0]);
        let c = mds_2d(&d).unwrap();
        assert!((pairwise(&c)[(0, 1)] - 4.0).abs() < 1e-9);
    }

    #[test]
    fn mds_recovers_planar_configuration() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let pts: Vec<[f64; 2]> = (0..25).map(|_| [rng.random::<f64>() * 10.0, rng.random::<f64>() * 3.0]).collect();
        let d = pairwise(&pts);
        let got = pairwise(&mds_2d(&d).unwrap());
        assert!((got - d).abs().max() < 1e-6);
    }

    #[test]
    fn mds_rejects_asymmetric() {
        let d = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 2.0, 0.0]);
        assert!(matches!(mds_2d(&d), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn summaries_per_cluster() {
        use crate::trip::Waypoint;
        let trips: Vec<Trip> = (0..4)
            .map(|i| {
                Trip::new(
                    format!("t{i}"),
                    vec![Waypoint::new(i as f64, 0.0, 0.0), Waypoint::new(0.0, i as f64, 10.0)],
                )
                .unwrap()
            })
            .collect();
        let labels = ClusterLabels { k: 2, labels: vec![0, 0, 1, 1] };
        let s = cluster_summary(&trips, &labels).unwrap();
        assert_eq!(s[0].count, 2);
        assert_eq!(s[1].features[0].mean, 2.5);
        assert_eq!(s[1].features[0].std, 0.5);
    }
}
