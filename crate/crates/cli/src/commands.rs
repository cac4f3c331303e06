use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use serde_json::{json, Map, Value};
use tripsim_core::carshare::{chain_stats, schedule, summarize, DagParams};
use tripsim_core::cluster::{
    build_affinity, cluster_summary, mds_2d, pca_2d, similarity_to_distance, spectral_cluster, sym_decompose,
    AffinityMatrix, AffinityScore,
};
use tripsim_core::ingest::{build_trips, generate_synthetic, parse_trace, SynthConfig, TimeWindow, TraceFormat};
use tripsim_core::matching::{
    compare_metrics, greedy_match, match_counts_curve, split_requests, weight_sweep, MatchReport, MatchScenario,
    PreparedTrip, Representation, SweepKind,
};
use tripsim_core::metrics::{laplacian_kernel, MetricParams};
use tripsim_core::stats::{
    empirical_cdf, fit_gamma, fit_lognormal, grid_duration_stats, grid_unique_counts, pearson, FitParams,
};
use tripsim_core::{ScaleContext, Trip};

use crate::args::*;
use crate::error::{CliError, CliResult};
use crate::manifest::{digests, Manifest};
use crate::output::{km, read_trips, real, secs, OutDir};

/// Runs one subcommand and returns its one-line JSON summary.
pub fn execute(command: Command) -> CliResult<Value> {
    if let Command::Replay(r) = command {
        let manifest = Manifest::read(&r.manifest)?;
        manifest.verify_inputs()?;
        let mut cmd = manifest.command;
        if let (Some(dir), Some(out)) = (r.out, cmd.out_mut()) {
            *out = dir;
        }
        return execute(cmd);
    }

    let inputs = input_paths(&command);
    if let Some(missing) = inputs.iter().find(|p| !p.is_file()) {
        return Err(CliError::Usage(format!("input {} does not exist", missing.display())));
    }
    let input_digests = digests(&inputs)?;
    let out_dir = command.clone().out_mut().map(|p| p.clone()).expect("non-replay command");
    let mut out = OutDir::create(&out_dir)?;

    let fields = match &command {
        Command::Ingest(a) => ingest(a, &mut out)?,
        Command::Synth(a) => synth(a, &mut out)?,
        Command::Stats(a) => stats(a, &mut out)?,
        Command::Affinity(a) => affinity(a, &mut out)?,
        Command::Cluster(a) => cluster(a, &mut out)?,
        Command::Match(a) => run_match(a, &mut out)?,
        Command::Compare(a) => compare(a, &mut out)?,
        Command::Carshare(a) => carshare(a, &mut out)?,
        Command::Replay(_) => unreachable!(),
    };
    Manifest::new(&command, input_digests, out.written()).write(out.path())?;

    let mut summary = Map::new();
    summary.insert("command".into(), command.name().into());
    summary.insert("status".into(), "ok".into());
    summary.insert("out".into(), out.path().display().to_string().into());
    summary.extend(fields);
    Ok(Value::Object(summary))
}

fn input_paths(command: &Command) -> Vec<PathBuf> {
    let set = |s: &TripSetArgs| -> Vec<PathBuf> {
        [&s.trips, &s.requests, &s.rides].into_iter().flatten().cloned().collect()
    };
    match command {
        Command::Ingest(a) => vec![a.trace.clone()],
        Command::Synth(_) | Command::Replay(_) => vec![],
        Command::Stats(a) => vec![a.trips.clone()],
        Command::Affinity(a) => vec![a.trips.clone()],
        Command::Cluster(a) => vec![a.trips.clone()],
        Command::Match(a) => set(&a.input),
        Command::Compare(a) => set(&a.input),
        Command::Carshare(a) => vec![a.trips.clone()],
    }
}

type Fields = Map<String, Value>;

fn fields(v: Value) -> Fields {
    match v {
        Value::Object(m) => m,
        _ => unreachable!("summary fields are objects"),
    }
}

fn ingest(a: &IngestArgs, out: &mut OutDir) -> CliResult<Fields> {
    let format: TraceFormat = a.format.parse()?;
    let window = match (a.hour, a.window_start, a.window_end) {
        (Some(h), _, _) => TimeWindow::hour(h),
        (None, Some(s), Some(e)) => TimeWindow::new(s, e)?,
        (None, None, None) => TimeWindow { start: f64::NEG_INFINITY, end: f64::INFINITY },
        _ => return Err(CliError::Usage("--window-start and --window-end go together".into())),
    };
    let f = File::open(&a.trace).map_err(|e| CliError::io(&a.trace, e))?;
    let parsed = parse_trace(BufReader::new(f), &format)?;
    let trips = build_trips(&parsed.records, window);
    out.trips("trips.jsonl", &trips)?;
    Ok(fields(json!({
        "records": parsed.records.len(),
        "malformed": parsed.malformed,
        "trips": trips.len(),
    })))
}

fn synth(a: &SynthArgs, out: &mut OutDir) -> CliResult<Fields> {
    if !(a.displacement_median > 0.0) {
        return Err(tripsim_core::Error::InvalidArgument("displacement median must be positive".into()).into());
    }
    let cfg = SynthConfig {
        n_trips: a.n,
        duration_shape: a.duration_shape,
        duration_scale: a.duration_scale,
        displacement_mu: a.displacement_median.ln(),
        displacement_sigma: a.displacement_sigma,
        waypoints: a.waypoints,
        jitter: a.jitter,
        seed: a.seed,
        ..SynthConfig::default()
    };
    let trips = generate_synthetic(&cfg)?;
    out.trips("trips.jsonl", &trips)?;
    Ok(fields(json!({ "trips": trips.len() })))
}

fn load_nonempty(path: &std::path::Path) -> CliResult<Vec<Trip>> {
    let trips = read_trips(path)?;
    if trips.is_empty() {
        return Err(tripsim_core::Error::DegenerateInput(format!("{} holds no trips", path.display())).into());
    }
    Ok(trips)
}

fn stats(a: &StatsArgs, out: &mut OutDir) -> CliResult<Fields> {
    let trips = load_nonempty(&a.trips)?;
    let ctx = ScaleContext::from_trips(&trips)?;
    let duration: Vec<f64> = trips.iter().map(Trip::duration).collect();
    let distance: Vec<f64> = trips.iter().map(Trip::path_length).collect();
    let displacement: Vec<f64> = trips.iter().map(Trip::od_displacement).collect();
    let waypoints: Vec<f64> = trips.iter().map(|t| t.len() as f64).collect();

    // fits use the strictly positive samples only
    let mut fit_rows = Vec::new();
    let mut best = Map::new();
    for (name, samples) in [("duration", &duration), ("distance", &distance)] {
        let positive: Vec<f64> = samples.iter().copied().filter(|&v| v > 0.0).collect();
        let mut lls = Vec::new();
        for (family, fit) in [("lognormal", fit_lognormal(&positive)), ("gamma", fit_gamma(&positive))] {
            let mut row = vec![name.to_string(), family.to_string()];
            match fit {
                Ok(f) => {
                    let (mu, sigma, shape, scale) = match f.params {
                        FitParams::Lognormal { mu, sigma } => (real(mu), real(sigma), String::new(), String::new()),
                        FitParams::Gamma { shape, scale } => (String::new(), String::new(), real(shape), real(scale)),
                    };
                    row.extend([mu, sigma, shape, scale, real(f.log_likelihood), real(f.aic()), f.n.to_string()]);
                    row.push(String::new());
                    lls.push((family, f.log_likelihood));
                }
                Err(e) => {
                    row.extend(std::iter::repeat_n(String::new(), 6));
                    row.push(positive.len().to_string());
                    row.push(e.category().to_string());
                }
            }
            fit_rows.push(row);
        }
        if let Some((family, _)) = lls.iter().max_by(|x, y| x.1.total_cmp(&y.1)) {
            best.insert(format!("{name}_best_fit"), (*family).into());
        }
    }
    out.csv(
        "fits.csv",
        &["variable", "family", "mu", "sigma", "shape", "scale", "loglik", "aic", "n", "error"],
        fit_rows,
    )?;

    let pairs = [
        ("waypoints", &waypoints, "distance", &distance),
        ("waypoints", &waypoints, "duration", &duration),
        ("duration", &duration, "distance", &distance),
        ("displacement", &displacement, "distance", &distance),
    ];
    out.csv(
        "correlations.csv",
        &["x", "y", "r", "n", "error"],
        pairs.iter().map(|(xn, xs, yn, ys)| {
            let (r, err) = match pearson(xs, ys) {
                Ok(r) => (real(r), String::new()),
                Err(e) => (String::new(), e.category().to_string()),
            };
            vec![xn.to_string(), yn.to_string(), r, xs.len().to_string(), err]
        }),
    )?;

    out.csv(
        "cdf_duration.csv",
        &["duration_s", "probability"],
        empirical_cdf(&duration).into_iter().map(|(v, p)| vec![secs(v), real(p)]),
    )?;
    for (name, samples) in [("distance", &distance), ("displacement", &displacement)] {
        out.csv(
            &format!("cdf_{name}.csv"),
            &[&format!("{name}_km"), "probability"],
            empirical_cdf(samples).into_iter().map(|(v, p)| vec![km(v), real(p)]),
        )?;
    }

    let unique = grid_unique_counts(&trips, &ctx, a.density_rows, a.density_cols)?;
    out.csv(
        "grid_unique.csv",
        &["row", "col", "value"],
        unique.iter().map(|(r, c, v)| vec![r.to_string(), c.to_string(), v.to_string()]),
    )?;
    let dur = grid_duration_stats(&trips, &ctx, a.grid_rows, a.grid_cols)?;
    out.csv(
        "grid_duration.csv",
        &["row", "col", "count", "min_s", "q1_s", "median_s", "q3_s", "max_s"],
        dur.iter().map(|(r, c, cell)| {
            let mut row = vec![r.to_string(), c.to_string()];
            match cell {
                Some(b) => {
                    row.push(b.count.to_string());
                    row.extend([b.min, b.q1, b.median, b.q3, b.max].map(secs));
                }
                None => {
                    row.push("0".into());
                    row.extend(std::iter::repeat_n(String::new(), 5));
                }
            }
            row
        }),
    )?;

    let mut f = fields(json!({ "trips": trips.len() }));
    f.extend(best);
    Ok(f)
}

fn scorer(kind: ScoreKind, w: &WeightArgs) -> CliResult<AffinityScore> {
    let w = w.weights()?;
    Ok(match kind {
        ScoreKind::Wgm => AffinityScore::Wgm(w),
        ScoreKind::Car => AffinityScore::Car(w),
        ScoreKind::Cp => AffinityScore::Cp(w),
    })
}

fn scaled_reps(trips: &[Trip], ctx: &ScaleContext, repr: Representation) -> CliResult<Vec<PreparedTrip>> {
    Ok(PreparedTrip::prepare_all(trips, ctx, repr)?)
}

fn affinity_of(
    trips: &[Trip],
    kind: ScoreKind,
    w: &WeightArgs,
    repr: &ReprArgs,
) -> CliResult<(ScaleContext, AffinityMatrix)> {
    let ctx = ScaleContext::from_trips(trips)?;
    let score = scorer(kind, w)?;
    let points: Vec<_> = scaled_reps(trips, &ctx, repr.representation())?.into_iter().map(|p| p.points).collect();
    let aff = build_affinity(&points, |a, b| score.score(a, b), score.is_symmetric())?;
    Ok((ctx, aff))
}

fn affinity(a: &AffinityArgs, out: &mut OutDir) -> CliResult<Fields> {
    let trips = load_nonempty(&a.trips)?;
    let (_, aff) = affinity_of(&trips, a.score, &a.weights, &a.repr)?;
    let dec = sym_decompose(&aff.values)?;
    let ids: Vec<&str> = trips.iter().map(Trip::id).collect();
    let header: Vec<&str> = std::iter::once("id").chain(ids.iter().copied()).collect();
    out.csv(
        "affinity.csv",
        &header,
        (0..aff.n()).map(|i| {
            std::iter::once(ids[i].to_string())
                .chain((0..aff.n()).map(|j| real(aff.values[(i, j)])))
                .collect::<Vec<_>>()
        }),
    )?;
    let report = json!({
        "n": aff.n(),
        "symmetric": aff.symmetric,
        "symmetry_ratio": dec.ratio,
        "frobenius_sq": aff.values.norm_squared(),
        "symmetric_frobenius_sq": dec.symmetric.norm_squared(),
        "skew_frobenius_sq": dec.skew.norm_squared(),
    });
    out.json("decomposition.json", &report)?;
    Ok(fields(json!({ "n": aff.n(), "symmetry_ratio": dec.ratio })))
}

fn cluster(a: &ClusterArgs, out: &mut OutDir) -> CliResult<Fields> {
    let trips = load_nonempty(&a.trips)?;
    let (ctx, aff) = affinity_of(&trips, a.score, &a.weights, &a.repr)?;
    let mut s = if aff.symmetric { aff.values } else { sym_decompose(&aff.values)?.symmetric };
    if let Some(gamma) = a.kernel_gamma {
        if !(gamma > 0.0) {
            return Err(tripsim_core::Error::InvalidArgument("kernel gamma must be positive".into()).into());
        }
        s.apply(|v| *v = laplacian_kernel(*v, gamma));
    }
    let sim = AffinityMatrix::from_values(s)?;
    let labels = spectral_cluster(&sim, a.k, a.seed)?;
    let ids: Vec<&str> = trips.iter().map(Trip::id).collect();
    out.csv(
        "labels.csv",
        &["id", "cluster"],
        ids.iter().zip(&labels.labels).map(|(id, l)| vec![id.to_string(), l.to_string()]),
    )?;

    let od = scaled_reps(&trips, &ctx, Representation::Od)?;
    let data = nalgebra_rows(&od);
    let pca = pca_2d(&data)?;
    let coords = |c: &[[f64; 2]]| -> Vec<Vec<String>> {
        ids.iter().zip(c).map(|(id, p)| vec![id.to_string(), real(p[0]), real(p[1])]).collect()
    };
    out.csv("coords_pca.csv", &["id", "x", "y"], coords(&pca.coords))?;
    let mds = mds_2d(&similarity_to_distance(&sim.values))?;
    out.csv("coords_mds.csv", &["id", "x", "y"], coords(&mds))?;

    let summary = cluster_summary(&trips, &labels)?;
    let mut header = vec!["cluster".to_string(), "count".to_string()];
    if let Some(first) = summary.first() {
        for f in &first.features {
            let unit = if f.name.ends_with("_t") { "s" } else { "km" };
            for stat in ["mean", "median", "std"] {
                header.push(format!("{}_{stat}_{unit}", f.name));
            }
        }
    }
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    out.csv(
        "cluster_summary.csv",
        &header_refs,
        summary.iter().map(|c| {
            let mut row = vec![c.cluster.to_string(), c.count.to_string()];
            for f in &c.features {
                let fmt: fn(f64) -> String = if f.name.ends_with("_t") { secs } else { km };
                if c.count == 0 {
                    row.extend(std::iter::repeat_n(String::new(), 3));
                } else {
                    row.extend([fmt(f.mean), fmt(f.median), fmt(f.std)]);
                }
            }
            row
        }),
    )?;
    Ok(fields(json!({
        "trips": trips.len(),
        "k": labels.k,
        "pca_explained": pca.explained_ratio[0] + pca.explained_ratio[1],
    })))
}

fn nalgebra_rows(od: &[PreparedTrip]) -> nalgebra::DMatrix<f64> {
    nalgebra::DMatrix::from_fn(od.len(), 6, |i, j| {
        let p = &od[i].points[j / 3];
        [p.x, p.y, p.t][j % 3]
    })
}

struct MatchInputs {
    ctx: ScaleContext,
    requests: Vec<Trip>,
    rides: Vec<Trip>,
}

fn load_sets(s: &TripSetArgs) -> CliResult<MatchInputs> {
    let (requests, rides) = match (&s.trips, &s.requests, &s.rides) {
        (Some(t), _, _) => {
            let trips = load_nonempty(t)?;
            let n = s.n_requests.unwrap_or((trips.len() / 6).max(1));
            split_requests(&trips, n, s.seed)?
        }
        (None, Some(q), Some(r)) => (read_trips(q)?, read_trips(r)?),
        _ => return Err(CliError::Usage("give --trips, or both --requests and --rides".into())),
    };
    let ctx = ScaleContext::from_trips(requests.iter().chain(&rides))?;
    Ok(MatchInputs { ctx, requests, rides })
}

fn scenario_of(a: &ScenarioArgs, ctx: &ScaleContext, metric: tripsim_core::Metric) -> CliResult<MatchScenario> {
    let mut s = MatchScenario::new(a.mode.into(), ctx)?;
    s.dist_threshold = a.thresholds.dist_threshold;
    s.time_threshold = a.thresholds.time_threshold;
    s.weights = a.weights.weights()?;
    s.metric = metric;
    s.lcss = MetricParams::from_raw(ctx, a.lcss_eps_space, a.lcss_eps_time)?;
    s.validate()?;
    Ok(s)
}

/// Report as a flat JSON object; km fields to 3 decimals, times to whole seconds.
fn report_value(r: &MatchReport) -> CliResult<Value> {
    let mut m = Map::new();
    m.insert("mode".into(), serde_json::to_value(r.mode)?);
    m.insert("metric".into(), r.metric.name().into());
    m.insert("n_matched".into(), r.aggregates.n_matched.into());
    m.insert("n_requests".into(), r.aggregates.n_requests.into());
    for (k, v) in fields(serde_json::to_value(&r.aggregates)?) {
        let v = match v.as_f64() {
            Some(x) if !v.is_u64() => {
                if k.contains("(sec)") {
                    json!(x.round() as i64)
                } else if k.contains("(km)") || k.contains("(%)") {
                    json!((x * 1000.0).round() / 1000.0)
                } else {
                    v
                }
            }
            _ => v,
        };
        m.insert(k, v);
    }
    Ok(Value::Object(m))
}

fn value_cell(key: &str, v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or_default();
            if key.contains("(km)") || key.contains("(%)") {
                format!("{x:.3}")
            } else {
                real(x)
            }
        }
        other => other.to_string(),
    }
}

fn run_match(a: &MatchArgs, out: &mut OutDir) -> CliResult<Fields> {
    let inp = load_sets(&a.input)?;
    let scenario = scenario_of(&a.scenario, &inp.ctx, a.metric)?;
    let repr = a.repr.representation();
    let requests = scaled_reps(&inp.requests, &inp.ctx, repr)?;
    let rides = scaled_reps(&inp.rides, &inp.ctx, repr)?;
    let report = greedy_match(&requests, &rides, &scenario)?;

    out.csv(
        "matches.csv",
        &["request_id", "ride_id", "oo_dist_km", "dd_dist_km", "oo_time_s", "dd_time_s", "score"],
        report.rows.iter().filter_map(|row| {
            row.matched.as_ref().map(|m| {
                vec![
                    row.request_id.clone(),
                    m.ride_id.clone(),
                    km(m.oo_dist_m),
                    km(m.dd_dist_m),
                    secs(m.oo_time_s),
                    secs(m.dd_time_s),
                    real(m.score),
                ]
            })
        }),
    )?;
    out.json("report.json", &report_value(&report)?)?;

    let dist: Vec<f64> = (1..=10).map(|i| 250.0 * i as f64).collect();
    let time: Vec<f64> = (1..=12).map(|i| 150.0 * i as f64).collect();
    let at_least = [1, 2, 5, 10];
    let mut curve = match_counts_curve(&requests, &rides, &scenario, SweepKind::Distance, &dist, &at_least);
    curve.extend(match_counts_curve(&requests, &rides, &scenario, SweepKind::Time, &time, &at_least));
    out.csv(
        "curve.csv",
        &["sweep", "threshold", "at_least", "requests"],
        curve.iter().map(|p| {
            let (kind, thr) = match p.kind {
                SweepKind::Distance => ("distance_km", km(p.threshold)),
                SweepKind::Time => ("time_s", secs(p.threshold)),
            };
            vec![kind.to_string(), thr, p.at_least.to_string(), p.requests.to_string()]
        }),
    )?;
    Ok(fields(json!({
        "requests": requests.len(),
        "rides": rides.len(),
        "n_matched": report.aggregates.n_matched,
        "savings_pct": report.aggregates.savings_pct,
    })))
}

fn compare(a: &CompareArgs, out: &mut OutDir) -> CliResult<Fields> {
    if a.metrics.is_empty() {
        return Err(CliError::Usage("--metrics is empty".into()));
    }
    let inp = load_sets(&a.input)?;
    let scenario = scenario_of(&a.scenario, &inp.ctx, a.metrics[0])?;
    let repr = Representation::Sampled(a.samples);
    let requests = scaled_reps(&inp.requests, &inp.ctx, repr)?;
    let rides = scaled_reps(&inp.rides, &inp.ctx, repr)?;
    let reports = compare_metrics(&requests, &rides, &a.metrics, &scenario)?;

    let values = reports.iter().map(report_value).collect::<CliResult<Vec<_>>>()?;
    // the plain count aliases duplicate the verbatim table keys
    let keys: Vec<String> = fields(values[0].clone())
        .keys()
        .filter(|k| !matches!(k.as_str(), "metric" | "n_matched" | "n_requests"))
        .cloned()
        .collect();
    let header: Vec<&str> = std::iter::once("metric").chain(keys.iter().map(String::as_str)).collect();
    out.csv(
        "compare.csv",
        &header,
        values.iter().map(|v| {
            std::iter::once(value_cell("metric", &v["metric"]))
                .chain(keys.iter().map(|k| value_cell(k, &v[k])))
                .collect::<Vec<_>>()
        }),
    )?;
    out.json("compare.json", &values)?;

    let sweep = weight_sweep(&requests, &rides, &scenario, &a.time_weights)?;
    out.csv(
        "weight_sweep.csv",
        &["time_weight", "oo_dist_km", "dd_dist_km", "oo_time_s", "dd_time_s", "n_matched"],
        sweep.iter().map(|p| {
            vec![
                format!("{:.3}", p.time_weight),
                format!("{:.3}", p.oo_dist_km),
                format!("{:.3}", p.dd_dist_km),
                secs(p.oo_time_s),
                secs(p.dd_time_s),
                p.n_matched.to_string(),
            ]
        }),
    )?;
    let matched: BTreeMap<&str, usize> =
        reports.iter().map(|r| (r.metric.name(), r.aggregates.n_matched)).collect();
    Ok(fields(json!({
        "requests": requests.len(),
        "rides": rides.len(),
        "n_matched": matched,
    })))
}

fn carshare(a: &CarshareArgs, out: &mut OutDir) -> CliResult<Fields> {
    let trips = load_nonempty(&a.trips)?;
    let ctx = ScaleContext::from_trips(&trips)?;
    let params = DagParams {
        dist_threshold: a.thresholds.dist_threshold,
        time_threshold: a.thresholds.time_threshold,
        weights: a.weights.weights()?,
        edge_score: a.edge_score.into(),
    };
    let (dag, matching, chains) = schedule(&trips, &ctx, &params)?;
    out.csv(
        "chains.csv",
        &["chain", "position", "trip_id"],
        chains.chains.iter().enumerate().flat_map(|(c, chain)| {
            let trips = &trips;
            chain
                .iter()
                .enumerate()
                .map(move |(pos, &i)| vec![c.to_string(), pos.to_string(), trips[i].id().to_string()])
        }),
    )?;
    let stats = chain_stats(&chains, &trips)?;
    out.csv(
        "chain_stats.csv",
        &["chain", "length", "travel_km", "pickup_km", "pickup_s"],
        stats.iter().map(|s| {
            vec![
                s.chain.to_string(),
                s.length.to_string(),
                format!("{:.3}", s.travel_km),
                format!("{:.3}", s.pickup_km),
                secs(s.pickup_s),
            ]
        }),
    )?;
    let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
    for c in &chains.chains {
        *hist.entry(c.len()).or_default() += 1;
    }
    out.csv(
        "chain_lengths.csv",
        &["length", "chains"],
        hist.iter().map(|(l, n)| vec![l.to_string(), n.to_string()]),
    )?;
    let summary = summarize(&dag, &matching, &chains);
    out.json("schedule_summary.json", &summary)?;
    Ok(fields(json!({
        "trips": summary.n_trips,
        "edges": summary.n_edges,
        "n_cars": summary.n_cars,
        "cardinality": summary.cardinality,
    })))
}
