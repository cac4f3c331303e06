use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use tripsim_core::carshare::EdgeScore;
use tripsim_core::matching::{Mode, Representation};
use tripsim_core::{Metric, WgmWeights};

pub const DEFAULT_SEED: u64 = 7;

#[derive(Debug, Parser)]
#[command(name = "tripsim", version, about = "Trip similarity, ride matching and car-sharing pipelines")]
pub struct Cli {
    /// Line-oriented `key = value` defaults; explicit flags win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "subcommand")]
pub enum Command {
    /// Parse a raw trace, cut a time window and write trips.jsonl.
    Ingest(IngestArgs),
    /// Generate a synthetic trip set.
    Synth(SynthArgs),
    /// Distribution fits, correlations, CDFs and spatial grids.
    Stats(StatsArgs),
    /// Pairwise affinity matrix and its symmetric decomposition.
    Affinity(AffinityArgs),
    /// Spectral clustering with PCA and MDS coordinates.
    Cluster(ClusterArgs),
    /// Greedy request-to-ride matching.
    Match(MatchArgs),
    /// Matching under several metrics plus a temporal weight sweep.
    Compare(CompareArgs),
    /// Minimum-fleet car-sharing schedule.
    Carshare(CarshareArgs),
    /// Re-run a recorded pipeline from its run_manifest.json.
    #[serde(skip)]
    Replay(ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Ingest(_) => "ingest",
            Command::Synth(_) => "synth",
            Command::Stats(_) => "stats",
            Command::Affinity(_) => "affinity",
            Command::Cluster(_) => "cluster",
            Command::Match(_) => "match",
            Command::Compare(_) => "compare",
            Command::Carshare(_) => "carshare",
            Command::Replay(_) => "replay",
        }
    }

    pub fn out_mut(&mut self) -> Option<&mut PathBuf> {
        match self {
            Command::Ingest(a) => Some(&mut a.out.out),
            Command::Synth(a) => Some(&mut a.out.out),
            Command::Stats(a) => Some(&mut a.out.out),
            Command::Affinity(a) => Some(&mut a.out.out),
            Command::Cluster(a) => Some(&mut a.out.out),
            Command::Match(a) => Some(&mut a.out.out),
            Command::Compare(a) => Some(&mut a.out.out),
            Command::Carshare(a) => Some(&mut a.out.out),
            Command::Replay(_) => None,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct OutArgs {
    /// Output directory.
    #[arg(long, env = "TRIPSIM_OUT", default_value = "tripsim-out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct WeightArgs {
    /// Spatial WGM weight.
    #[arg(long, default_value_t = 0.6)]
    pub w_space: f64,
    /// Temporal WGM weight.
    #[arg(long, default_value_t = 0.4)]
    pub w_time: f64,
}

impl WeightArgs {
    pub fn weights(&self) -> tripsim_core::Result<WgmWeights> {
        WgmWeights::new(self.w_space, self.w_time)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReprKind {
    Od,
    Sampled,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ReprArgs {
    /// Trip representation used for scoring.
    #[arg(long, value_enum, default_value_t = ReprKind::Od)]
    pub repr: ReprKind,
    /// Waypoints per trip for the sampled representation.
    #[arg(long, default_value_t = 50)]
    pub samples: usize,
}

impl ReprArgs {
    pub fn representation(&self) -> Representation {
        match self.repr {
            ReprKind::Od => Representation::Od,
            ReprKind::Sampled => Representation::Sampled(self.samples),
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ThresholdArgs {
    /// Meters.
    #[arg(long, default_value_t = 1800.0)]
    pub dist_threshold: f64,
    /// Seconds.
    #[arg(long, default_value_t = 900.0)]
    pub time_threshold: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct IngestArgs {
    /// Raw trace file.
    #[arg(long)]
    pub trace: PathBuf,
    /// Whitespace-separated column layout; `_` skips a column.
    #[arg(long, default_value = "t id x y speed")]
    pub format: String,
    /// One-hour window starting at this hour; overrides --window-start/--window-end.
    #[arg(long)]
    pub hour: Option<u32>,
    #[arg(long)]
    pub window_start: Option<f64>,
    #[arg(long)]
    pub window_end: Option<f64>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SynthArgs {
    /// Number of trips.
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 50)]
    pub waypoints: usize,
    /// Cross-track jitter in meters.
    #[arg(long, default_value_t = 20.0)]
    pub jitter: f64,
    #[arg(long, default_value_t = 2.0)]
    pub duration_shape: f64,
    /// Seconds.
    #[arg(long, default_value_t = 300.0)]
    pub duration_scale: f64,
    /// Median OD displacement in meters.
    #[arg(long, default_value_t = 3000.0)]
    pub displacement_median: f64,
    #[arg(long, default_value_t = 0.6)]
    pub displacement_sigma: f64,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct StatsArgs {
    /// trips.jsonl input.
    #[arg(long)]
    pub trips: PathBuf,
    /// Grid for per-cell duration quartiles.
    #[arg(long, default_value_t = 10)]
    pub grid_rows: usize,
    #[arg(long, default_value_t = 10)]
    pub grid_cols: usize,
    /// Grid for unique trip counts.
    #[arg(long, default_value_t = 300)]
    pub density_rows: usize,
    #[arg(long, default_value_t = 300)]
    pub density_cols: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreKind {
    Wgm,
    Car,
    Cp,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct AffinityArgs {
    #[arg(long)]
    pub trips: PathBuf,
    #[arg(long, value_enum, default_value_t = ScoreKind::Wgm)]
    pub score: ScoreKind,
    #[command(flatten)]
    pub weights: WeightArgs,
    #[command(flatten)]
    pub repr: ReprArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ClusterArgs {
    #[arg(long)]
    pub trips: PathBuf,
    /// Number of clusters.
    #[arg(long, default_value_t = 8)]
    pub k: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Asymmetric scores are clustered on their symmetric part.
    #[arg(long, value_enum, default_value_t = ScoreKind::Wgm)]
    pub score: ScoreKind,
    /// Pass similarities through exp(-gamma (1 - s)) before clustering.
    #[arg(long)]
    pub kernel_gamma: Option<f64>,
    #[command(flatten)]
    pub weights: WeightArgs,
    #[command(flatten)]
    pub repr: ReprArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeArg {
    Car,
    Carpool,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Car => Mode::Car,
            ModeArg::Carpool => Mode::Carpool,
        }
    }
}

/// Either one trip set split at random, or explicit request and ride sets.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct TripSetArgs {
    /// Trip set to split into requests and rides.
    #[arg(long, conflicts_with_all = ["requests", "rides"], required_unless_present_all = ["requests", "rides"])]
    pub trips: Option<PathBuf>,
    /// Requests drawn from --trips; defaults to one sixth of the set.
    #[arg(long, requires = "trips")]
    pub n_requests: Option<usize>,
    #[arg(long, requires = "rides")]
    pub requests: Option<PathBuf>,
    #[arg(long, requires = "requests")]
    pub rides: Option<PathBuf>,
    /// Seed of the request/ride split.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ScenarioArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::Car)]
    pub mode: ModeArg,
    #[command(flatten)]
    pub thresholds: ThresholdArgs,
    #[command(flatten)]
    pub weights: WeightArgs,
    /// LCSS spatial match threshold in meters.
    #[arg(long, default_value_t = 1800.0)]
    pub lcss_eps_space: f64,
    /// LCSS temporal match threshold in seconds.
    #[arg(long, default_value_t = 900.0)]
    pub lcss_eps_time: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct MatchArgs {
    #[command(flatten)]
    pub input: TripSetArgs,
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[arg(long, default_value_t = Metric::Wgm)]
    pub metric: Metric,
    #[command(flatten)]
    pub repr: ReprArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CompareArgs {
    #[command(flatten)]
    pub input: TripSetArgs,
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Comma-separated metric names.
    #[arg(long, value_delimiter = ',', default_value = "wgm,wgm_time,lcss,dtw,dtw_time,frechet")]
    pub metrics: Vec<Metric>,
    /// Comma-separated temporal weights for the WGM sweep.
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")]
    pub time_weights: Vec<f64>,
    /// Sampled representation size; compare always uses sampled trips.
    #[arg(long, default_value_t = 50)]
    pub samples: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeScoreArg {
    Handover,
    WholeTrip,
}

impl From<EdgeScoreArg> for EdgeScore {
    fn from(e: EdgeScoreArg) -> EdgeScore {
        match e {
            EdgeScoreArg::Handover => EdgeScore::Handover,
            EdgeScoreArg::WholeTrip => EdgeScore::WholeTrip,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CarshareArgs {
    #[arg(long)]
    pub trips: PathBuf,
    #[command(flatten)]
    pub thresholds: ThresholdArgs,
    #[command(flatten)]
    pub weights: WeightArgs,
    #[arg(long, value_enum, default_value_t = EdgeScoreArg::Handover)]
    pub edge_score: EdgeScoreArg,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ReplayArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Write into this directory instead of the recorded one.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
