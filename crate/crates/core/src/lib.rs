//! Spatio-temporal trip analysis.
//!
//! Trips are sequences of `(x, y, t)` waypoints in planar meters and seconds.
//! The crate provides:
//!
//! - trip representations, `[0,1]` scaling and fixed-size waypoint sampling ([`trip`])
//! - trace parsing, windowing and a synthetic trip generator ([`ingest`])
//! - distribution fits, correlations, CDFs and spatial grids ([`stats`])
//! - the weighted-geometric-mean (WGM) similarity and the LCSS, DTW and
//!   discrete Fréchet comparison metrics ([`metrics`])
//! - affinity matrices, spectral clustering, PCA and classical MDS ([`cluster`])
//! - threshold-filtered Catch-a-Ride / CarPool matching with travel accounting ([`matching`])
//! - minimum-fleet car-sharing schedules via DAG path partitioning ([`carshare`])

// `!(x > 0.0)` style checks are intentional: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod carshare;
pub mod cluster;
mod error;
pub mod ingest;
pub mod linalg;
pub mod matching;
pub mod metrics;
pub mod stats;
pub mod trip;

pub use error::{Error, Result};
pub use metrics::{Metric, TimeMode, WgmWeights};
pub use trip::{ScaleContext, ScaledPoint, Trip, Waypoint};
