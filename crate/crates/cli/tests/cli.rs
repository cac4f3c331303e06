use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn tripsim(args: &[&str], envs: &[(&str, &Path)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tripsim"));
    cmd.args(args).env_remove("TRIPSIM_OUT");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn ok(args: &[&str]) -> Value {
    let out = tripsim(args, &[]);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stdout));
    let line = String::from_utf8(out.stdout).unwrap();
    assert_eq!(line.trim_end().lines().count(), 1, "summary is one line");
    serde_json::from_str(&line).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Two-point trips given as `[x, y, t]` origin and destination.
fn write_trips(path: &Path, trips: &[(&str, [[f64; 3]; 2])]) {
    let text: String = trips
        .iter()
        .map(|(id, [o, d])| {
            format!("{{\"id\":\"{id}\",\"points\":[[{},{},{}],[{},{},{}]]}}\n", o[2], o[0], o[1], d[2], d[0], d[1])
        })
        .collect();
    fs::write(path, text).unwrap();
}

#[test]
fn synth_twice_is_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    ok(&["synth", "--n", "200", "--seed", "7", "--out", s(&a)]);
    ok(&["synth", "--n", "200", "--seed", "7", "--out", s(&b)]);
    assert_eq!(fs::read(a.join("trips.jsonl")).unwrap(), fs::read(b.join("trips.jsonl")).unwrap());
    let other = dir.path().join("c");
    ok(&["synth", "--n", "200", "--seed", "8", "--out", s(&other)]);
    assert_ne!(fs::read(a.join("trips.jsonl")).unwrap(), fs::read(other.join("trips.jsonl")).unwrap());
}

#[test]
fn match_without_feasible_pairs_reports_zero() {
    let dir = tempfile::tempdir().unwrap();
    let (req, rides) = (dir.path().join("req.jsonl"), dir.path().join("rides.jsonl"));
    write_trips(&req, &[("q1", [[0.0, 0.0, 0.0], [5000.0, 0.0, 900.0]])]);
    // far away in space and time
    write_trips(&rides, &[("r1", [[20_000.0, 20_000.0, 5000.0], [25_000.0, 20_000.0, 6000.0]])]);
    let out = dir.path().join("m");
    let summary = ok(&["match", "--mode", "car", "--requests", s(&req), "--rides", s(&rides), "--out", s(&out)]);
    assert_eq!(summary["n_matched"], 0);
    let report: Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["n_matched"], 0);
    assert_eq!(report["# req with at least a match"], 0);
    assert_eq!(report["req travels (km)"], 5.0);
    let matches = fs::read_to_string(out.join("matches.csv")).unwrap();
    assert_eq!(matches.lines().count(), 1);
}

#[test]
fn match_writes_km_and_whole_seconds() {
    let dir = tempfile::tempdir().unwrap();
    let (req, rides) = (dir.path().join("req.jsonl"), dir.path().join("rides.jsonl"));
    write_trips(&req, &[("q1", [[0.0, 0.0, 100.0], [5000.0, 0.0, 1000.0]])]);
    write_trips(
        &rides,
        &[
            ("r1", [[300.0, 400.0, 160.4], [5000.0, 600.0, 950.0]]),
            ("r2", [[20_000.0, 0.0, 160.0], [25_000.0, 0.0, 950.0]]),
        ],
    );
    let out = dir.path().join("m");
    ok(&["match", "--requests", s(&req), "--rides", s(&rides), "--out", s(&out)]);
    let matches = fs::read_to_string(out.join("matches.csv")).unwrap();
    let row: Vec<&str> = matches.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(&row[..6], &["q1", "r1", "0.500", "0.600", "60", "50"]);
}

#[test]
fn carshare_chain_fixture_needs_one_car() {
    let dir = tempfile::tempdir().unwrap();
    let trips = dir.path().join("t.jsonl");
    write_trips(
        &trips,
        &[
            ("a", [[0.0, 0.0, 0.0], [1000.0, 0.0, 300.0]]),
            ("b", [[1200.0, 0.0, 400.0], [3000.0, 0.0, 800.0]]),
            ("c", [[3100.0, 0.0, 900.0], [3100.0, 1900.0, 1300.0]]),
        ],
    );
    let out = dir.path().join("cs");
    let summary = ok(&["carshare", "--trips", s(&trips), "--out", s(&out)]);
    assert_eq!(summary["n_cars"], 1);
    let sched: Value = serde_json::from_str(&fs::read_to_string(out.join("schedule_summary.json")).unwrap()).unwrap();
    assert_eq!(sched["n_cars"], 1);
    assert_eq!(sched["cardinality"], 2);
    assert_eq!(sched["singleton_count"], 0);
    assert_eq!(sched["mean_chain_length"], 3.0);
    let chains = fs::read_to_string(out.join("chains.csv")).unwrap();
    assert_eq!(chains, "chain,position,trip_id\n0,0,a\n0,1,b\n0,2,c\n");
    let stats = fs::read_to_string(out.join("chain_stats.csv")).unwrap();
    assert_eq!(stats.lines().nth(1).unwrap(), "0,3,4.700,0.300,200");
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["bogus"],
        vec!["synth", "--no-such-flag"],
        vec!["synth", "--n", "many"],
        vec!["match", "--trips", "/nonexistent/trips.jsonl"],
    ] {
        let out = tripsim(&args, &[]);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let v: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["category"], "usage");
    }
}

#[test]
fn data_errors_exit_1_with_category() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.jsonl");
    fs::write(&bad, "{not json}\n").unwrap();
    let out = tripsim(&["stats", "--trips", s(&bad), "--out", s(&dir.path().join("o"))], &[]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["status"], "error");
    assert_eq!(v["category"], "format");

    let out = tripsim(&["synth", "--n", "0", "--out", s(&dir.path().join("z"))], &[]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["category"], "invalid-argument");
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    let out = dir.path().join("cfg-out");
    fs::write(&cfg, format!("# synthetic run\nn = 30\nseed = 3\nout = {}\n", out.display())).unwrap();
    let summary = ok(&["synth", "--config", s(&cfg), "--n", "12"]);
    assert_eq!(summary["trips"], 12);
    let manifest: Value = serde_json::from_str(&fs::read_to_string(out.join("run_manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"]["subcommand"], "synth");
    assert_eq!(manifest["command"]["seed"], 3);
    assert_eq!(manifest["command"]["n"], 12);
}

#[test]
fn output_dir_defaults_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("env-out");
    let out = tripsim(&["synth", "--n", "5"], &[("TRIPSIM_OUT", &target)]);
    assert!(out.status.success());
    assert!(target.join("trips.jsonl").is_file());
    assert!(target.join("run_manifest.json").is_file());
}

#[test]
fn manifest_records_digests_and_replay_detects_changes() {
    let dir = tempfile::tempdir().unwrap();
    let synth = dir.path().join("synth");
    ok(&["synth", "--n", "40", "--out", s(&synth)]);
    let trips = synth.join("trips.jsonl");
    let run = dir.path().join("run");
    ok(&["carshare", "--trips", s(&trips), "--out", s(&run)]);
    let manifest: Value = serde_json::from_str(&fs::read_to_string(run.join("run_manifest.json")).unwrap()).unwrap();
    let digest = manifest["inputs"][0]["sha256"].as_str().unwrap();
    assert_eq!(digest.len(), 64);
    assert!(manifest["outputs"].as_array().unwrap().iter().any(|o| o == "chains.csv"));

    let replay = dir.path().join("replay");
    ok(&["replay", "--manifest", s(&run.join("run_manifest.json")), "--out", s(&replay)]);
    assert_eq!(fs::read(run.join("chains.csv")).unwrap(), fs::read(replay.join("chains.csv")).unwrap());

    fs::write(&trips, fs::read_to_string(&trips).unwrap().lines().next().unwrap()).unwrap();
    let out = tripsim(&["replay", "--manifest", s(&run.join("run_manifest.json"))], &[]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["category"], "digest-mismatch");
}

#[test]
fn ingest_cuts_the_window() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.txt");
    fs::write(
        &trace,
        "28790 a 0 0 1\n28800 a 10 0 1\n28860 a 20 0 1\n28900 b 5 5 1\n32400 b 6 6 1\ngarbage\n28950 b 7 7 1\n\
         29000 c 1 1 1\n29010 c 2 2 1\n29020 c 3 3 1\n29030 c 4 4 1\n",
    )
    .unwrap();
    let out = dir.path().join("ing");
    let summary = ok(&["ingest", "--trace", s(&trace), "--hour", "8", "--out", s(&out)]);
    assert_eq!(summary["records"], 10);
    assert_eq!(summary["malformed"], 1);
    assert_eq!(summary["trips"], 3);
    let text = fs::read_to_string(out.join("trips.jsonl")).unwrap();
    let first: Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(first["id"], "a");
    assert_eq!(first["points"].as_array().unwrap().len(), 2);
}

#[test]
fn analysis_commands_write_their_files() {
    let dir = tempfile::tempdir().unwrap();
    let synth = dir.path().join("synth");
    ok(&["synth", "--n", "120", "--out", s(&synth)]);
    let trips = synth.join("trips.jsonl");
    let cases: [(&str, &[&str], &[&str]); 4] = [
        ("stats", &[], &["fits.csv", "correlations.csv", "cdf_duration.csv", "cdf_distance.csv", "grid_unique.csv", "grid_duration.csv"]),
        ("affinity", &["--score", "cp"], &["affinity.csv", "decomposition.json"]),
        ("cluster", &["--k", "3"], &["labels.csv", "coords_pca.csv", "coords_mds.csv", "cluster_summary.csv"]),
        ("compare", &["--samples", "8"], &["compare.csv", "compare.json", "weight_sweep.csv"]),
    ];
    for (cmd, extra, files) in cases {
        let out = dir.path().join(cmd);
        let mut args = vec![cmd, "--trips", s(&trips), "--out", s(&out)];
        args.extend_from_slice(extra);
        ok(&args);
        for f in files {
            assert!(out.join(f).is_file(), "{cmd} did not write {f}");
        }
        assert!(out.join("run_manifest.json").is_file());
    }
    let labels = fs::read_to_string(dir.path().join("cluster/labels.csv")).unwrap();
    assert_eq!(labels.lines().count(), 121);
    assert!(labels.lines().skip(1).all(|l| matches!(l.rsplit(',').next(), Some("0" | "1" | "2"))));
}
