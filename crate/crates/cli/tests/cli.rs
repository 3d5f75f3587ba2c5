use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use locsched::export::{read_events, read_figure, read_summary, read_trace};
use tempfile::tempdir;

const GOLDEN_SUMMARY: &str = include_str!("golden/seed7_summary.csv");
const GOLDEN_EVENTS: &str = include_str!("golden/seed7_events.csv");

fn locsched(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_locsched"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn simulate_matches_golden_run() {
    let dir = tempdir().unwrap();
    let events = dir.path().join("events.csv");
    let out = locsched(&[
        "simulate",
        "--strategy",
        "adaptive",
        "--beta",
        "1.0",
        "--seed",
        "7",
        "--out",
        path(&events),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out), GOLDEN_SUMMARY);
    assert_eq!(fs::read_to_string(&events).unwrap(), GOLDEN_EVENTS);
}

#[test]
fn event_log_is_byte_identical_across_runs() {
    let dir = tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = locsched(&[
            "simulate",
            "--seed",
            "11",
            "--beta",
            "0.3",
            "--out",
            path(p),
        ]);
        assert!(out.status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn event_and_trace_files_parse_back() {
    let dir = tempdir().unwrap();
    let events = dir.path().join("events.csv");
    let trace = dir.path().join("trace.csv");
    let out = locsched(&[
        "simulate",
        "--seed",
        "3",
        "--duration",
        "600",
        "--out",
        path(&events),
        "--trace-out",
        path(&trace),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));

    let summary = read_summary(out.stdout.as_slice()).unwrap();
    assert_eq!(summary.len(), 1);
    let records = read_events(fs::File::open(&events).unwrap()).unwrap();
    let fixes = records.iter().filter(|r| r.kind.as_str() == "fix").count();
    assert_eq!(fixes, summary[0].fix_count);
    let energy: f64 = records.iter().filter_map(|r| r.energy_mj).sum();
    assert!((energy - summary[0].total_energy_mj).abs() < 1e-3);

    let tr = read_trace(fs::File::open(&trace).unwrap()).unwrap();
    assert_eq!(tr.duration_s(), 600);
    assert!(tr.velocities().iter().all(|v| (1.0..=10.0).contains(v)));
}

#[test]
fn zero_duration_is_a_single_fix() {
    let out = locsched(&["simulate", "--duration", "0"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = read_summary(out.stdout.as_slice()).unwrap();
    assert_eq!(rows[0].fix_count, 1);
    assert_eq!(rows[0].sample_count, 0);
    assert_eq!(rows[0].satisfaction, 1.0);
}

#[test]
fn out_of_range_beta_exits_2() {
    let out = locsched(&["simulate", "--beta", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("beta must satisfy 0 < beta"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn unknown_config_key_exits_2() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    fs::write(&cfg, "seed = 4\nspeed_limit = 3\n").unwrap();
    let out = locsched(&["simulate", "--config", path(&cfg)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("`speed_limit`"), "{}", stderr(&out));
}

#[test]
fn unknown_strategy_exits_2() {
    let out = locsched(&["simulate", "--strategy", "fixed:lidar"]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn unwritable_output_exits_1() {
    let dir = tempdir().unwrap();
    let target = dir.path().join("missing").join("events.csv");
    let out = locsched(&["simulate", "--duration", "60", "--out", path(&target)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("cannot write"), "{}", stderr(&out));
}

#[test]
fn flags_override_config_file() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    fs::write(
        &cfg,
        "# test setup\nseed = 4\nalpha = 0.3\nbeta = 0.5\nduration_s = 900\n",
    )
    .unwrap();
    let out = locsched(&["simulate", "--config", path(&cfg), "--seed", "8"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let row = &read_summary(out.stdout.as_slice()).unwrap()[0];
    assert_eq!(row.seed, 8);
    assert_eq!(row.alpha, 0.3);
    assert_eq!(row.beta, 0.5);
    assert!(stderr(&out).contains("duration_s = 900"));
}

#[test]
fn singleton_sweep_matches_simulate() {
    let dir = tempdir().unwrap();
    let out_csv = dir.path().join("one.csv");
    let sim = locsched(&[
        "simulate",
        "--seed",
        "5",
        "--beta",
        "0.4",
        "--strategy",
        "fixed:gps",
    ]);
    assert!(sim.status.success());
    let sw = locsched(&[
        "sweep",
        "--seed",
        "5",
        "--beta",
        "0.4",
        "--strategy",
        "fixed:gps",
        "--out",
        path(&out_csv),
    ]);
    assert!(sw.status.success(), "{}", stderr(&sw));
    assert_eq!(fs::read_to_string(&out_csv).unwrap(), stdout(&sim));
}

#[test]
fn full_beta_sweep_writes_all_cells() {
    let dir = tempdir().unwrap();
    let out_csv = dir.path().join("sweep.csv");
    let out = locsched(&[
        "sweep",
        "--alphas",
        "0.5",
        "--betas",
        "0.1:1.0:0.1",
        "--seeds",
        "1..30",
        "--kinds",
        "adaptive,fixed:gps",
        "--out",
        path(&out_csv),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = read_summary(fs::File::open(&out_csv).unwrap()).unwrap();
    assert_eq!(rows.len(), 600);
    let mean_text = fs::read_to_string(dir.path().join("sweep_mean.csv")).unwrap();
    assert_eq!(mean_text.lines().count(), 1 + 20);
    assert!(mean_text.starts_with("kind,alpha,beta,runs,"));
}

#[test]
fn bad_sweep_axis_exits_2() {
    let dir = tempdir().unwrap();
    let out_csv = dir.path().join("s.csv");
    let out = locsched(&["sweep", "--betas", "0.1:1.0", "--out", path(&out_csv)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("`betas`"));
    let out = locsched(&["sweep", "--betas", "0,0.5", "--out", path(&out_csv)]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(!out_csv.exists());
}

#[test]
fn reproduce_figures_is_deterministic_and_ordered() {
    let dir = tempdir().unwrap();
    let first = dir.path().join("first");
    let second = dir.path().join("second");
    for d in [&first, &second] {
        let out = locsched(&["reproduce-figures", "--out", path(d)]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    for name in ["fig2.csv", "fig3.csv", "fig4.csv", "fig5.csv"] {
        let a = fs::read(first.join(name)).unwrap();
        assert_eq!(a, fs::read(second.join(name)).unwrap(), "{name}");
        let rows = read_figure(a.as_slice()).unwrap();
        assert_eq!(rows.len(), 10, "{name}");
        for (i, r) in rows.iter().enumerate() {
            assert!((r.beta - 0.1 * (i + 1) as f64).abs() < 1e-9);
        }
    }
    let energy = read_figure(fs::File::open(first.join("fig2.csv")).unwrap()).unwrap();
    assert!(energy.iter().all(|r| r.ours_value < r.gps_value));
    for name in ["fig3.csv", "fig5.csv"] {
        let sat = read_figure(fs::File::open(first.join(name)).unwrap()).unwrap();
        for r in sat {
            assert!((0.0..=1.0).contains(&r.gps_value) && (0.0..=1.0).contains(&r.ours_value));
        }
    }
}
