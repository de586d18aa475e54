//! End-to-end tests of the `blowlab` binary: exit codes, report files and
//! golden Taylor-Green outputs.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_blowlab");

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn blowlab(out: &Path, args: &[&str]) -> Output {
    Command::new(BIN).arg("--out").arg(out).args(args).output().expect("spawn blowlab")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Directory named on the final `wrote ...` line.
fn run_dir(o: &Output) -> PathBuf {
    let text = stdout(o);
    let line = text.lines().rev().find(|l| l.starts_with("wrote ")).expect("wrote line");
    PathBuf::from(line.trim_start_matches("wrote "))
}

/// Splits a report into `# k=v` header lines and data rows.
fn split_report(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut header = Vec::new();
    let mut rows = Vec::new();
    for line in text.lines() {
        if let Some(meta) = line.strip_prefix("# ") {
            header.push(meta.to_string());
        } else if !line.is_empty() {
            rows.push(line.split(',').map(str::to_string).collect());
        }
    }
    (header, rows)
}

/// Compares two CSV reports cell by cell. Numbers agree to a relative
/// tolerance; everything else must match exactly.
fn assert_reports_close(got: &str, want: &str, rtol: f64) {
    let (gh, gr) = split_report(got);
    let (wh, wr) = split_report(want);
    assert_eq!(gh, wh, "header lines differ");
    assert_eq!(gr.len(), wr.len(), "row count differs");
    for (i, (g, w)) in gr.iter().zip(&wr).enumerate() {
        assert_eq!(g.len(), w.len(), "row {i} width");
        for (a, b) in g.iter().zip(w) {
            match (a.parse::<f64>(), b.parse::<f64>()) {
                (Ok(x), Ok(y)) => {
                    assert!((x - y).abs() <= rtol * x.abs().max(y.abs()) + 1e-300, "row {i}: {a} vs {b}")
                }
                _ => assert_eq!(a, b, "row {i}"),
            }
        }
    }
}

#[test]
fn empty_corpus_passes_with_header() {
    let tmp = tempfile::tempdir().unwrap();
    let o = blowlab(tmp.path(), &["--lattice-n", "16", "verify", "--corpus-size", "0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(run_dir(&o).join("verify.csv")).unwrap();
    assert!(csv.starts_with("# command=verify\n"));
    assert!(csv.contains("# lattice.n=16\n"));
    let (_, rows) = split_report(&csv);
    assert_eq!(rows.len(), 1, "only the column line");
    assert_eq!(rows[0][0], "field");
}

#[test]
fn small_corpus_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let o = blowlab(tmp.path(), &["--lattice-n", "16", "--seed", "3", "verify", "--corpus-size", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let dir = run_dir(&o);
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.join("verify.json")).unwrap()).unwrap();
    assert!(json["rows"].as_array().is_some_and(|r| !r.is_empty()));
    assert!(dir.join("run.log").exists());
}

#[test]
fn injected_mean_violation_names_the_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let o = blowlab(tmp.path(), &["--lattice-n", "16", "--seed", "40", "verify", "--corpus-size", "2", "--inject-mean-violation"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("FAIL seed=42"), "{text}");
    assert!(text.lines().filter(|l| l.contains("FAIL")).all(|l| l.contains("seed=42")));
}

#[test]
fn reruns_never_overwrite() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["--lattice-n", "16", "constants", "--a", "1", "--alpha", "4"];
    let a = run_dir(&blowlab(tmp.path(), &args));
    let b = run_dir(&blowlab(tmp.path(), &args));
    assert_ne!(a, b);
    assert_eq!(std::fs::read(a.join("constants.csv")).unwrap(), std::fs::read(b.join("constants.csv")).unwrap());
}

#[test]
fn nonpositive_viscosity_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    for nu in ["0", "-0.5"] {
        let o = blowlab(tmp.path(), &["--lattice-n", "16", "simulate", "--nu", nu]);
        assert_eq!(o.status.code(), Some(2), "nu={nu}");
        assert!(stderr(&o).contains("viscosity"));
    }
}

#[test]
fn bad_flags_are_usage_errors() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(blowlab(tmp.path(), &["simulate", "--dealias", "44"]).status.code(), Some(2));
    assert_eq!(blowlab(tmp.path(), &["frobnicate"]).status.code(), Some(2));
    assert_eq!(blowlab(tmp.path(), &["--lattice-n", "7", "constants"]).status.code(), Some(2));
}

#[test]
fn unknown_config_key_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    std::fs::write(&cfg, "[solver]\nviscosity = 1.0\n").unwrap();
    let o = blowlab(tmp.path(), &["--config", cfg.to_str().unwrap(), "simulate"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_and_flag_overrides() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    std::fs::write(&cfg, "[lattice]\nn = 8\n[solver]\nnu = 0.3\nt_end = 0.0\n").unwrap();
    let o = blowlab(tmp.path(), &["--config", cfg.to_str().unwrap(), "simulate", "--nu", "0.25"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(run_dir(&o).join("trajectory.csv")).unwrap();
    assert!(csv.contains("# config.lattice.n=8\n"));
    assert!(csv.contains("# config.solver.nu=0.25\n"));
}

#[test]
fn zero_duration_gives_one_sample() {
    let tmp = tempfile::tempdir().unwrap();
    let o = blowlab(tmp.path(), &["--lattice-n", "16", "simulate", "--t-end", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(run_dir(&o).join("trajectory.csv")).unwrap();
    let (header, rows) = split_report(&csv);
    assert_eq!(rows.len(), 2, "column line plus one sample");
    assert!(header.contains(&"status=completed".to_string()));
}

#[test]
fn taylor_green_matches_golden_trajectory() {
    let tmp = tempfile::tempdir().unwrap();
    let o = blowlab(
        tmp.path(),
        &[
            "--lattice-n", "16", "simulate", "--initial", "taylor-green", "--nu", "0.05", "--dt", "0.01", "--t-end",
            "0.2", "--sample-every", "5", "--dealias", "23",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let got = std::fs::read_to_string(run_dir(&o).join("trajectory.csv")).unwrap();
    let want = std::fs::read_to_string(golden("taylor_green_n16.csv")).unwrap();
    assert_reports_close(&got, &want, 1e-9);

    // The golden initial row is itself checked against the closed-form
    // Taylor-Green norms: l2 = 1/2, hdot_s = 3^{s/2}/2, X^s = 2 * 3^{s/2}.
    let (_, rows) = split_report(&want);
    let cols = &rows[0];
    let first = &rows[1];
    let value = |name: &str| first[cols.iter().position(|c| c == name).unwrap()].parse::<f64>().unwrap();
    assert!((value("l2") - 0.5).abs() < 1e-14);
    for s in [0.5f64, 1.0, 1.5, 2.0, 2.5] {
        let want = 3f64.powf(s / 2.0) / 2.0;
        assert!((value(&format!("h{s}")) - want).abs() < 1e-12 * want);
    }
    for s in [-1.0f64, 0.0, 1.0] {
        let want = 2.0 * 3f64.powf(s / 2.0);
        assert!((value(&format!("x{s}")) - want).abs() < 1e-12 * want);
    }
}

#[test]
fn monitor_matches_golden_report() {
    let tmp = tempfile::tempdir().unwrap();
    let traj = golden("taylor_green_n16.csv");
    let o = blowlab(tmp.path(), &["monitor", "--t-star", "0.4", traj.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let got = std::fs::read_to_string(run_dir(&o).join("monitor.csv")).unwrap();
    let want = std::fs::read_to_string(golden("taylor_green_n16_monitor.csv")).unwrap();
    assert_reports_close(&got, &want, 1e-9);
}

#[test]
fn monitor_defaults_t_star_to_twice_the_last_time() {
    let tmp = tempfile::tempdir().unwrap();
    let traj = golden("taylor_green_n16.csv");
    let o = blowlab(tmp.path(), &["monitor", traj.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(run_dir(&o).join("monitor.csv")).unwrap();
    assert!(csv.contains("# monitor.t_star_effective=0.4\n"));
}

#[test]
fn monitor_single_sample_marks_checks_unavailable() {
    let tmp = tempfile::tempdir().unwrap();
    let sim = blowlab(tmp.path(), &["--lattice-n", "16", "simulate", "--t-end", "0"]);
    let traj = run_dir(&sim).join("trajectory.csv");
    let o = blowlab(tmp.path(), &["monitor", "--t-star", "1", traj.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let json: serde_json::Value =
        serde_json::from_slice(&std::fs::read(run_dir(&o).join("monitor.json")).unwrap()).unwrap();
    let checks = json["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 3);
    for c in checks {
        assert_eq!(c["available"], false, "{c}");
        assert!(c["reason"].as_str().unwrap().contains("2 samples"));
    }
}

#[test]
fn monitor_t_star_inside_samples_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let traj = golden("taylor_green_n16.csv");
    let o = blowlab(tmp.path(), &["monitor", "--t-star", "0.1", traj.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("t_star"));
}

#[test]
fn malformed_trajectory_names_the_line() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.csv");
    std::fs::write(&bad, "# blowlab trajectory\n# nu=0.1\nt,step,l2\n0,0,1\n0.1,1,oops\n").unwrap();
    let o = blowlab(tmp.path(), &["monitor", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("line 5") && err.contains("oops"), "{err}");
}

#[test]
fn missing_trajectory_is_an_io_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = blowlab(tmp.path(), &["monitor", tmp.path().join("absent.csv").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

fn constants_rows(o: &Output) -> Vec<Vec<String>> {
    let csv = std::fs::read_to_string(run_dir(o).join("constants.csv")).unwrap();
    split_report(&csv).1.into_iter().skip(1).collect()
}

#[test]
fn constants_middle_band_continuum_value() {
    let tmp = tempfile::tempdir().unwrap();
    let o = blowlab(tmp.path(), &["constants", "--a", "-1.5", "--alpha", "2", "--beta", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = constants_rows(&o);
    let continuum: f64 = rows[0][5].parse().unwrap();
    let oracle = (4.0 * std::f64::consts::PI * 4f64.ln()).sqrt();
    assert!((continuum - oracle).abs() < 1e-12);
    assert!((continuum - 4.1738).abs() < 1e-4);
}

#[test]
fn constants_empty_shell_is_flagged() {
    let tmp = tempfile::tempdir().unwrap();
    let o = blowlab(tmp.path(), &["constants", "--a", "1", "--alpha", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = constants_rows(&o);
    assert_eq!(rows[0][4], "0");
    assert_eq!(rows[0][7], "empty");
}

#[test]
fn constants_ratio_approaches_one() {
    let tmp = tempfile::tempdir().unwrap();
    let mut gaps = Vec::new();
    for alpha in ["4", "8", "16"] {
        let o = blowlab(tmp.path(), &["--lattice-n", "64", "constants", "--a", "1", "--alpha", alpha]);
        let ratio: f64 = constants_rows(&o)[0][6].parse().unwrap();
        gaps.push((ratio - 1.0).abs());
    }
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    assert!(gaps[2] < 0.01);
}

#[test]
fn divergent_constant_request_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = blowlab(tmp.path(), &["constants", "--a", "-1.5", "--alpha", "2"]);
    assert_eq!(o.status.code(), Some(2), "{}", stdout(&o));
}
