use std::cell::RefCell;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use blowlab_core::band::{band_constant, band_for, Band};
use blowlab_core::lab::{run_suite, Corpus, VerdictRow};
use blowlab_core::monitor::run_monitor;
use blowlab_core::sim::{integrate, RunStatus, SolverState, Trajectory, CODE_VERSION};
use blowlab_core::snapshot::save_velocity;
use blowlab_core::{random_band_limited, taylor_green, VelocityField};

use crate::config::{InitialCondition, RunConfig};
use crate::error::{CliError, CliResult, EXIT_CHECK_FAILED, EXIT_OK};
use crate::output::{header_lines, json_bytes, RunDir};

/// What a command produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub exit_code: i32,
    pub run_dir: PathBuf,
    pub files: Vec<PathBuf>,
    /// Short human-readable summary for stdout.
    pub summary: String,
}

fn header(cfg: &RunConfig, command: &str) -> Vec<(String, String)> {
    let mut h = vec![("command".to_string(), command.to_string()), ("code_version".to_string(), CODE_VERSION.to_string())];
    h.extend(cfg.echo());
    h
}

fn csv_field(s: &str) -> String {
    s.replace([',', '\n'], ";")
}

fn verdict_csv(rows: &[VerdictRow], header: &[(String, String)]) -> String {
    let mut out = header_lines(header);
    out.push_str("field,seed,decay,check,params,mode,lhs,rhs,ratio,holds,gated,error\n");
    for r in rows {
        let (lhs, rhs, ratio, holds) = match &r.verdict {
            Some(v) => (v.lhs.to_string(), v.rhs.to_string(), v.ratio.to_string(), v.holds.to_string()),
            None => (String::new(), String::new(), String::new(), "false".to_string()),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.field_index,
            r.seed,
            r.decay,
            r.check,
            csv_field(&r.params),
            r.mode,
            lhs,
            rhs,
            ratio,
            holds,
            r.gated,
            csv_field(r.error.as_deref().unwrap_or(""))
        );
    }
    out
}

/// Runs the inequality suite over the configured corpus. Exit status is
/// zero iff every gating (lattice-exact) verdict holds.
pub fn cmd_verify(cfg: &RunConfig, inject_mean_violation: bool) -> CliResult<Outcome> {
    let corpus_cfg = cfg.corpus_config()?;
    let mut corpus = Corpus::generate(&corpus_cfg)?;
    if inject_mean_violation {
        corpus.inject_mean_violation(corpus_cfg.base_seed + corpus_cfg.size as u64);
    }
    let rows = run_suite(&corpus, &cfg.suite_config());
    let failed: Vec<&VerdictRow> = rows.iter().filter(|r| r.gated && !r.passed()).collect();
    let gated = rows.iter().filter(|r| r.gated).count();

    let dir = RunDir::create(&cfg.out)?;
    dir.log(&format!("verify: {} fields, {} rows", corpus.len(), rows.len()))?;
    let mut h = header(cfg, "verify");
    if inject_mean_violation {
        h.push(("inject_mean_violation".into(), "true".into()));
    }
    let csv = dir.write("verify.csv", verdict_csv(&rows, &h).as_bytes())?;
    let json = serde_json::json!({
        "header": h.iter().cloned().collect::<std::collections::BTreeMap<_, _>>(),
        "summary": {
            "fields": corpus.len(),
            "rows": rows.len(),
            "gated": gated,
            "failed": failed.len(),
            "passed": failed.is_empty(),
        },
        "rows": rows,
    });
    let json = dir.write("verify.json", &json_bytes(&json))?;

    let mut summary = format!("verify: {} fields, {} gated verdicts, {} failed\n", corpus.len(), gated, failed.len());
    for r in failed.iter().take(20) {
        let why = r.error.clone().unwrap_or_else(|| {
            r.verdict.as_ref().map(|v| format!("ratio {}", v.ratio)).unwrap_or_default()
        });
        let label = if r.params.is_empty() { r.check.to_string() } else { format!("{} {}", r.check, r.params) };
        let _ = writeln!(summary, "  FAIL seed={} field={} {label}: {why}", r.seed, r.field_index);
    }
    dir.log(&format!("verify: {} failed", failed.len()))?;
    Ok(Outcome {
        exit_code: if failed.is_empty() { EXIT_OK } else { EXIT_CHECK_FAILED },
        run_dir: dir.path().to_path_buf(),
        files: vec![csv, json],
        summary,
    })
}

fn initial_field(cfg: &RunConfig) -> CliResult<VelocityField> {
    let lattice = cfg.lattice()?;
    let s = &cfg.simulate;
    let u = match s.initial {
        InitialCondition::TaylorGreen => taylor_green(lattice),
        InitialCondition::Random => {
            let k = lattice.k_unit();
            random_band_limited(lattice, s.kmin * k, s.kmax * k, s.decay, cfg.seed)?
        }
    };
    if !(s.amplitude.is_finite() && s.amplitude > 0.0) {
        return Err(CliError::Usage(format!("amplitude must be positive, got {}", s.amplitude)));
    }
    Ok(if s.amplitude == 1.0 { u } else { u.scaled(s.amplitude) })
}

/// Integrates the configured initial field and writes the trajectory. A
/// blown-up scheme still writes the partial trajectory and exits nonzero.
pub fn cmd_simulate(cfg: &RunConfig) -> CliResult<Outcome> {
    let lattice = cfg.lattice()?;
    cfg.solver.validate(lattice)?;
    let u0 = initial_field(cfg)?;
    let dir = RunDir::create(&cfg.out)?;
    dir.log(&format!("simulate: n={} nu={} t_end={}", lattice.n(), cfg.solver.nu, cfg.solver.t_end))?;

    let mut snapshots: Vec<f64> = cfg.simulate.snapshots.clone();
    snapshots.sort_by(f64::total_cmp);
    let snapshot_error: RefCell<Option<CliError>> = RefCell::new(None);
    let written: RefCell<Vec<PathBuf>> = RefCell::new(Vec::new());
    let mut next = 0;
    let mut hook = |state: &SolverState| {
        while next < snapshots.len() && state.t >= snapshots[next] - 1e-12 {
            let path = dir.file(&format!("snapshot-{next:03}.blw"));
            match save_velocity(&path, &state.u) {
                Ok(()) => written.borrow_mut().push(path),
                Err(e) => *snapshot_error.borrow_mut() = Some(e.into()),
            }
            next += 1;
        }
        Vec::new()
    };
    let mut trajectory = integrate(&u0, &cfg.solver, &mut [&mut hook])?;
    if let Some(e) = snapshot_error.into_inner() {
        return Err(e);
    }
    trajectory.header.insert("initial", cfg.simulate.initial.label());
    for (k, v) in header(cfg, "simulate") {
        trajectory.header.insert(format!("config.{k}"), v);
    }

    let csv = dir.write("trajectory.csv", trajectory.to_csv_string().as_bytes())?;
    let json = dir.write("trajectory.json", &json_bytes(&trajectory.to_json()))?;
    let mut files = vec![csv, json];
    files.extend(written.into_inner());

    let last = trajectory.samples.last().expect("initial sample always present");
    let (exit_code, status) = match &trajectory.status {
        RunStatus::Completed => (EXIT_OK, "completed".to_string()),
        RunStatus::Failed { t, message } => (EXIT_CHECK_FAILED, format!("failed at t={t}: {message}")),
    };
    dir.log(&format!("simulate: {status}"))?;
    let summary = format!(
        "simulate: {} samples, t={} l2={} ({status})\n",
        trajectory.samples.len(),
        last.t,
        last.norms.l2
    );
    Ok(Outcome { exit_code, run_dir: dir.path().to_path_buf(), files, summary })
}

/// Evaluates blow-up functionals and proof-level checks on a trajectory file.
pub fn cmd_monitor(cfg: &RunConfig, trajectory_path: &Path) -> CliResult<Outcome> {
    let trajectory = Trajectory::read_path(trajectory_path).map_err(|e| match e {
        blowlab_core::Error::Io(msg) => CliError::Io(format!("{}: {msg}", trajectory_path.display())),
        other => CliError::Usage(format!("{}: {other}", trajectory_path.display())),
    })?;
    if trajectory.samples.is_empty() {
        return Err(CliError::Usage(format!("{}: trajectory has no samples", trajectory_path.display())));
    }
    let nu = cfg
        .monitor
        .nu
        .or_else(|| trajectory.header.get_f64("nu"))
        .ok_or_else(|| CliError::Usage("viscosity unknown: pass --nu or use a trajectory with a `nu` header".into()))?;
    let mut mcfg = cfg.monitor.monitor_config();
    if mcfg.t_star.is_empty() {
        let last = trajectory.samples.last().map_or(0.0, |s| s.t);
        mcfg.t_star = vec![if last > 0.0 { 2.0 * last } else { 1.0 }];
    }
    let report = run_monitor(&trajectory, &mcfg, nu)?;

    let dir = RunDir::create(&cfg.out)?;
    dir.log(&format!("monitor: {} samples from {}", trajectory.samples.len(), trajectory_path.display()))?;
    let mut h: Vec<(String, String)> =
        header(cfg, "monitor").into_iter().filter(|(k, _)| !k.contains('.') || k.starts_with("monitor.")).collect();
    for key in ["n", "period", "nu", "t_end", "dt", "initial", "code_version"] {
        if let Some(v) = trajectory.header.get(key) {
            h.push((format!("trajectory.{key}"), v.to_string()));
        }
    }
    h.push(("monitor.nu_effective".into(), nu.to_string()));
    h.push((
        "monitor.t_star_effective".into(),
        mcfg.t_star.iter().map(f64::to_string).collect::<Vec<_>>().join(";"),
    ));
    let mut csv = Vec::new();
    report.write_csv(&mut csv, &h)?;
    let csv = dir.write("monitor.csv", &csv)?;
    let json = dir.write("monitor.json", &json_bytes(&report.summary_json(&h)))?;

    let mut summary = format!("monitor: {} functional traces\n", report.traces.len());
    let mut line = |name: &str, constant: Option<f64>, reason: Option<&str>| {
        let _ = match (constant, reason) {
            (Some(c), _) => writeln!(summary, "  {name}: constant {c}"),
            (None, Some(r)) => writeln!(summary, "  {name}: unavailable ({r})"),
            (None, None) => writeln!(summary, "  {name}: unavailable"),
        };
    };
    line("h52_energy", report.h52_energy.ok().map(|r| r.c_emp), report.h52_energy.reason());
    line("h12_log_growth", report.h12_log_growth.ok().map(|r| r.constant), report.h12_log_growth.reason());
    line("xm1_gronwall", report.xm1_gronwall.ok().map(|r| r.constant), report.xm1_gronwall.reason());
    for c in &report.crossings {
        let _ = writeln!(summary, "  crossing {} at t={}", c.name, c.t);
    }
    Ok(Outcome {
        exit_code: if report.checks_hold() { EXIT_OK } else { EXIT_CHECK_FAILED },
        run_dir: dir.path().to_path_buf(),
        files: vec![csv, json],
        summary,
    })
}

fn band_label(band: &Band) -> String {
    match band {
        Band::Low { alpha } => format!("low(|k|<={alpha})"),
        Band::Middle { alpha, beta } => format!("middle({alpha}<|k|<={beta})"),
        Band::High { beta } => format!("high(|k|>{beta})"),
    }
}

/// Table of lattice against continuum band constants.
pub fn cmd_constants(cfg: &RunConfig) -> CliResult<Outcome> {
    let lattice = cfg.lattice()?;
    let mut rows = Vec::new();
    for r in &cfg.constants.requests {
        let band = band_for(r.a, r.alpha, r.beta)?;
        let c = band_constant(lattice, r.a, band)
            .map_err(|e| CliError::Usage(format!("request a={} alpha={} beta={:?}: {e}", r.a, r.alpha, r.beta)))?;
        rows.push((r, band, c));
    }
    let dir = RunDir::create(&cfg.out)?;
    dir.log(&format!("constants: {} requests on n={}", rows.len(), lattice.n()))?;
    let h = header(cfg, "constants");
    let mut csv = header_lines(&h);
    csv.push_str("a,alpha,beta,band,lattice,continuum,ratio,flag\n");
    let mut table = format!("{:>6} {:>8} {:>8} {:<26} {:>14} {:>14} {:>10}\n", "a", "alpha", "beta", "band", "lattice", "continuum", "ratio");
    let mut json_rows = Vec::new();
    for (r, band, c) in &rows {
        let flag = if c.lattice_value == 0.0 { "empty" } else { "" };
        let beta = r.beta.map_or(String::new(), |b| b.to_string());
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            r.a,
            r.alpha,
            beta,
            band_label(band),
            c.lattice_value,
            c.continuum_value,
            c.ratio(),
            flag
        );
        let _ = writeln!(
            table,
            "{:>6} {:>8} {:>8} {:<26} {:>14.8} {:>14.8} {:>10.6} {}",
            r.a,
            r.alpha,
            beta,
            band_label(band),
            c.lattice_value,
            c.continuum_value,
            c.ratio(),
            flag
        );
        json_rows.push(serde_json::json!({
            "a": r.a,
            "alpha": r.alpha,
            "beta": r.beta,
            "band": band,
            "lattice": c.lattice_value,
            "continuum": c.continuum_value,
            "ratio": c.ratio(),
            "empty": c.lattice_value == 0.0,
        }));
    }
    let csv = dir.write("constants.csv", csv.as_bytes())?;
    let json = serde_json::json!({
        "header": h.iter().cloned().collect::<std::collections::BTreeMap<_, _>>(),
        "rows": json_rows,
    });
    let json = dir.write("constants.json", &json_bytes(&json))?;
    Ok(Outcome { exit_code: EXIT_OK, run_dir: dir.path().to_path_buf(), files: vec![csv, json], summary: table })
}
