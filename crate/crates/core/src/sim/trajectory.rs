use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::config::{SolverConfig, TimeStep};
use super::solver::{Solver, SolverState};
use crate::error::{Error, Result};
use crate::field::VelocityField;
use crate::norms::{full_report, NormReport, ReportOrders};

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub step: usize,
    /// Length of the step that produced this sample (0 for the initial one).
    pub dt: f64,
    pub norms: NormReport,
    pub div_max: f64,
    pub extras: Vec<(String, f64)>,
}

impl TrajectorySample {
    pub fn extra(&self, key: &str) -> Option<f64> {
        self.extras.iter().find(|(k, _)| k == key).map(|&(_, v)| v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum RunStatus {
    Completed,
    Failed { t: f64, message: String },
}

/// Free-form `key=value` metadata: configuration echo, lattice, code version.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryHeader {
    pub meta: BTreeMap<String, String>,
}

impl TrajectoryHeader {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.meta.get(key).map(String::as_str)
    }

    pub fn get_f64(&self, key: &str) -> Option<f64> {
        self.get(key)?.parse().ok()
    }

    pub fn insert(&mut self, key: impl Into<String>, value: impl ToString) {
        self.meta.insert(key.into(), value.to_string());
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub header: TrajectoryHeader,
    pub samples: Vec<TrajectorySample>,
    pub status: RunStatus,
}

pub type SampleHook<'a> = dyn FnMut(&SolverState) -> Vec<(String, f64)> + 'a;

fn sample(state: &SolverState, dt: f64, hooks: &mut [&mut SampleHook<'_>]) -> Result<TrajectorySample> {
    let norms = full_report(&state.u, &ReportOrders::default())?;
    let mut extras = Vec::new();
    for hook in hooks.iter_mut() {
        extras.extend(hook(state));
    }
    Ok(TrajectorySample { t: state.t, step: state.step, dt, norms, div_max: state.u.divergence_defect(), extras })
}

pub fn integrate(u0: &VelocityField, config: &SolverConfig, hooks: &mut [&mut SampleHook<'_>]) -> Result<Trajectory> {
    integrate_with_state(u0, config, hooks).map(|(t, _)| t)
}

/// As [`integrate`], also returning the last valid state.
pub fn integrate_with_state(
    u0: &VelocityField,
    config: &SolverConfig,
    hooks: &mut [&mut SampleHook<'_>],
) -> Result<(Trajectory, SolverState)> {
    let lattice = u0.as_array()[0].lattice();
    let solver = Solver::new(lattice, config.clone())?;
    let mut header = TrajectoryHeader::default();
    header.insert("code_version", CODE_VERSION);
    header.insert("n", lattice.n());
    header.insert("period", lattice.period());
    for (k, v) in config.echo() {
        header.insert(k, v);
    }

    let mut state = SolverState::new(u0.clone());
    let mut samples = vec![sample(&state, 0.0, hooks)?];
    let mut status = RunStatus::Completed;
    let t_end = config.t_end;
    let fixed = match config.dt {
        TimeStep::Fixed(dt) => Some(dt),
        TimeStep::Auto => None,
    };
    // With a fixed step, times are k·dt with a final partial step onto t_end.
    let fixed_steps = fixed.map(|dt| ((t_end / dt) * (1.0 - 1e-12)).ceil() as usize);
    let mut last_dt = 0.0;
    loop {
        let done = match fixed_steps {
            Some(n) => state.step >= n,
            None => state.t >= t_end,
        };
        if done {
            break;
        }
        let (dt, t_next) = match (fixed, fixed_steps) {
            (Some(_), Some(n)) if state.step + 1 == n => (t_end - state.t, t_end),
            (Some(dt), _) => (dt, (state.step + 1) as f64 * dt),
            _ => {
                let remaining = t_end - state.t;
                let dt = solver.preferred_dt(&state);
                if dt >= remaining * (1.0 - 1e-9) {
                    (remaining, t_end)
                } else {
                    (dt, state.t + dt)
                }
            }
        };
        match solver.step(&state, dt) {
            Ok(mut next) => {
                next.t = t_next;
                state = next;
                last_dt = dt;
                let last = match fixed_steps {
                    Some(n) => state.step >= n,
                    None => state.t >= t_end,
                };
                if state.step % config.sample_every == 0 || last {
                    samples.push(sample(&state, dt, hooks)?);
                }
            }
            Err(e) => {
                if samples.last().map(|s| s.step) != Some(state.step) {
                    samples.push(sample(&state, last_dt, hooks)?);
                }
                let t = match e {
                    Error::SchemeBlowup { t } => t,
                    _ => state.t + dt,
                };
                status = RunStatus::Failed { t, message: e.to_string() };
                break;
            }
        }
    }
    Ok((Trajectory { header, samples, status }, state))
}

/// `|Δ(½‖u‖²)/Δt + ν‖u‖²_{Ḣ¹}|` on one sampling interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalResidual {
    pub t0: f64,
    pub t1: f64,
    pub residual: f64,
}

/// Energy-law residual per sampling interval; dissipation is averaged over
/// the interval endpoints. Fewer than two samples give no intervals.
pub fn energy_balance_residual(samples: &[TrajectorySample], nu: f64) -> Result<Vec<IntervalResidual>> {
    samples
        .windows(2)
        .map(|w| {
            let (a, b) = (&w[0], &w[1]);
            let dt = b.t - a.t;
            if dt <= 0.0 {
                return Err(Error::InvalidArgument(format!("samples not increasing in time at t={}", b.t)));
            }
            let e = |s: &TrajectorySample| 0.5 * s.norms.l2 * s.norms.l2;
            let h1a = a.norms.require_hdot(1.0)?;
            let h1b = b.norms.require_hdot(1.0)?;
            let dissipation = 0.5 * nu * (h1a * h1a + h1b * h1b);
            Ok(IntervalResidual { t0: a.t, t1: b.t, residual: ((e(b) - e(a)) / dt + dissipation).abs() })
        })
        .collect()
}

const FIXED_COLUMNS: [&str; 3] = ["t", "step", "dt"];

impl Trajectory {
    /// Column names in output order.
    pub fn columns(&self) -> Vec<String> {
        let mut cols: Vec<String> = FIXED_COLUMNS.iter().map(|s| s.to_string()).collect();
        if let Some(s) = self.samples.first() {
            cols.extend(s.norms.keys());
            cols.push("div_max".into());
            cols.extend(s.extras.iter().map(|(k, _)| k.clone()));
        }
        cols
    }

    fn row(s: &TrajectorySample) -> Vec<f64> {
        let mut row = vec![s.t, s.step as f64, s.dt];
        row.extend(s.norms.to_record().into_iter().map(|(_, v)| v));
        row.push(s.div_max);
        row.extend(s.extras.iter().map(|&(_, v)| v));
        row
    }

    fn status_meta(&self) -> Vec<(String, String)> {
        match &self.status {
            RunStatus::Completed => vec![("status".into(), "completed".into())],
            RunStatus::Failed { t, message } => vec![
                ("status".into(), "failed".into()),
                ("failure_t".into(), t.to_string()),
                ("failure_message".into(), message.replace('\n', " ")),
            ],
        }
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# blowlab trajectory")?;
        for (k, v) in &self.header.meta {
            writeln!(w, "# {k}={v}")?;
        }
        writeln!(w, "{}", self.columns().join(","))?;
        for s in &self.samples {
            let row: Vec<String> = Self::row(s).iter().map(|v| v.to_string()).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        for (k, v) in self.status_meta() {
            writeln!(w, "# {k}={v}")?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = self.samples.iter().map(|s| serde_json::json!(Self::row(s))).collect();
        let status: BTreeMap<String, String> = self.status_meta().into_iter().collect();
        serde_json::json!({
            "header": self.header.meta,
            "columns": self.columns(),
            "rows": rows,
            "status": status,
        })
    }

    /// Reads the CSV form. Header comments and the status trailer are
    /// optional, so hand-written files with just `t` and `l2` columns parse.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut meta = BTreeMap::new();
        let mut columns: Option<Vec<String>> = None;
        let mut rows = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let lineno = i + 1;
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some((k, v)) = comment.trim().split_once('=') {
                    meta.insert(k.trim().to_string(), v.trim().to_string());
                }
                continue;
            }
            match &columns {
                None => columns = Some(line.split(',').map(|c| c.trim().to_string()).collect()),
                Some(cols) => {
                    let values = line
                        .split(',')
                        .map(|v| {
                            v.trim().parse::<f64>().map_err(|_| Error::TrajectoryParse {
                                line: lineno,
                                msg: format!("`{}` is not a number", v.trim()),
                            })
                        })
                        .collect::<Result<Vec<f64>>>()?;
                    if values.len() != cols.len() {
                        return Err(Error::TrajectoryParse {
                            line: lineno,
                            msg: format!("expected {} fields, found {}", cols.len(), values.len()),
                        });
                    }
                    rows.push((lineno, values));
                }
            }
        }
        let columns = columns.ok_or(Error::TrajectoryParse { line: 0, msg: "no column header".into() })?;
        Self::assemble(meta, &columns, rows)
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let bad = |msg: &str| Error::TrajectoryParse { line: 0, msg: msg.to_string() };
        let mut meta = BTreeMap::new();
        if let Some(h) = value.get("header").and_then(|h| h.as_object()) {
            for (k, v) in h {
                meta.insert(k.clone(), v.as_str().map(str::to_string).unwrap_or_else(|| v.to_string()));
            }
        }
        if let Some(s) = value.get("status").and_then(|h| h.as_object()) {
            for (k, v) in s {
                meta.insert(k.clone(), v.as_str().unwrap_or_default().to_string());
            }
        }
        let columns: Vec<String> = value
            .get("columns")
            .and_then(|c| c.as_array())
            .ok_or_else(|| bad("missing `columns`"))?
            .iter()
            .map(|c| c.as_str().map(str::to_string).ok_or_else(|| bad("column names must be strings")))
            .collect::<Result<_>>()?;
        let rows = value
            .get("rows")
            .and_then(|r| r.as_array())
            .ok_or_else(|| bad("missing `rows`"))?
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let record = i + 1;
                let vals = row
                    .as_array()
                    .ok_or(Error::TrajectoryParse { line: record, msg: "row is not an array".into() })?
                    .iter()
                    .map(|v| match v {
                        serde_json::Value::Null => Ok(f64::NAN),
                        v => v.as_f64().ok_or(Error::TrajectoryParse { line: record, msg: format!("`{v}` is not a number") }),
                    })
                    .collect::<Result<Vec<f64>>>()?;
                if vals.len() != columns.len() {
                    return Err(Error::TrajectoryParse {
                        line: record,
                        msg: format!("expected {} fields, found {}", columns.len(), vals.len()),
                    });
                }
                Ok((record, vals))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::assemble(meta, &columns, rows)
    }

    fn assemble(mut meta: BTreeMap<String, String>, columns: &[String], rows: Vec<(usize, Vec<f64>)>) -> Result<Self> {
        let find = |name: &str| columns.iter().position(|c| c == name);
        let t_col = find("t").ok_or(Error::TrajectoryParse { line: 0, msg: "missing `t` column".into() })?;
        if find("l2").is_none() {
            return Err(Error::TrajectoryParse { line: 0, msg: "missing `l2` column".into() });
        }
        let is_norm = |c: &str| {
            c == "l2"
                || c.strip_prefix('h').is_some_and(|r| r.parse::<f64>().is_ok())
                || c.strip_prefix('x').is_some_and(|r| r.parse::<f64>().is_ok())
        };
        let (step_col, dt_col, div_col) = (find("step"), find("dt"), find("div_max"));
        let mut samples = Vec::with_capacity(rows.len());
        let mut prev_t = f64::NEG_INFINITY;
        for (idx, (line, row)) in rows.into_iter().enumerate() {
            let t = row[t_col];
            if !(t > prev_t) {
                return Err(Error::TrajectoryParse { line, msg: format!("time {t} does not increase") });
            }
            prev_t = t;
            let norms = NormReport::from_record(
                columns.iter().zip(&row).filter(|(c, _)| is_norm(c)).map(|(c, &v)| (c.as_str(), v)),
            )
            .map_err(|e| Error::TrajectoryParse { line, msg: e.to_string() })?;
            let extras = columns
                .iter()
                .zip(&row)
                .filter(|(c, _)| !is_norm(c) && !FIXED_COLUMNS.contains(&c.as_str()) && c.as_str() != "div_max")
                .map(|(c, &v)| (c.clone(), v))
                .collect();
            samples.push(TrajectorySample {
                t,
                step: step_col.map_or(idx, |c| row[c] as usize),
                dt: dt_col.map_or(0.0, |c| row[c]),
                norms,
                div_max: div_col.map_or(0.0, |c| row[c]),
                extras,
            });
        }
        let status = match meta.remove("status").as_deref() {
            Some("failed") => RunStatus::Failed {
                t: meta.remove("failure_t").and_then(|t| t.parse().ok()).unwrap_or(f64::NAN),
                message: meta.remove("failure_message").unwrap_or_default(),
            },
            _ => RunStatus::Completed,
        };
        Ok(Self { header: TrajectoryHeader { meta }, samples, status })
    }

    /// Dispatches on the extension: `.json` or CSV otherwise.
    pub fn read_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        if path.extension().is_some_and(|e| e == "json") {
            let value: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| Error::TrajectoryParse { line: e.line(), msg: e.to_string() })?;
            Self::from_json(&value)
        } else {
            Self::read_csv(text.as_bytes())
        }
    }
}
