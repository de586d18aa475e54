use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::checks::{
    h12_log_growth_check, h52_energy_residual, threshold_crossings, xm1_gronwall_check, Crossing, GrowthReport,
    H52Report,
};
use super::functionals::{
    rate_catalog, theorem1_functional, theorem2_functional, theorem2_squared_functional, theorem3_cnu_functional,
    theorem3_functional,
};
use crate::error::{Error, Result};
use crate::sim::Trajectory;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MonitorConfig {
    /// Smallness constant `c` in `‖u‖_{Ḣ^{1/2}} < cν`.
    pub c_small: f64,
    /// Candidate singular times; each must exceed every sample time.
    pub t_star: Vec<f64>,
    /// Sobolev orders fed to the rate catalog.
    pub s_list: Vec<f64>,
}

impl Default for MonitorConfig {
    fn default() -> Self {
        Self { c_small: 1.0, t_star: Vec::new(), s_list: vec![1.0, 2.0, 3.0, 3.5] }
    }
}

impl MonitorConfig {
    pub fn validate(&self, trajectory: &Trajectory) -> Result<()> {
        if !(self.c_small.is_finite() && self.c_small > 0.0) {
            return Err(Error::InvalidArgument(format!("c_small must be positive, got {}", self.c_small)));
        }
        let last = trajectory.samples.iter().map(|s| s.t).fold(f64::NEG_INFINITY, f64::max);
        if let Some(bad) = self.t_star.iter().find(|&&t| !(t > last)) {
            return Err(Error::InvalidArgument(format!(
                "t_star={bad} must be later than the last sample time {last}"
            )));
        }
        Ok(())
    }
}

/// Per-sample values of one functional at one `t_star`; `None` marks an
/// undefined point (vanishing log).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalTrace {
    pub name: String,
    pub t_star: f64,
    pub times: Vec<f64>,
    pub values: Vec<Option<f64>>,
}

impl FunctionalTrace {
    pub fn min(&self) -> Option<f64> {
        self.values.iter().flatten().copied().reduce(f64::min)
    }

    pub fn max(&self) -> Option<f64> {
        self.values.iter().flatten().copied().reduce(f64::max)
    }
}

/// Either a result or the reason it could not be computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Availability<T> {
    Available(T),
    Unavailable(String),
}

impl<T> From<Result<T>> for Availability<T> {
    fn from(r: Result<T>) -> Self {
        match r {
            Ok(v) => Availability::Available(v),
            Err(e) => Availability::Unavailable(e.to_string()),
        }
    }
}

impl<T> Availability<T> {
    pub fn reason(&self) -> Option<&str> {
        match self {
            Availability::Available(_) => None,
            Availability::Unavailable(r) => Some(r),
        }
    }

    pub fn ok(&self) -> Option<&T> {
        match self {
            Availability::Available(v) => Some(v),
            Availability::Unavailable(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonitorReport {
    pub nu: f64,
    pub c_small: f64,
    pub traces: Vec<FunctionalTrace>,
    pub crossings: Vec<Crossing>,
    pub h52_energy: Availability<H52Report>,
    pub h12_log_growth: Availability<GrowthReport>,
    pub xm1_gronwall: Availability<GrowthReport>,
}

impl MonitorReport {
    /// Whether every available proof-level check holds.
    pub fn checks_hold(&self) -> bool {
        self.h52_energy.ok().is_none_or(|r| r.holds)
            && self.h12_log_growth.ok().is_none_or(|r| r.holds)
            && self.xm1_gronwall.ok().is_none_or(|r| r.holds)
    }
}

fn traces_for(trajectory: &Trajectory, cfg: &MonitorConfig, nu: f64, t_star: f64) -> Result<Vec<FunctionalTrace>> {
    let samples = &trajectory.samples;
    let times: Vec<f64> = samples.iter().map(|s| s.t).collect();
    let mut named: Vec<(String, Vec<Option<f64>>)> = Vec::new();
    let mut push = |name: &str, values: Vec<Option<f64>>| named.push((name.to_string(), values));
    push("theorem1", samples.iter().map(|s| theorem1_functional(s, t_star)).collect::<Result<_>>()?);
    push(
        "theorem2",
        samples.iter().map(|s| theorem2_functional(s, t_star, cfg.c_small, nu)).collect::<Result<_>>()?,
    );
    push(
        "theorem2_squared",
        samples.iter().map(|s| theorem2_squared_functional(s, t_star, cfg.c_small, nu)).collect::<Result<_>>()?,
    );
    push("theorem3", samples.iter().map(|s| theorem3_functional(s, t_star, nu)).collect::<Result<_>>()?);
    push(
        "theorem3_c_nu",
        samples.iter().map(|s| theorem3_cnu_functional(s, t_star, cfg.c_small, nu)).collect::<Result<_>>()?,
    );
    let catalogs = samples.iter().map(|s| rate_catalog(s, t_star, &cfg.s_list, nu)).collect::<Result<Vec<_>>>()?;
    if let Some(first) = catalogs.first() {
        for (j, (name, _)) in first.iter().enumerate() {
            push(name, catalogs.iter().map(|c| c[j].1).collect());
        }
    }
    Ok(named
        .into_iter()
        .map(|(name, values)| FunctionalTrace { name, t_star, times: times.clone(), values })
        .collect())
}

/// Evaluates every functional for each `t_star` and the three proof-level
/// checks. Checks that need more data than the trajectory holds are marked
/// unavailable instead of failing the whole report.
pub fn run_monitor(trajectory: &Trajectory, cfg: &MonitorConfig, nu: f64) -> Result<MonitorReport> {
    cfg.validate(trajectory)?;
    if !(nu.is_finite() && nu > 0.0) {
        return Err(Error::InvalidArgument(format!("viscosity must be positive, got {nu}")));
    }
    let per_star = cfg
        .t_star
        .par_iter()
        .map(|&ts| traces_for(trajectory, cfg, nu, ts))
        .collect::<Result<Vec<_>>>()?;
    let samples = &trajectory.samples;
    Ok(MonitorReport {
        nu,
        c_small: cfg.c_small,
        traces: per_star.into_iter().flatten().collect(),
        crossings: threshold_crossings(samples, cfg.c_small, nu),
        h52_energy: h52_energy_residual(samples, nu).into(),
        h12_log_growth: h12_log_growth_check(samples, cfg.c_small, nu).into(),
        xm1_gronwall: xm1_gronwall_check(samples).into(),
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "undefined".to_string(), |x| x.to_string())
}

impl MonitorReport {
    /// One row per `(t_star, functional, sample)`.
    pub fn write_csv<W: Write>(&self, mut w: W, header: &[(String, String)]) -> Result<()> {
        for (k, v) in header {
            writeln!(w, "# {k}={v}")?;
        }
        writeln!(w, "t_star,functional,t,value")?;
        for tr in &self.traces {
            for (t, v) in tr.times.iter().zip(&tr.values) {
                writeln!(w, "{},{},{},{}", tr.t_star, tr.name, t, fmt_opt(*v))?;
            }
        }
        Ok(())
    }

    /// Summary: per-functional extrema, crossings and empirical constants.
    pub fn summary_json(&self, header: &[(String, String)]) -> serde_json::Value {
        let functionals: Vec<serde_json::Value> = self
            .traces
            .iter()
            .map(|tr| {
                serde_json::json!({
                    "name": tr.name,
                    "t_star": tr.t_star,
                    "min": tr.min(),
                    "max": tr.max(),
                    "undefined_points": tr.values.iter().filter(|v| v.is_none()).count(),
                })
            })
            .collect();
        let check = |name: &str, constant: Option<f64>, holds: Option<bool>, reason: Option<&str>| {
            serde_json::json!({
                "name": name,
                "available": reason.is_none(),
                "constant": constant,
                "holds": holds,
                "reason": reason,
            })
        };
        let checks = vec![
            check(
                "h52_energy",
                self.h52_energy.ok().map(|r| r.c_emp),
                self.h52_energy.ok().map(|r| r.holds),
                self.h52_energy.reason(),
            ),
            check(
                "h12_log_growth",
                self.h12_log_growth.ok().map(|r| r.constant),
                self.h12_log_growth.ok().map(|r| r.holds),
                self.h12_log_growth.reason(),
            ),
            check(
                "xm1_gronwall",
                self.xm1_gronwall.ok().map(|r| r.constant),
                self.xm1_gronwall.ok().map(|r| r.holds),
                self.xm1_gronwall.reason(),
            ),
        ];
        let header: serde_json::Map<String, serde_json::Value> =
            header.iter().map(|(k, v)| (k.clone(), serde_json::json!(v))).collect();
        serde_json::json!({
            "header": header,
            "nu": self.nu,
            "c_small": self.c_small,
            "functionals": functionals,
            "crossings": self.crossings,
            "checks": checks,
        })
    }
}
