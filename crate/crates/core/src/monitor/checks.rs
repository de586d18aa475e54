use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::TrajectorySample;

fn need_two(samples: &[TrajectorySample]) -> Result<()> {
    if samples.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 samples for time derivatives, have {}",
            samples.len()
        )));
    }
    Ok(())
}

/// One sampling interval of the `Ḣ^{5/2}` energy inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct H52Interval {
    pub t0: f64,
    pub t1: f64,
    /// `Δ‖u‖²_{Ḣ^{5/2}}/Δt + 2ν‖u‖²_{Ḣ^{7/2}}`
    pub lhs: f64,
    /// `‖u‖_{𝒳¹}‖u‖²_{Ḣ^{5/2}}`
    pub rhs_density: f64,
    /// `lhs / rhs_density` when `lhs > 0`.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct H52Report {
    pub intervals: Vec<H52Interval>,
    /// Smallest `C` with `lhs <= C·rhs_density` on every interval.
    pub c_emp: f64,
    pub holds: bool,
}

/// Interval quantities use endpoint averages (trapezoid rule).
pub fn h52_energy_residual(samples: &[TrajectorySample], nu: f64) -> Result<H52Report> {
    need_two(samples)?;
    let mut intervals = Vec::with_capacity(samples.len() - 1);
    for w in samples.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let dt = b.t - a.t;
        let h52 = |s: &TrajectorySample| s.norms.require_hdot(2.5);
        let h72 = |s: &TrajectorySample| s.norms.require_hdot(3.5);
        let x1 = |s: &TrajectorySample| s.norms.require_leilin(1.0);
        let (ha, hb) = (h52(a)?, h52(b)?);
        let dissipation = nu * (h72(a)?.powi(2) + h72(b)?.powi(2));
        let lhs = (hb * hb - ha * ha) / dt + dissipation;
        let rhs_density = 0.5 * (x1(a)? * ha * ha + x1(b)? * hb * hb);
        let ratio = (lhs > 0.0).then(|| if rhs_density > 0.0 { lhs / rhs_density } else { f64::INFINITY });
        intervals.push(H52Interval { t0: a.t, t1: b.t, lhs, rhs_density, ratio });
    }
    let c_emp = intervals.iter().filter_map(|i| i.ratio).fold(0.0, f64::max);
    let holds = c_emp.is_finite()
        && intervals.iter().all(|i| i.lhs <= c_emp * i.rhs_density * (1.0 + 1e-12) || i.lhs <= 0.0);
    Ok(H52Report { intervals, c_emp, holds })
}

/// A growth bound `g(t) <= g(0) + C·∫₀ᵗ‖u‖_{Ḣ^{5/2}}` checked at each sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub times: Vec<f64>,
    /// `g(t) − g(0)`
    pub defect: Vec<f64>,
    /// Trapezoid `∫₀ᵗ‖u‖_{Ḣ^{5/2}}`.
    pub integral: Vec<f64>,
    /// Smallest admissible constant, zero when `g` never rises.
    pub constant: f64,
    pub holds: bool,
}

fn growth(samples: &[TrajectorySample], g: &[f64]) -> Result<GrowthReport> {
    let mut integral = vec![0.0; samples.len()];
    for i in 1..samples.len() {
        let (a, b) = (&samples[i - 1], &samples[i]);
        let avg = 0.5 * (a.norms.require_hdot(2.5)? + b.norms.require_hdot(2.5)?);
        integral[i] = integral[i - 1] + (b.t - a.t) * avg;
    }
    let defect: Vec<f64> = g.iter().map(|x| x - g[0]).collect();
    let constant = defect
        .iter()
        .zip(&integral)
        .skip(1)
        .filter(|(d, _)| **d > 0.0)
        .map(|(d, i)| if *i > 0.0 { d / i } else { f64::INFINITY })
        .fold(0.0, f64::max);
    let holds = constant.is_finite();
    Ok(GrowthReport { times: samples.iter().map(|s| s.t).collect(), defect, integral, constant, holds })
}

/// `ln(‖u(t)‖²_{Ḣ^{1/2}}/(cν)) <= ln(‖u⁰‖²_{Ḣ^{1/2}}/(cν)) + C₀∫‖u‖_{Ḣ^{5/2}}`.
pub fn h12_log_growth_check(samples: &[TrajectorySample], c_small: f64, nu: f64) -> Result<GrowthReport> {
    need_two(samples)?;
    let g = samples
        .iter()
        .map(|s| {
            let h = s.norms.require_hdot(0.5)?;
            if h <= 0.0 {
                return Err(Error::InvalidArgument(format!("zero Ḣ^1/2 norm at t={}", s.t)));
            }
            Ok((h * h / (c_small * nu)).ln())
        })
        .collect::<Result<Vec<_>>>()?;
    growth(samples, &g)
}

/// `‖u(t)‖_{𝒳⁻¹} <= ‖u⁰‖_{𝒳⁻¹}·exp(C'∫‖u‖_{Ḣ^{5/2}})`, checked on logs.
pub fn xm1_gronwall_check(samples: &[TrajectorySample]) -> Result<GrowthReport> {
    need_two(samples)?;
    let g = samples
        .iter()
        .map(|s| {
            let x = s.norms.require_leilin(-1.0)?;
            if x <= 0.0 {
                return Err(Error::InvalidArgument(format!("zero 𝒳^-1 norm at t={}", s.t)));
            }
            Ok(x.ln())
        })
        .collect::<Result<Vec<_>>>()?;
    growth(samples, &g)
}

/// Time at which a smallness condition first becomes true, and every later
/// re-entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub name: String,
    pub threshold: f64,
    pub t: f64,
    pub sample: usize,
}

fn crossings_of(samples: &[TrajectorySample], name: &str, threshold: f64, value: impl Fn(&TrajectorySample) -> Option<f64>) -> Vec<Crossing> {
    let mut out = Vec::new();
    let mut below = false;
    for (i, s) in samples.iter().enumerate() {
        let now = value(s).is_some_and(|v| v < threshold);
        if now && !below {
            out.push(Crossing { name: name.to_string(), threshold, t: s.t, sample: i });
        }
        below = now;
    }
    out
}

/// `‖u‖_{Ḣ^{1/2}} < cν` and `‖u‖_{𝒳⁻¹} < ν`, the two global-existence
/// smallness conditions.
pub fn threshold_crossings(samples: &[TrajectorySample], c_small: f64, nu: f64) -> Vec<Crossing> {
    let mut out = crossings_of(samples, "h12_below_c_nu", c_small * nu, |s| s.norms.hdot(0.5));
    out.extend(crossings_of(samples, "xm1_below_nu", nu, |s| s.norms.leilin(-1.0)));
    out
}
