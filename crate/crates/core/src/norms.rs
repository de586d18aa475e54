//! Homogeneous Sobolev and Lei–Lin norms on series coefficients.
//!
//! `‖f‖²_{Ḣˢ} = Σ_{k≠0} |k|^{2s}|c_k|²` and `‖f‖_{𝒳^σ} = Σ_{k≠0} |k|^σ|c_k|`,
//! with vector fields summed over components. Sums run in descending `|k|`
//! with compensated accumulation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ScalarSpectralField, SpectralComponents};
use crate::summation::CompensatedSum;

/// Default Sobolev orders carried by every report.
pub const DEFAULT_HDOT_ORDERS: [f64; 7] = [0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5];
/// Lei–Lin orders carried by every report.
pub const DEFAULT_LEILIN_ORDERS: [f64; 3] = [-1.0, 0.0, 1.0];

fn check_order<F: SpectralComponents + ?Sized>(f: &F, order: f64) -> Result<()> {
    if !(order.is_finite() && order >= -1.0) {
        return Err(Error::InvalidArgument(format!("norm order must be >= -1, got {order}")));
    }
    if order < 0.0 {
        if let Some(c) = f.components().iter().find(|c| c.has_nonzero_mean()) {
            return Err(Error::NonzeroMean(c.mean().norm()));
        }
    }
    Ok(())
}

/// `Σ_{k≠0} weight(|k|) · g(c_k)` over every component, largest `|k|` first.
fn weighted_sum<F, W, G>(f: &F, weight: W, g: G) -> f64
where
    F: SpectralComponents + ?Sized,
    W: Fn(f64) -> f64,
    G: Fn(num_complex::Complex64) -> f64,
{
    let tables = f.lattice().tables();
    let mut acc = CompensatedSum::new();
    for &i in &tables.desc_order {
        let i = i as usize;
        let k = tables.kmag[i];
        if k == 0.0 {
            continue;
        }
        let w = weight(k);
        for comp in f.components() {
            let c = comp.coeffs()[i];
            if c.re != 0.0 || c.im != 0.0 {
                acc.add(w * g(c));
            }
        }
    }
    acc.value()
}

pub fn sobolev_norm<F: SpectralComponents + ?Sized>(f: &F, s: f64) -> Result<f64> {
    check_order(f, s)?;
    Ok(weighted_sum(f, |k| k.powf(2.0 * s), |c| c.norm_sqr()).sqrt())
}

pub fn leilin_norm<F: SpectralComponents + ?Sized>(f: &F, sigma: f64) -> Result<f64> {
    check_order(f, sigma)?;
    Ok(weighted_sum(f, |k| k.powf(sigma), |c| c.norm()))
}

/// Full `L²` norm including the zero mode (Parseval).
pub fn l2_norm<F: SpectralComponents + ?Sized>(f: &F) -> f64 {
    let mut acc = CompensatedSum::new();
    for comp in f.components() {
        for c in comp.coeffs() {
            acc.add(c.norm_sqr());
        }
    }
    acc.value().sqrt()
}

/// Every norm of one field, as used along trajectories.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub l2: f64,
    /// `(s, ‖f‖_{Ḣˢ})`, ascending in `s`.
    pub hdot: Vec<(f64, f64)>,
    /// `(σ, ‖f‖_{𝒳^σ})`, ascending in `σ`.
    pub leilin: Vec<(f64, f64)>,
}

fn lookup(pairs: &[(f64, f64)], order: f64) -> Option<f64> {
    pairs.iter().find(|(s, _)| (s - order).abs() < 1e-12).map(|&(_, v)| v)
}

fn order_key(prefix: char, order: f64) -> String {
    format!("{prefix}{order}")
}

impl NormReport {
    pub fn hdot(&self, s: f64) -> Option<f64> {
        if s == 0.0 {
            return lookup(&self.hdot, s).or(Some(self.l2));
        }
        lookup(&self.hdot, s)
    }

    pub fn leilin(&self, sigma: f64) -> Option<f64> {
        lookup(&self.leilin, sigma)
    }

    /// Same as [`hdot`](Self::hdot) but with a descriptive error.
    pub fn require_hdot(&self, s: f64) -> Result<f64> {
        self.hdot(s)
            .ok_or_else(|| Error::InvalidArgument(format!("norm report lacks {}", order_key('h', s))))
    }

    pub fn require_leilin(&self, sigma: f64) -> Result<f64> {
        self.leilin(sigma)
            .ok_or_else(|| Error::InvalidArgument(format!("norm report lacks {}", order_key('x', sigma))))
    }

    /// Flat `(key, value)` record: `l2`, `h0.5`, …, `x-1`, `x0`, `x1`.
    pub fn to_record(&self) -> Vec<(String, f64)> {
        let mut out = vec![("l2".to_string(), self.l2)];
        out.extend(self.hdot.iter().map(|&(s, v)| (order_key('h', s), v)));
        out.extend(self.leilin.iter().map(|&(s, v)| (order_key('x', s), v)));
        out
    }

    pub fn keys(&self) -> Vec<String> {
        self.to_record().into_iter().map(|(k, _)| k).collect()
    }

    /// Inverse of [`to_record`](Self::to_record); unknown keys are ignored.
    pub fn from_record<'a, I>(record: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, f64)>,
    {
        let mut l2 = None;
        let mut hdot = Vec::new();
        let mut leilin = Vec::new();
        for (key, value) in record {
            if key == "l2" {
                l2 = Some(value);
            } else if let Some(order) = parse_order(key, 'h') {
                hdot.push((order, value));
            } else if let Some(order) = parse_order(key, 'x') {
                leilin.push((order, value));
            }
        }
        hdot.sort_by(|a, b| a.0.total_cmp(&b.0));
        leilin.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Self {
            l2: l2.ok_or_else(|| Error::InvalidArgument("record lacks l2".into()))?,
            hdot,
            leilin,
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let map: serde_json::Map<String, serde_json::Value> =
            self.to_record().into_iter().map(|(k, v)| (k, serde_json::json!(v))).collect();
        serde_json::Value::Object(map)
    }
}

fn parse_order(key: &str, prefix: char) -> Option<f64> {
    key.strip_prefix(prefix)?.parse().ok()
}

/// Orders covered by [`full_report`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportOrders {
    pub hdot: Vec<f64>,
    pub leilin: Vec<f64>,
}

impl Default for ReportOrders {
    fn default() -> Self {
        Self { hdot: DEFAULT_HDOT_ORDERS.to_vec(), leilin: DEFAULT_LEILIN_ORDERS.to_vec() }
    }
}

pub fn full_report<F: SpectralComponents + ?Sized>(u: &F, orders: &ReportOrders) -> Result<NormReport> {
    let mut hdot = orders
        .hdot
        .iter()
        .map(|&s| sobolev_norm(u, s).map(|v| (s, v)))
        .collect::<Result<Vec<_>>>()?;
    let mut leilin = orders
        .leilin
        .iter()
        .map(|&s| leilin_norm(u, s).map(|v| (s, v)))
        .collect::<Result<Vec<_>>>()?;
    hdot.sort_by(|a, b| a.0.total_cmp(&b.0));
    leilin.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(NormReport { l2: l2_norm(u), hdot, leilin })
}

/// Norms of a single scalar component, for callers that only hold one.
pub fn scalar_report(f: &ScalarSpectralField, orders: &ReportOrders) -> Result<NormReport> {
    full_report(f, orders)
}
