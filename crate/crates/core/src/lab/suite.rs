use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::corpus::{Corpus, CorpusField};
use super::interpolation::{check_x0_interpolation, check_x0_via_h12_x1, check_x0_via_xm1_h52};
use super::split::{split_verdict, split_x1, SplitVariant};
use super::trilinear::{check_h32_trilinear, check_trilinear_chain, trilinear_report};
use super::{ConstantMode, InequalityVerdict, DEFAULT_TOLERANCE};
use crate::error::{Error, Result};
use crate::lattice::Lattice;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Check {
    X0Interpolation,
    X0ViaXm1H52,
    X0ViaH12X1,
    Split(SplitVariant),
    TrilinearChain,
    AdvectiveCancellation,
    H32Trilinear,
}

impl Check {
    pub const ALL: [Check; 9] = [
        Check::X0Interpolation,
        Check::X0ViaXm1H52,
        Check::X0ViaH12X1,
        Check::Split(SplitVariant::L2),
        Check::Split(SplitVariant::H12),
        Check::Split(SplitVariant::Xm1),
        Check::TrilinearChain,
        Check::AdvectiveCancellation,
        Check::H32Trilinear,
    ];

    pub fn name(&self) -> String {
        match self {
            Check::X0Interpolation => "x0_interpolation".into(),
            Check::X0ViaXm1H52 => "x0_via_xm1_h52".into(),
            Check::X0ViaH12X1 => "x0_via_h12_x1".into(),
            Check::Split(v) => format!("split_x1_{}", v.label()),
            Check::TrilinearChain => "trilinear_chain".into(),
            Check::AdvectiveCancellation => "advective_cancellation".into(),
            Check::H32Trilinear => "h32_trilinear".into(),
        }
    }

    pub fn from_name(name: &str) -> Result<Check> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == name)
            .ok_or_else(|| Error::UnknownInequality(name.to_string()))
    }

    /// Whether the constant mode changes the check at all.
    fn mode_sensitive(&self) -> bool {
        matches!(self, Check::X0ViaXm1H52 | Check::X0ViaH12X1 | Check::Split(_))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub checks: Vec<Check>,
    /// Extra constant mode to report next to the lattice-exact verdicts.
    pub mode: ConstantMode,
    /// `(α, β)` pairs as fractions of the lattice edge wavenumber.
    pub split_fractions: Vec<(f64, f64)>,
    pub trilinear_orders: Vec<f64>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            checks: Check::ALL.to_vec(),
            mode: ConstantMode::Lattice,
            split_fractions: vec![(1.0 / 16.0, 0.25), (0.125, 0.5), (0.25, 0.75)],
            trilinear_orders: vec![0.0, 1.5, 2.5],
        }
    }
}

impl SuiteConfig {
    pub fn split_pairs(&self, lattice: Lattice) -> Vec<(f64, f64)> {
        let edge = lattice.nyquist();
        self.split_fractions.iter().map(|&(a, b)| (a * edge, b * edge)).collect()
    }
}

/// One `(field, check, parameters, mode)` outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictRow {
    pub field_index: usize,
    pub seed: u64,
    pub decay: f64,
    pub check: String,
    pub params: String,
    pub mode: ConstantMode,
    pub verdict: Option<InequalityVerdict>,
    pub error: Option<String>,
    /// Rows that decide the pass/fail status of a run.
    pub gated: bool,
}

impl VerdictRow {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.verdict.as_ref().is_some_and(|v| v.holds)
    }
}

fn cancellation_verdict(f: &crate::field::VelocityField, s: f64) -> Result<InequalityVerdict> {
    let r = trilinear_report(f, s)?;
    let scale = DEFAULT_TOLERANCE * r.hs * r.hs * r.x1;
    Ok(InequalityVerdict::new("advective_cancellation", r.cancellation.abs(), scale, ConstantMode::Lattice, 0.0, 0.0))
}

fn evaluate(field: &CorpusField, check: Check, mode: ConstantMode, cfg: &SuiteConfig, lattice: Lattice) -> Vec<VerdictRow> {
    let row = |params: String, mode: ConstantMode, out: Result<InequalityVerdict>, gated: bool| {
        let (verdict, error) = match out {
            Ok(v) => (Some(v), None),
            Err(e) => (None, Some(e.to_string())),
        };
        VerdictRow {
            field_index: field.index,
            seed: field.seed,
            decay: field.decay,
            check: check.name(),
            params,
            mode,
            verdict,
            error,
            gated,
        }
    };
    let gated = mode == ConstantMode::Lattice;
    let f = &field.components;
    match check {
        Check::X0Interpolation => vec![row(String::new(), mode, check_x0_interpolation(f, mode), gated)],
        Check::X0ViaXm1H52 => vec![row(String::new(), mode, check_x0_via_xm1_h52(f, mode).map(|r| r.verdict), gated)],
        Check::X0ViaH12X1 => vec![row(String::new(), mode, check_x0_via_h12_x1(f, mode).map(|r| r.verdict), gated)],
        Check::Split(variant) => cfg
            .split_pairs(lattice)
            .into_iter()
            .map(|(a, b)| {
                let out = split_x1(f, a, b, variant, mode).map(|r| split_verdict(&r));
                row(format!("alpha={a};beta={b}"), mode, out, gated)
            })
            .collect(),
        Check::TrilinearChain | Check::AdvectiveCancellation => cfg
            .trilinear_orders
            .iter()
            .map(|&s| {
                let out = field.velocity().and_then(|u| match check {
                    Check::TrilinearChain => check_trilinear_chain(&u, s),
                    _ => cancellation_verdict(&u, s),
                });
                row(format!("s={s}"), ConstantMode::Lattice, out, true)
            })
            .collect(),
        Check::H32Trilinear => {
            let out = field.velocity().and_then(|u| check_h32_trilinear(&u));
            // Empirical ratio is informational; only an error gates.
            let gated = out.is_err();
            vec![row(String::new(), ConstantMode::Empirical, out, gated)]
        }
    }
}

/// Runs every configured check on every corpus field. Lattice-exact rows
/// are always produced; rows for `cfg.mode` are added when it differs.
/// Output order is by field index, then check order, independent of
/// scheduling.
pub fn run_suite(corpus: &Corpus, cfg: &SuiteConfig) -> Vec<VerdictRow> {
    let lattice = corpus.lattice;
    corpus
        .fields
        .par_iter()
        .map(|field| {
            let mut rows = Vec::new();
            for &check in &cfg.checks {
                rows.extend(evaluate(field, check, ConstantMode::Lattice, cfg, lattice));
                if cfg.mode != ConstantMode::Lattice && check.mode_sensitive() {
                    rows.extend(evaluate(field, check, cfg.mode, cfg, lattice));
                }
            }
            rows
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}
