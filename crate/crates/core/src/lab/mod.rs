//! Numerical checks of the frequency-split and commutator inequalities on
//! concrete fields.
//!
//! Every check returns an [`InequalityVerdict`] comparing `lhs` to `rhs`.
//! Constants come in three flavours ([`ConstantMode`]): exact lattice sums,
//! closed-form continuum integrals, or none at all (the ratio is then an
//! empirical estimate of the unspecified constant).

mod corpus;
mod interpolation;
mod probe;
mod split;
mod suite;
mod trilinear;

use serde::{Deserialize, Serialize};

pub use corpus::{Corpus, CorpusConfig, CorpusField};
pub use interpolation::{
    check_x0_interpolation, check_x0_via_h12_x1, check_x0_via_xm1_h52, RadiusVerdict,
};
pub use probe::{equality_probe, registered_inequalities, ProbeOptions, ProbeResult};
pub use split::{split_verdict, split_x1, SplitReport, SplitVariant};
pub use suite::{run_suite, Check, SuiteConfig, VerdictRow};
pub use trilinear::{
    advective_cancellation, check_h32_trilinear, check_trilinear_chain, commutator_l2,
    trilinear_hs, trilinear_report, TrilinearReport,
};

/// Every check is defined on mean-free fields only.
pub(crate) fn require_mean_free<F: crate::field::SpectralComponents + ?Sized>(f: &F) -> crate::Result<()> {
    match f.components().iter().find(|c| c.has_nonzero_mean()) {
        Some(c) => Err(crate::Error::NonzeroMean(c.mean().norm())),
        None => Ok(()),
    }
}

/// Default relative tolerance on `ratio <= 1 + tol`.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstantMode {
    /// Cauchy–Schwarz constants as exact sums over lattice wavenumbers.
    Lattice,
    /// Closed-form radial integrals over `ℝ³`.
    Continuum,
    /// No constant: the ratio itself estimates it.
    Empirical,
}

impl std::str::FromStr for ConstantMode {
    type Err = crate::Error;
    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "lattice" => Ok(Self::Lattice),
            "continuum" => Ok(Self::Continuum),
            "empirical" => Ok(Self::Empirical),
            other => Err(crate::Error::InvalidArgument(format!("unknown constant mode `{other}`"))),
        }
    }
}

impl std::fmt::Display for ConstantMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Lattice => "lattice",
            Self::Continuum => "continuum",
            Self::Empirical => "empirical",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityVerdict {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub constant_mode: ConstantMode,
    pub holds: bool,
}

impl InequalityVerdict {
    /// Builds a verdict. `lhs` values at or below `floor` count as zero so
    /// that roundoff against a vanishing right side does not register.
    /// Empirical verdicts hold whenever the ratio is finite.
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64, mode: ConstantMode, tol: f64, floor: f64) -> Self {
        let effective = if lhs.abs() <= floor { 0.0 } else { lhs };
        let ratio = if effective == 0.0 {
            0.0
        } else if rhs > 0.0 {
            effective / rhs
        } else {
            f64::INFINITY
        };
        let holds = match mode {
            ConstantMode::Empirical => ratio.is_finite(),
            _ => ratio <= 1.0 + tol,
        };
        Self { name: name.into(), lhs, rhs, ratio, constant_mode: mode, holds }
    }
}
