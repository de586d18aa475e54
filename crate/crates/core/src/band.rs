//! Cauchy–Schwarz band constants `(∫_band |ξ|^{2a} dξ)^{1/2}`, both as exact
//! lattice sums and as closed-form radial integrals.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::within_radius;
use crate::lattice::Lattice;
use crate::summation::CompensatedSum;

/// A radial wavenumber band. Boundary shells follow the truncation
/// convention: `|k| = α` is low, `|k| = β` is middle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "band", rename_all = "lowercase")]
pub enum Band {
    /// `0 < |k| <= α`
    Low { alpha: f64 },
    /// `α < |k| <= β`
    Middle { alpha: f64, beta: f64 },
    /// `|k| > β`, up to the lattice edge
    High { beta: f64 },
}

impl Band {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Band::Low { alpha } => alpha.is_finite() && alpha > 0.0,
            Band::Middle { alpha, beta } => alpha.is_finite() && beta.is_finite() && 0.0 < alpha && alpha < beta,
            Band::High { beta } => beta.is_finite() && beta > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidBand(format!("{self:?}")))
        }
    }

    pub fn contains(&self, kmag: f64) -> bool {
        if kmag == 0.0 {
            return false;
        }
        match *self {
            Band::Low { alpha } => within_radius(kmag, alpha),
            Band::Middle { alpha, beta } => !within_radius(kmag, alpha) && within_radius(kmag, beta),
            Band::High { beta } => !within_radius(kmag, beta),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandConstant {
    pub exponent: f64,
    pub band: Band,
    pub lattice_value: f64,
    pub continuum_value: f64,
}

impl BandConstant {
    pub fn ratio(&self) -> f64 {
        self.lattice_value / self.continuum_value
    }
}

/// Closed form of `(∫_band |ξ|^{2a} dξ)^{1/2}` over `ℝ³`.
pub fn continuum_band_constant(a: f64, band: Band) -> Result<f64> {
    band.validate()?;
    let p = 2.0 * a + 3.0;
    let value = match band {
        Band::Low { alpha } => {
            if p <= 0.0 {
                return Err(Error::DivergentIntegral(format!("low band needs 2a+3 > 0, got a = {a}")));
            }
            4.0 * PI * alpha.powf(p) / p
        }
        Band::Middle { alpha, beta } => {
            if p == 0.0 {
                4.0 * PI * (beta / alpha).ln()
            } else {
                4.0 * PI * (beta.powf(p) - alpha.powf(p)) / p
            }
        }
        Band::High { beta } => {
            if p >= 0.0 {
                return Err(Error::DivergentIntegral(format!("high band needs 2a+3 < 0, got a = {a}")));
            }
            4.0 * PI * beta.powf(p) / -p
        }
    };
    Ok(value.sqrt())
}

/// `(Σ_{k ∈ band} |k|^{2a})^{1/2}` over the lattice's wavenumbers.
pub fn lattice_band_constant(lattice: Lattice, a: f64, band: Band) -> Result<f64> {
    band.validate()?;
    let tables = lattice.tables();
    let acc: CompensatedSum = tables
        .desc_order
        .iter()
        .map(|&i| tables.kmag[i as usize])
        .filter(|&k| band.contains(k))
        .map(|k| k.powf(2.0 * a))
        .collect();
    Ok(acc.value().sqrt())
}

pub fn band_constant(lattice: Lattice, a: f64, band: Band) -> Result<BandConstant> {
    Ok(BandConstant {
        exponent: a,
        band,
        continuum_value: continuum_band_constant(a, band)?,
        lattice_value: lattice_band_constant(lattice, a, band)?,
    })
}

/// Picks the band from the arguments: `β` present means the middle band,
/// otherwise the low band when `2a+3 > 0` and the high band (radius `α`)
/// when `2a+3 < 0`.
pub fn band_for(a: f64, alpha: f64, beta: Option<f64>) -> Result<Band> {
    let p = 2.0 * a + 3.0;
    match beta {
        Some(beta) => Ok(Band::Middle { alpha, beta }),
        None if p > 0.0 => Ok(Band::Low { alpha }),
        None if p < 0.0 => Ok(Band::High { beta: alpha }),
        None => Err(Error::DivergentIntegral(
            "a = -3/2 diverges on both the low and the high band".into(),
        )),
    }
}
