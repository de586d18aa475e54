use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::field::{ScalarSpectralField, VelocityField};
use crate::generators::random_band_limited;
use crate::lattice::Lattice;
use num_complex::Complex64;

/// Reproducible set of random band-limited velocity fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusConfig {
    pub n: usize,
    pub period: f64,
    pub size: usize,
    pub kmin: f64,
    /// Upper band edge; defaults to a quarter of the lattice size in units
    /// of the fundamental wavenumber.
    pub kmax: Option<f64>,
    /// Amplitude decay exponents, assigned round-robin by field index.
    pub decays: Vec<f64>,
    pub base_seed: u64,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            n: 32,
            period: 2.0 * std::f64::consts::PI,
            size: 100,
            kmin: 1.0,
            kmax: None,
            decays: vec![1.0, 2.0, 3.0],
            base_seed: 0,
        }
    }
}

impl CorpusConfig {
    pub fn lattice(&self) -> Result<Lattice> {
        Lattice::new(self.n, self.period)
    }

    pub fn band(&self) -> Result<(f64, f64)> {
        let lat = self.lattice()?;
        let kmax = self.kmax.unwrap_or(lat.k_unit() * (self.n / 4) as f64);
        Ok((self.kmin * lat.k_unit(), kmax))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusField {
    pub index: usize,
    pub seed: u64,
    pub decay: f64,
    pub components: [ScalarSpectralField; 3],
}

impl CorpusField {
    /// The field as a validated velocity, if it satisfies the invariants.
    pub fn velocity(&self) -> Result<VelocityField> {
        VelocityField::new(self.components.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub lattice: Lattice,
    pub fields: Vec<CorpusField>,
}

impl Corpus {
    pub fn generate(cfg: &CorpusConfig) -> Result<Self> {
        let lattice = cfg.lattice()?;
        let (kmin, kmax) = cfg.band()?;
        let decays = if cfg.decays.is_empty() { vec![1.0] } else { cfg.decays.clone() };
        let fields = (0..cfg.size)
            .into_par_iter()
            .map(|index| {
                let seed = cfg.base_seed + index as u64;
                let decay = decays[index % decays.len()];
                let u = random_band_limited(lattice, kmin, kmax, decay, seed)?;
                Ok(CorpusField { index, seed, decay, components: u.into_array() })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { lattice, fields })
    }

    /// Append a copy of the first field (or a zero field) with a unit mean
    /// in its first component. Used to exercise failure reporting.
    pub fn inject_mean_violation(&mut self, seed: u64) {
        let mut components = self
            .fields
            .first()
            .map(|f| f.components.clone())
            .unwrap_or_else(|| VelocityField::zeros(self.lattice).into_array());
        let mut c0 = components[0].coeffs().to_vec();
        c0[0] = Complex64::new(1.0, 0.0);
        components[0] = ScalarSpectralField::new(self.lattice, c0).expect("finite");
        let index = self.fields.len();
        self.fields.push(CorpusField { index, seed, decay: f64::NAN, components });
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }
}
