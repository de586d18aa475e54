//! Spectral fields on the periodic lattice.
//!
//! A [`ScalarSpectralField`] stores Fourier-series coefficients `c_k` of
//! `f(x) = Σ_k c_k e^{ik·x}`; the discrete transform's `n³` factor never shows
//! up in user-visible numbers.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::Fft3;
use crate::lattice::Lattice;

/// Relative threshold on `|c_0|` (against the largest coefficient) above
/// which a field counts as having nonzero mean.
pub const MEAN_TOLERANCE: f64 = 1e-13;

/// Per-mode divergence tolerance: `|k·ĉ| ≤ tol·|k|·|ĉ|`.
pub const DIVERGENCE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarSpectralField {
    lattice: Lattice,
    coeffs: Vec<Complex64>,
}

/// Which side of a truncation radius to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `|k| <= R`; the boundary shell belongs here.
    Low,
    /// `|k| > R`.
    High,
}

/// Shell membership test shared by truncation and band sums. Points within a
/// relative `1e-12` of the radius count as on the shell.
#[inline]
pub(crate) fn within_radius(kmag: f64, r: f64) -> bool {
    kmag <= r * (1.0 + 1e-12)
}

impl ScalarSpectralField {
    pub fn new(lattice: Lattice, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != lattice.len() {
            return Err(Error::ShapeMismatch { expected: lattice.len(), got: coeffs.len() });
        }
        if let Some(i) = coeffs.iter().position(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { lattice, coeffs })
    }

    pub(crate) fn from_raw(lattice: Lattice, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), lattice.len());
        Self { lattice, coeffs }
    }

    pub fn zeros(lattice: Lattice) -> Self {
        Self { lattice, coeffs: vec![Complex64::default(); lattice.len()] }
    }

    /// Field built from `(mode, coefficient)` pairs; each conjugate partner
    /// `c_{-m} = conj(c_m)` is filled in automatically.
    pub fn from_modes(lattice: Lattice, modes: &[([i64; 3], Complex64)]) -> Result<Self> {
        let mut f = Self::zeros(lattice);
        for &(m, c) in modes {
            let idx = lattice
                .index_of(m)
                .ok_or_else(|| Error::InvalidArgument(format!("mode {m:?} outside lattice")))?;
            let conj = lattice
                .index_of([-m[0], -m[1], -m[2]])
                .ok_or_else(|| Error::InvalidArgument(format!("mode {m:?} has no conjugate partner")))?;
            f.coeffs[idx] = c;
            f.coeffs[conj] = if conj == idx { Complex64::new(c.re, 0.0) } else { c.conj() };
        }
        Ok(f)
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient of integer mode `m`, zero if outside the lattice.
    pub fn coefficient(&self, m: [i64; 3]) -> Complex64 {
        self.lattice.index_of(m).map(|i| self.coeffs[i]).unwrap_or_default()
    }

    pub fn mean(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// True when `|c_0|` exceeds [`MEAN_TOLERANCE`] relative to the largest
    /// coefficient.
    pub fn has_nonzero_mean(&self) -> bool {
        let c0 = self.coeffs[0].norm();
        c0 > 0.0 && c0 > MEAN_TOLERANCE * self.max_abs_coeff()
    }

    /// Largest `max_i |m_i|` over nonzero coefficients.
    pub fn max_mode(&self) -> usize {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.re != 0.0 || c.im != 0.0)
            .map(|(i, _)| self.lattice.max_abs_mode(i))
            .max()
            .unwrap_or(0)
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        Self::from_raw(self.lattice, self.coeffs.iter().map(|c| c * lambda).collect())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.lattice != other.lattice {
            return Err(Error::LatticeMismatch);
        }
        Ok(Self::from_raw(
            self.lattice,
            self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        ))
    }

    /// Real samples on the `n³` grid, `x_j = j·L/n` per axis.
    pub fn to_physical(&self) -> Vec<f64> {
        self.to_grid().into_iter().map(|z| z.re).collect()
    }

    /// Complex grid values; the imaginary part vanishes for Hermitian input.
    pub fn to_grid(&self) -> Vec<Complex64> {
        let mut data = self.coeffs.clone();
        Fft3::get(self.lattice.n()).inverse(&mut data);
        data
    }

    pub fn to_spectral(lattice: Lattice, samples: &[f64]) -> Result<Self> {
        if samples.len() != lattice.len() {
            return Err(Error::ShapeMismatch { expected: lattice.len(), got: samples.len() });
        }
        if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        let mut data: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Fft3::get(lattice.n()).forward(&mut data);
        let scale = 1.0 / lattice.len() as f64;
        data.iter_mut().for_each(|c| *c *= scale);
        Ok(Self::from_raw(lattice, data))
    }

    /// `max |Im f(x)| / max |f(x)|` over the grid; zero for real fields.
    pub fn imag_defect(&self) -> f64 {
        let grid = self.to_grid();
        let max_abs = grid.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if max_abs == 0.0 {
            return 0.0;
        }
        grid.iter().map(|z| z.im.abs()).fold(0.0, f64::max) / max_abs
    }

    /// `∂_j f` as a spectral multiplier `i k_j`. The unpaired `-n/2` plane
    /// has no real derivative and is mapped to zero.
    pub fn derivative(&self, axis: usize) -> Self {
        assert!(axis < 3, "axis out of range");
        let tables = self.lattice.tables();
        let half = -((self.lattice.n() / 2) as i64);
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if self.lattice.mode(i)[axis] == half {
                    Complex64::default()
                } else {
                    c * Complex64::new(0.0, tables.kvec[i][axis])
                }
            })
            .collect();
        Self::from_raw(self.lattice, coeffs)
    }

    pub fn gradient(&self) -> [Self; 3] {
        [self.derivative(0), self.derivative(1), self.derivative(2)]
    }

    /// Keep one side of the sphere `|k| = R`; the shell itself goes low.
    pub fn truncate(&self, radius: f64, side: Side) -> Self {
        let tables = self.lattice.tables();
        let coeffs = self
            .coeffs
            .iter()
            .zip(&tables.kmag)
            .map(|(&c, &k)| {
                let low = within_radius(k, radius);
                if low == (side == Side::Low) {
                    c
                } else {
                    Complex64::default()
                }
            })
            .collect();
        Self::from_raw(self.lattice, coeffs)
    }

    /// Multiply every coefficient by `|k|^s`, dropping the zero mode.
    pub fn fractional_derivative(&self, s: f64) -> Self {
        let tables = self.lattice.tables();
        let coeffs = self
            .coeffs
            .iter()
            .zip(&tables.kmag)
            .map(|(&c, &k)| if k == 0.0 { Complex64::default() } else { c * k.powf(s) })
            .collect();
        Self::from_raw(self.lattice, coeffs)
    }
}

/// Anything that exposes one or more scalar components on a shared lattice.
pub trait SpectralComponents {
    fn components(&self) -> &[ScalarSpectralField];

    fn lattice(&self) -> Lattice {
        self.components()[0].lattice()
    }

    fn has_nonzero_mean(&self) -> bool {
        self.components().iter().any(ScalarSpectralField::has_nonzero_mean)
    }
}

impl SpectralComponents for ScalarSpectralField {
    fn components(&self) -> &[ScalarSpectralField] {
        std::slice::from_ref(self)
    }
}

impl SpectralComponents for [ScalarSpectralField; 3] {
    fn components(&self) -> &[ScalarSpectralField] {
        self
    }
}

/// Three-component, divergence-free, zero-mean spectral velocity.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityField {
    components: [ScalarSpectralField; 3],
}

impl SpectralComponents for VelocityField {
    fn components(&self) -> &[ScalarSpectralField] {
        &self.components
    }
}

impl VelocityField {
    /// Validates the shared lattice, zero mean and per-mode incompressibility.
    pub fn new(components: [ScalarSpectralField; 3]) -> Result<Self> {
        let lattice = components[0].lattice();
        if components.iter().any(|c| c.lattice() != lattice) {
            return Err(Error::LatticeMismatch);
        }
        let cmax = components.iter().map(|c| c.max_abs_coeff()).fold(0.0, f64::max);
        let c0 = components.iter().map(|c| c.mean().norm()).fold(0.0, f64::max);
        if c0 > MEAN_TOLERANCE * cmax {
            return Err(Error::NonzeroMean(c0));
        }
        let tables = lattice.tables();
        let mut worst = 0.0f64;
        for i in 1..lattice.len() {
            let k = tables.kvec[i];
            let c = [components[0].coeffs[i], components[1].coeffs[i], components[2].coeffs[i]];
            let dot = c[0] * k[0] + c[1] * k[1] + c[2] * k[2];
            let cnorm = (c[0].norm_sqr() + c[1].norm_sqr() + c[2].norm_sqr()).sqrt();
            // Absolute floor keeps roundoff-level modes from tripping the check.
            let allowed = DIVERGENCE_TOLERANCE * tables.kmag[i] * (cnorm + 1e-2 * cmax);
            if dot.norm() > allowed {
                worst = worst.max(dot.norm() / (tables.kmag[i] * cnorm.max(f64::MIN_POSITIVE)));
            }
        }
        if worst > 0.0 {
            return Err(Error::NotDivergenceFree(worst));
        }
        Ok(Self { components })
    }

    pub(crate) fn new_unchecked(components: [ScalarSpectralField; 3]) -> Self {
        Self { components }
    }

    pub fn zeros(lattice: Lattice) -> Self {
        let z = ScalarSpectralField::zeros(lattice);
        Self { components: [z.clone(), z.clone(), z] }
    }

    pub fn component(&self, i: usize) -> &ScalarSpectralField {
        &self.components[i]
    }

    pub fn as_array(&self) -> &[ScalarSpectralField; 3] {
        &self.components
    }

    pub fn into_array(self) -> [ScalarSpectralField; 3] {
        self.components
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        Self::new_unchecked(self.components.clone().map(|c| c.scaled(lambda)))
    }

    /// `max_k |k·ĉ(k)| / (|k| · max|ĉ|)`; zero for an exactly solenoidal field.
    pub fn divergence_defect(&self) -> f64 {
        divergence_defect(&self.components)
    }

    /// Spectral divergence `i k·ĉ`.
    pub fn divergence(&self) -> ScalarSpectralField {
        let d: Vec<ScalarSpectralField> = (0..3).map(|j| self.components[j].derivative(j)).collect();
        d[0].try_add(&d[1]).and_then(|s| s.try_add(&d[2])).expect("shared lattice")
    }

    pub fn truncate(&self, radius: f64, side: Side) -> Self {
        Self::new_unchecked(self.components.clone().map(|c| c.truncate(radius, side)))
    }
}

pub(crate) fn divergence_defect(components: &[ScalarSpectralField; 3]) -> f64 {
    let lattice = components[0].lattice();
    let tables = lattice.tables();
    let cmax = components.iter().map(|c| c.max_abs_coeff()).fold(0.0, f64::max);
    if cmax == 0.0 {
        return 0.0;
    }
    (1..lattice.len())
        .map(|i| {
            let k = tables.kvec[i];
            let dot = components[0].coeffs[i] * k[0]
                + components[1].coeffs[i] * k[1]
                + components[2].coeffs[i] * k[2];
            dot.norm() / tables.kmag[i]
        })
        .fold(0.0, f64::max)
        / cmax
}

/// Leray projection `ĉ ← ĉ − k (k·ĉ)/|k|²`; the zero mode stays zero.
pub fn leray_project(v: &[ScalarSpectralField; 3]) -> Result<VelocityField> {
    let lattice = v[0].lattice();
    if v.iter().any(|c| c.lattice() != lattice) {
        return Err(Error::LatticeMismatch);
    }
    if let Some(c) = v.iter().find(|c| c.has_nonzero_mean()) {
        return Err(Error::NonzeroMean(c.mean().norm()));
    }
    let mut out = v.clone().map(|c| c.coeffs);
    {
        let [a, b, c] = &mut out;
        project_in_place(lattice, [a.as_mut_slice(), b.as_mut_slice(), c.as_mut_slice()]);
    }
    Ok(VelocityField::new_unchecked(out.map(|c| ScalarSpectralField::from_raw(lattice, c))))
}

pub(crate) fn project_in_place(lattice: Lattice, u: [&mut [Complex64]; 3]) {
    let tables = lattice.tables();
    let [a, b, c] = u;
    a[0] = Complex64::default();
    b[0] = Complex64::default();
    c[0] = Complex64::default();
    for i in 1..lattice.len() {
        let k = tables.kvec[i];
        let k2 = tables.kmag[i] * tables.kmag[i];
        let dot = (a[i] * k[0] + b[i] * k[1] + c[i] * k[2]) / k2;
        a[i] -= dot * k[0];
        b[i] -= dot * k[1];
        c[i] -= dot * k[2];
    }
}
