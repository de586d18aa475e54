//! The periodic cubic lattice and its wavenumber tables.
//!
//! Coefficients and physical samples are both stored row-major over
//! `(i0, i1, i2)` with `i2` fastest. Index `i` on an axis carries the integer
//! wavenumber `i` for `i < n/2` and `i - n` otherwise, so every axis covers
//! `[-n/2, n/2)`. The wavevector is `k = (2π/L) m`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use once_cell::sync::Lazy;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    n: usize,
    period: f64,
}

impl Lattice {
    pub fn new(n: usize, period: f64) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return Err(Error::InvalidLattice(format!(
                "points per axis must be even and >= 8, got {n}"
            )));
        }
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidLattice(format!(
                "period must be positive and finite, got {period}"
            )));
        }
        Ok(Self { n, period })
    }

    /// Lattice on the standard `2π` box.
    pub fn cube(n: usize) -> Result<Self> {
        Self::new(n, 2.0 * PI)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Total number of lattice sites, `n³`.
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Fundamental wavenumber `2π/L`.
    pub fn k_unit(&self) -> f64 {
        2.0 * PI / self.period
    }

    /// Largest wavenumber magnitude representable along one axis.
    pub fn nyquist(&self) -> f64 {
        self.k_unit() * (self.n / 2) as f64
    }

    pub fn grid_spacing(&self) -> f64 {
        self.period / self.n as f64
    }

    #[inline]
    pub fn signed(&self, i: usize) -> i64 {
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    #[inline]
    fn wrap(&self, m: i64) -> usize {
        m.rem_euclid(self.n as i64) as usize
    }

    /// Integer wavenumber triple stored at `idx`.
    #[inline]
    pub fn mode(&self, idx: usize) -> [i64; 3] {
        let n = self.n;
        [self.signed(idx / (n * n)), self.signed((idx / n) % n), self.signed(idx % n)]
    }

    /// Storage index of an integer wavenumber, if it lies in `[-n/2, n/2)³`.
    pub fn index_of(&self, m: [i64; 3]) -> Option<usize> {
        let half = (self.n / 2) as i64;
        if m.iter().any(|&c| c < -half || c >= half) {
            return None;
        }
        Some(self.index_wrapped(m))
    }

    /// Storage index of `m` reduced modulo `n` on every axis.
    #[inline]
    pub fn index_wrapped(&self, m: [i64; 3]) -> usize {
        let n = self.n;
        (self.wrap(m[0]) * n + self.wrap(m[1])) * n + self.wrap(m[2])
    }

    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        let u = self.k_unit();
        let m = self.mode(idx);
        [u * m[0] as f64, u * m[1] as f64, u * m[2] as f64]
    }

    /// True when any component of the mode sits on the unpaired `-n/2` plane.
    #[inline]
    pub fn is_nyquist(&self, idx: usize) -> bool {
        let half = -((self.n / 2) as i64);
        self.mode(idx).contains(&half)
    }

    /// Largest `|m_i|` over all axes for the mode at `idx`.
    #[inline]
    pub fn max_abs_mode(&self, idx: usize) -> usize {
        self.mode(idx).iter().map(|c| c.unsigned_abs() as usize).max().unwrap_or(0)
    }

    pub(crate) fn tables(&self) -> Arc<LatticeTables> {
        type Cache = Mutex<HashMap<(usize, u64), Arc<LatticeTables>>>;
        static CACHE: Lazy<Cache> = Lazy::new(|| Mutex::new(HashMap::new()));
        let key = (self.n, self.period.to_bits());
        let mut cache = CACHE.lock().expect("lattice table cache poisoned");
        cache
            .entry(key)
            .or_insert_with(|| Arc::new(LatticeTables::build(self)))
            .clone()
    }
}

/// Per-lattice wavenumber data shared by every field on that lattice.
#[derive(Debug)]
pub(crate) struct LatticeTables {
    pub kvec: Vec<[f64; 3]>,
    pub kmag: Vec<f64>,
    /// Indices sorted by descending `|k|`, ties broken by index.
    pub desc_order: Vec<u32>,
    /// Storage index of `-m` (mod n).
    pub conj_index: Vec<u32>,
}

impl LatticeTables {
    fn build(lat: &Lattice) -> Self {
        let len = lat.len();
        let mut kvec = Vec::with_capacity(len);
        let mut kmag = Vec::with_capacity(len);
        let mut conj_index = Vec::with_capacity(len);
        for idx in 0..len {
            let k = lat.wavevector(idx);
            kmag.push((k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt());
            kvec.push(k);
            let m = lat.mode(idx);
            conj_index.push(lat.index_wrapped([-m[0], -m[1], -m[2]]) as u32);
        }
        let mut desc_order: Vec<u32> = (0..len as u32).collect();
        desc_order.sort_by(|&a, &b| {
            kmag[b as usize]
                .total_cmp(&kmag[a as usize])
                .then(a.cmp(&b))
        });
        Self { kvec, kmag, desc_order, conj_index }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(Lattice::cube(6).is_err());
        assert!(Lattice::cube(9).is_err());
        assert!(Lattice::new(8, 0.0).is_err());
        assert!(Lattice::new(8, f64::NAN).is_err());
    }

    #[test]
    fn index_round_trip() {
        let lat = Lattice::cube(8).unwrap();
        for idx in 0..lat.len() {
            assert_eq!(lat.index_of(lat.mode(idx)), Some(idx));
        }
        assert_eq!(lat.index_of([0, 0, 0]), Some(0));
        assert_eq!(lat.index_of([4, 0, 0]), None);
        assert_eq!(lat.mode(lat.index_of([-4, 3, -1]).unwrap()), [-4, 3, -1]);
    }

    #[test]
    fn tables_are_consistent() {
        let lat = Lattice::new(8, 4.0 * PI).unwrap();
        let t = lat.tables();
        let idx = lat.index_of([1, -2, 3]).unwrap();
        assert!((t.kmag[idx] - 0.5 * 14f64.sqrt()).abs() < 1e-15);
        assert_eq!(lat.mode(t.conj_index[idx] as usize), [-1, 2, -3]);
        assert_eq!(t.desc_order.last().copied(), Some(0));
    }
}
