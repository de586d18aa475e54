//! Pseudo-spectral quadratic products.
//!
//! Products are formed on a physical grid and transformed back. Two
//! dealiasing strategies are offered: the 2/3 rule (cube mask `|m_i| <= K`
//! with `3K < n`, products on the native grid) and the 3/2 rule (zero-pad to
//! `M >= 3n/2` points per axis). On the padded grid the full product
//! spectrum of fields with `|m_i| <= n/3` is represented without wrap-around.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::Fft3;
use crate::lattice::Lattice;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dealias {
    #[serde(rename = "23")]
    TwoThirds,
    #[serde(rename = "32")]
    ThreeHalves,
}

impl std::str::FromStr for Dealias {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "23" | "two-thirds" => Ok(Dealias::TwoThirds),
            "32" | "three-halves" => Ok(Dealias::ThreeHalves),
            other => Err(Error::InvalidArgument(format!("unknown dealias rule `{other}`"))),
        }
    }
}

impl std::fmt::Display for Dealias {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Dealias::TwoThirds => "23",
            Dealias::ThreeHalves => "32",
        })
    }
}

/// Largest retained `|m_i|` under the 2/3 rule.
pub fn two_thirds_cutoff(n: usize) -> usize {
    (n - 1) / 3
}

/// Largest input `|m_i|` whose products stay exact on the 3/2-padded grid.
pub fn product_budget(n: usize) -> usize {
    n / 3
}

/// Even size `>= 3n/2` used for zero-padded products.
pub fn padded_size(n: usize) -> usize {
    let m = (3 * n).div_ceil(2);
    m + m % 2
}

pub(crate) fn padded_lattice(base: Lattice) -> Lattice {
    Lattice::new(padded_size(base.n()), base.period()).expect("padded size is even and >= 12")
}

/// Storage index on `dst` of every storage index on `src`, by integer mode.
fn mode_map(src: Lattice, dst: Lattice) -> Vec<usize> {
    let (n, m) = (src.n(), dst.n());
    let wrap: Vec<usize> = (0..n).map(|i| src.signed(i).rem_euclid(m as i64) as usize).collect();
    let mut out = Vec::with_capacity(src.len());
    for &a in &wrap {
        for &b in &wrap {
            for &c in &wrap {
                out.push((a * m + b) * m + c);
            }
        }
    }
    out
}

/// Copy coefficients from `src` into the (larger) lattice `dst` by integer mode.
pub(crate) fn embed(src: Lattice, coeffs: &[Complex64], dst: Lattice) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); dst.len()];
    for (&j, &c) in mode_map(src, dst).iter().zip(coeffs) {
        out[j] = c;
    }
    out
}

/// Read the modes of `dst` out of a spectrum on the (larger) lattice `src`.
pub(crate) fn restrict(src: Lattice, coeffs: &[Complex64], dst: Lattice) -> Vec<Complex64> {
    mode_map(dst, src).into_iter().map(|j| coeffs[j]).collect()
}

/// Per-axis wavenumbers with the unpaired `-n/2` entry set to zero.
fn axis_wavenumbers(grid: Lattice) -> Vec<f64> {
    let n = grid.n();
    (0..n).map(|i| if i == n / 2 { 0.0 } else { grid.k_unit() * grid.signed(i) as f64 }).collect()
}

fn to_real_grid(grid: Lattice, coeffs: &[Complex64]) -> Vec<f64> {
    let mut data = coeffs.to_vec();
    Fft3::get(grid.n()).inverse(&mut data);
    data.into_iter().map(|z| z.re).collect()
}

fn derivative(grid: Lattice, coeffs: &[Complex64], axis: usize) -> Vec<Complex64> {
    let n = grid.n();
    let k = axis_wavenumbers(grid);
    let stride = [n * n, n, 1][axis];
    coeffs.iter().enumerate().map(|(i, c)| c * Complex64::new(0.0, k[(i / stride) % n])).collect()
}

fn forward_real(grid: Lattice, values: Vec<f64>) -> Vec<Complex64> {
    let mut data: Vec<Complex64> = values.into_iter().map(|x| Complex64::new(x, 0.0)).collect();
    Fft3::get(grid.n()).forward(&mut data);
    let scale = 1.0 / grid.len() as f64;
    data.iter_mut().for_each(|c| *c *= scale);
    data
}

/// Spectral coefficients of `(f·∇)g` computed on `grid`, with no truncation.
pub(crate) fn advect(grid: Lattice, f: [&[Complex64]; 3], g: [&[Complex64]; 3]) -> [Vec<Complex64>; 3] {
    let fp: Vec<Vec<f64>> = f.par_iter().map(|c| to_real_grid(grid, c)).collect();
    let mut out: Vec<Vec<Complex64>> = (0..3)
        .into_par_iter()
        .map(|i| {
            let mut acc = vec![0.0; grid.len()];
            for (j, fj) in fp.iter().enumerate() {
                let dg = to_real_grid(grid, &derivative(grid, g[i], j));
                for ((a, &x), &y) in acc.iter_mut().zip(fj).zip(&dg) {
                    *a += x * y;
                }
            }
            forward_real(grid, acc)
        })
        .collect();
    std::array::from_fn(|i| std::mem::take(&mut out[i]))
}

/// Spectral coefficients of `div(u ⊗ u)_i = Σ_j ∂_j(u_j u_i)` on `grid`.
pub(crate) fn divergence_of_outer(grid: Lattice, u: [&[Complex64]; 3]) -> [Vec<Complex64>; 3] {
    let up: Vec<Vec<f64>> = u.par_iter().map(|c| to_real_grid(grid, c)).collect();
    let pairs = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];
    let spectra: Vec<Vec<Complex64>> = pairs
        .par_iter()
        .map(|&(a, b)| forward_real(grid, up[a].iter().zip(&up[b]).map(|(x, y)| x * y).collect()))
        .collect();
    let pair = |a: usize, b: usize| -> &Vec<Complex64> {
        let key = if a <= b { (a, b) } else { (b, a) };
        &spectra[pairs.iter().position(|&p| p == key).expect("symmetric pair")]
    };
    let n = grid.n();
    let k = axis_wavenumbers(grid);
    std::array::from_fn(|i| {
        let (p0, p1, p2) = (pair(i, 0), pair(i, 1), pair(i, 2));
        let mut out = Vec::with_capacity(grid.len());
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let idx = (a * n + b) * n + c;
                    let s = p0[idx] * k[a] + p1[idx] * k[b] + p2[idx] * k[c];
                    out.push(Complex64::new(-s.im, s.re));
                }
            }
        }
        out
    })
}

/// Zero every coefficient with some `|m_i|` above `cutoff`.
pub(crate) fn mask_cube(grid: Lattice, coeffs: &mut [Complex64], cutoff: usize) {
    for (i, c) in coeffs.iter_mut().enumerate() {
        if grid.max_abs_mode(i) > cutoff {
            *c = Complex64::default();
        }
    }
}

/// Ensure a field fits the alias-free product budget for its lattice.
pub(crate) fn check_budget(max_mode: usize, n: usize) -> Result<()> {
    let budget = product_budget(n);
    if max_mode > budget {
        return Err(Error::AliasingBudget { max_mode, budget });
    }
    Ok(())
}
