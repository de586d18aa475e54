//! Test-field generators: Taylor–Green, seeded band-limited random fields,
//! and single conjugate-pair modes.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::field::{within_radius, ScalarSpectralField, VelocityField};
use crate::lattice::Lattice;

/// `u = (cos x₁ sin x₂ sin x₃, −sin x₁ cos x₂ sin x₃, 0)` in units where the
/// box has fundamental wavenumber `2π/L`.
pub fn taylor_green(lattice: Lattice) -> VelocityField {
    let mut u1 = Vec::new();
    let mut u2 = Vec::new();
    for s1 in [1i64, -1] {
        for s2 in [1i64, -1] {
            for s3 in [1i64, -1] {
                let m = [s1, s2, s3];
                // cos a = Σ e^{±ia}/2, sin b = Σ ±e^{±ib}/(2i)
                u1.push((m, Complex64::new(-(s2 * s3) as f64 / 8.0, 0.0)));
                u2.push((m, Complex64::new((s1 * s3) as f64 / 8.0, 0.0)));
            }
        }
    }
    let c1 = modes_exact(lattice, &u1);
    let c2 = modes_exact(lattice, &u2);
    VelocityField::new_unchecked([c1, c2, ScalarSpectralField::zeros(lattice)])
}

fn modes_exact(lattice: Lattice, modes: &[([i64; 3], Complex64)]) -> ScalarSpectralField {
    let mut coeffs = vec![Complex64::default(); lattice.len()];
    for &(m, c) in modes {
        coeffs[lattice.index_of(m).expect("low mode fits every lattice")] = c;
    }
    ScalarSpectralField::from_raw(lattice, coeffs)
}

/// One conjugate pair at integer mode `m`, polarized perpendicular to `m`,
/// with `|ĉ(m)| = amplitude`.
pub fn single_mode(lattice: Lattice, m: [i64; 3], amplitude: Complex64) -> Result<VelocityField> {
    if m == [0, 0, 0] {
        return Err(Error::InvalidArgument("single mode must be nonzero".into()));
    }
    let half = (lattice.n() / 2) as i64;
    if m.iter().any(|c| c.abs() >= half) {
        return Err(Error::InvalidArgument(format!("mode {m:?} needs a conjugate partner on the lattice")));
    }
    let mf = m.map(|c| c as f64);
    // Cross with the axis least aligned with m.
    let axis = (0..3)
        .min_by(|&a, &b| mf[a].abs().total_cmp(&mf[b].abs()))
        .expect("three axes");
    let mut e = [0.0; 3];
    e[axis] = 1.0;
    let d = [
        mf[1] * e[2] - mf[2] * e[1],
        mf[2] * e[0] - mf[0] * e[2],
        mf[0] * e[1] - mf[1] * e[0],
    ];
    let norm = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    let comps = d.map(|dj| {
        ScalarSpectralField::from_modes(lattice, &[(m, amplitude * (dj / norm))])
            .expect("mode checked above")
    });
    Ok(VelocityField::new_unchecked(comps))
}

/// Seeded divergence-free field supported on `kmin <= |k| <= kmax`.
///
/// Each conjugate pair gets a random transverse complex polarization of unit
/// Euclidean length times `|k|^{-decay}`.
pub fn random_band_limited(
    lattice: Lattice,
    kmin: f64,
    kmax: f64,
    decay: f64,
    seed: u64,
) -> Result<VelocityField> {
    if !(kmin > 0.0 && kmin <= kmax && kmax < lattice.nyquist()) {
        return Err(Error::InvalidBand(format!(
            "need 0 < kmin <= kmax < {}, got [{kmin}, {kmax}]",
            lattice.nyquist()
        )));
    }
    let tables = lattice.tables();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut comps = [
        vec![Complex64::default(); lattice.len()],
        vec![Complex64::default(); lattice.len()],
        vec![Complex64::default(); lattice.len()],
    ];
    let mut populated = 0usize;
    for i in 1..lattice.len() {
        let partner = tables.conj_index[i] as usize;
        let kmag = tables.kmag[i];
        if partner <= i || kmag < kmin * (1.0 - 1e-12) || !within_radius(kmag, kmax) {
            continue;
        }
        let k = tables.kvec[i];
        let pol = loop {
            let mut a: [Complex64; 3] = std::array::from_fn(|_| {
                Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            });
            let dot = (a[0] * k[0] + a[1] * k[1] + a[2] * k[2]) / (kmag * kmag);
            for j in 0..3 {
                a[j] -= dot * k[j];
            }
            let norm = (a[0].norm_sqr() + a[1].norm_sqr() + a[2].norm_sqr()).sqrt();
            if norm > 1e-8 {
                break a.map(|z| z / norm);
            }
        };
        let amp = kmag.powf(-decay);
        for j in 0..3 {
            comps[j][i] = pol[j] * amp;
            comps[j][partner] = (pol[j] * amp).conj();
        }
        populated += 1;
    }
    if populated == 0 {
        return Err(Error::EmptyBand { kmin, kmax });
    }
    Ok(VelocityField::new_unchecked(comps.map(|c| ScalarSpectralField::from_raw(lattice, c))))
}
