//! The `Ḣˢ` trilinear form `⟨f·∇f, f⟩_{Ḣˢ}` and its commutator bound.
//!
//! All quadratic terms are formed on the 3/2-padded grid. With the input
//! limited to `|m_i| <= n/3` that grid holds the complete product spectrum,
//! so the sums below are exact up to roundoff.

use serde::{Deserialize, Serialize};

use super::{ConstantMode, InequalityVerdict, DEFAULT_TOLERANCE};
use crate::error::Result;
use crate::field::VelocityField;
use crate::lattice::Lattice;
use crate::norms::{leilin_norm, sobolev_norm};
use crate::products::{advect, check_budget, embed, padded_lattice};
use crate::summation::CompensatedSum;
use num_complex::Complex64;

struct Padded {
    grid: Lattice,
    f: [Vec<Complex64>; 3],
}

impl Padded {
    fn new(f: &VelocityField) -> Result<Self> {
        let base = f.as_array()[0].lattice();
        let max_mode = f.as_array().iter().map(|c| c.max_mode()).max().unwrap_or(0);
        check_budget(max_mode, base.n())?;
        let grid = padded_lattice(base);
        let f = std::array::from_fn(|i| embed(base, f.component(i).coeffs(), grid));
        Ok(Self { grid, f })
    }

    fn refs(v: &[Vec<Complex64>; 3]) -> [&[Complex64]; 3] {
        [&v[0], &v[1], &v[2]]
    }

    /// `|D|ˢ`, with `|D|⁰` the identity (zero mode kept).
    fn multiplier(&self, s: f64) -> Vec<f64> {
        let tables = self.grid.tables();
        tables
            .kmag
            .iter()
            .map(|&k| if s == 0.0 { 1.0 } else if k == 0.0 { 0.0 } else { k.powf(s) })
            .collect()
    }

    fn apply(&self, mult: &[f64], v: &[Vec<Complex64>; 3]) -> [Vec<Complex64>; 3] {
        std::array::from_fn(|i| v[i].iter().zip(mult).map(|(c, m)| c * m).collect())
    }

    fn inner(a: &[Vec<Complex64>; 3], b: &[Vec<Complex64>; 3]) -> f64 {
        let mut acc = CompensatedSum::new();
        for i in 0..3 {
            for (x, y) in a[i].iter().zip(&b[i]) {
                acc.add((x * y.conj()).re);
            }
        }
        acc.value()
    }
}

/// Everything the commutator argument touches for one field and order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrilinearReport {
    pub s: f64,
    /// `⟨f·∇f, f⟩_{Ḣˢ}`
    pub trilinear: f64,
    /// `‖|D|ˢ(f·∇f) − f·∇(|D|ˢf)‖_{L²}`
    pub commutator: f64,
    /// `⟨f·∇(|D|ˢf), |D|ˢf⟩_{L²}`, zero for solenoidal `f`.
    pub cancellation: f64,
    pub hs: f64,
    pub x1: f64,
    /// `|trilinear| / (‖f‖_{𝒳¹}‖f‖_{Ḣˢ})`.
    pub statement_ratio: f64,
    /// `|trilinear| / (‖f‖_{𝒳¹}‖f‖²_{Ḣˢ})`.
    pub proof_ratio: f64,
    /// `commutator / (‖f‖_{Ḣˢ}‖f‖_{𝒳¹})`.
    pub commutator_ratio: f64,
}

fn safe_ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else if den > 0.0 {
        num / den
    } else {
        f64::INFINITY
    }
}

pub fn trilinear_report(f: &VelocityField, s: f64) -> Result<TrilinearReport> {
    if !(s.is_finite() && s >= 0.0) {
        return Err(crate::Error::InvalidArgument(format!("order must be >= 0, got {s}")));
    }
    let p = Padded::new(f)?;
    let g = p.grid;
    let mult = p.multiplier(s);
    let fs = p.apply(&mult, &p.f);
    let adv = advect(g, Padded::refs(&p.f), Padded::refs(&p.f));
    let adv_s = advect(g, Padded::refs(&p.f), Padded::refs(&fs));

    let ds_adv = p.apply(&mult, &adv);
    let trilinear = Padded::inner(&ds_adv, &fs);
    let cancellation = Padded::inner(&adv_s, &fs);
    let mut acc = CompensatedSum::new();
    for i in 0..3 {
        for (a, b) in ds_adv[i].iter().zip(&adv_s[i]) {
            acc.add((a - b).norm_sqr());
        }
    }
    let commutator = acc.value().sqrt();
    let hs = sobolev_norm(f, s)?;
    let x1 = leilin_norm(f, 1.0)?;
    Ok(TrilinearReport {
        s,
        trilinear,
        commutator,
        cancellation,
        hs,
        x1,
        statement_ratio: safe_ratio(trilinear.abs(), x1 * hs),
        proof_ratio: safe_ratio(trilinear.abs(), x1 * hs * hs),
        commutator_ratio: safe_ratio(commutator, hs * x1),
    })
}

pub fn commutator_l2(f: &VelocityField, s: f64) -> Result<f64> {
    Ok(trilinear_report(f, s)?.commutator)
}

pub fn trilinear_hs(f: &VelocityField, s: f64) -> Result<f64> {
    Ok(trilinear_report(f, s)?.trilinear)
}

pub fn advective_cancellation(f: &VelocityField, s: f64) -> Result<f64> {
    Ok(trilinear_report(f, s)?.cancellation)
}

/// `|⟨f·∇f, f⟩_{Ḣˢ}| <= ‖commutator‖_{L²} ‖f‖_{Ḣˢ}`: Cauchy–Schwarz after
/// subtracting the vanishing advective term. Roundoff floor is
/// `1e-10 · ‖f‖²_{Ḣˢ}‖f‖_{𝒳¹}`.
pub fn check_trilinear_chain(f: &VelocityField, s: f64) -> Result<InequalityVerdict> {
    let r = trilinear_report(f, s)?;
    let floor = DEFAULT_TOLERANCE * r.hs * r.hs * r.x1;
    Ok(InequalityVerdict::new(
        "trilinear_chain",
        r.trilinear.abs(),
        r.commutator * r.hs,
        ConstantMode::Lattice,
        DEFAULT_TOLERANCE,
        floor,
    ))
}

/// `|⟨f·∇f, f⟩_{Ḣ^{3/2}}| <= C‖f‖²_{Ḣ^{3/2}}‖f‖_{Ḣ^{5/2}}` with `C` estimated.
pub fn check_h32_trilinear(f: &VelocityField) -> Result<InequalityVerdict> {
    let r = trilinear_report(f, 1.5)?;
    let h52 = sobolev_norm(f, 2.5)?;
    let floor = DEFAULT_TOLERANCE * r.hs * r.hs * r.x1;
    Ok(InequalityVerdict::new(
        "h32_trilinear",
        r.trilinear.abs(),
        r.hs * r.hs * h52,
        ConstantMode::Empirical,
        DEFAULT_TOLERANCE,
        floor,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{random_band_limited, single_mode, taylor_green};
    use crate::Error;

    #[test]
    fn order_zero_commutator_vanishes() {
        let u = random_band_limited(Lattice::cube(16).unwrap(), 1.0, 4.0, 1.0, 3).unwrap();
        assert_eq!(commutator_l2(&u, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn single_mode_trilinear_vanishes() {
        let u = single_mode(Lattice::cube(8).unwrap(), [1, 1, 0], Complex64::new(0.5, 0.2)).unwrap();
        let r = trilinear_report(&u, 1.5).unwrap();
        assert!(r.trilinear.abs() < 1e-16);
        let v = check_h32_trilinear(&u).unwrap();
        assert_eq!(v.ratio, 0.0);
        assert!(v.holds);
    }

    #[test]
    fn cancellation_on_taylor_green() {
        let u = taylor_green(Lattice::cube(16).unwrap());
        for s in [0.0, 1.5, 2.5] {
            let r = trilinear_report(&u, s).unwrap();
            assert!(r.cancellation.abs() <= 1e-10 * r.hs * r.hs * r.x1);
            assert!(check_trilinear_chain(&u, s).unwrap().holds);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let u = random_band_limited(Lattice::cube(8).unwrap(), 1.0, 3.5, 1.0, 3).unwrap();
        assert!(matches!(trilinear_report(&u, 1.0), Err(Error::AliasingBudget { .. })));
    }
}
