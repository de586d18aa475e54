use crate::error::{Error, Result};
use crate::sim::TrajectorySample;

/// Distance to the candidate singular time; errors unless `t < t_star`.
fn tau(t: f64, t_star: f64) -> Result<f64> {
    if !(t < t_star) {
        return Err(Error::InvalidArgument(format!("sample time {t} is not before t_star={t_star}")));
    }
    Ok(t_star - t)
}

/// `√|ln x|`, undefined where the logarithm vanishes or diverges.
fn root_abs_log(x: f64) -> Option<f64> {
    if !(x > 0.0 && x.is_finite()) {
        return None;
    }
    let l = x.ln();
    (l != 0.0).then(|| l.abs().sqrt())
}

/// `(t*−t)·√|ln(t*−t)|·‖u‖_{Ḣ^{5/2}}`. Undefined at `t* − t = 1`.
pub fn theorem1_functional(sample: &TrajectorySample, t_star: f64) -> Result<Option<f64>> {
    let tau = tau(sample.t, t_star)?;
    let h52 = sample.norms.require_hdot(2.5)?;
    Ok(root_abs_log(tau).map(|l| tau * l * h52))
}

/// `(t*−t)·√|ln(4‖u‖_{Ḣ^{1/2}}/(cν))|·‖u‖_{Ḣ^{5/2}}`.
///
/// When the log argument equals one the value is exactly zero.
pub fn theorem2_functional(sample: &TrajectorySample, t_star: f64, c_small: f64, nu: f64) -> Result<Option<f64>> {
    let h12 = sample.norms.require_hdot(0.5)?;
    log_form(sample, t_star, 4.0 * h12 / (c_small * nu))
}

/// Variant of [`theorem2_functional`] with the squared norm `‖u‖²_{Ḣ^{1/2}}/(cν)` inside the log.
pub fn theorem2_squared_functional(
    sample: &TrajectorySample,
    t_star: f64,
    c_small: f64,
    nu: f64,
) -> Result<Option<f64>> {
    let h12 = sample.norms.require_hdot(0.5)?;
    log_form(sample, t_star, h12 * h12 / (c_small * nu))
}

/// `(t*−t)·√|ln(8‖u‖_{𝒳⁻¹}/ν)|·‖u‖_{Ḣ^{5/2}}`.
pub fn theorem3_functional(sample: &TrajectorySample, t_star: f64, nu: f64) -> Result<Option<f64>> {
    let xm1 = sample.norms.require_leilin(-1.0)?;
    log_form(sample, t_star, 8.0 * xm1 / nu)
}

/// Variant of [`theorem3_functional`] with `‖u‖_{𝒳⁻¹}/(cν)` inside the log.
pub fn theorem3_cnu_functional(sample: &TrajectorySample, t_star: f64, c_small: f64, nu: f64) -> Result<Option<f64>> {
    let xm1 = sample.norms.require_leilin(-1.0)?;
    log_form(sample, t_star, xm1 / (c_small * nu))
}

fn log_form(sample: &TrajectorySample, t_star: f64, arg: f64) -> Result<Option<f64>> {
    let tau = tau(sample.t, t_star)?;
    let h52 = sample.norms.require_hdot(2.5)?;
    if !(arg > 0.0 && arg.is_finite()) {
        return Ok(None);
    }
    Ok(Some(tau * arg.ln().abs().sqrt() * h52))
}

/// Known lower-bound rates, each of the form `(t*−t)^γ·(norm)`.
///
/// Orders in `s_list` give `(t*−t)^{(2s−1)/4}‖u‖_{Ḣˢ}` on `(1/2, 5/2)`
/// without `3/2`, and `(t*−t)^{s/5}‖u‖_{Ḣˢ}` above `5/2`. Other orders are
/// skipped.
pub fn rate_catalog(
    sample: &TrajectorySample,
    t_star: f64,
    s_list: &[f64],
    nu: f64,
) -> Result<Vec<(String, Option<f64>)>> {
    let tau = tau(sample.t, t_star)?;
    let norms = &sample.norms;
    let h32 = norms.require_hdot(1.5)?;
    let h52 = norms.require_hdot(2.5)?;
    let mut out = vec![("leray".to_string(), Some(tau.powf(0.25) * norms.require_hdot(1.0)?))];
    for &s in s_list {
        let exponent = if s > 0.5 && s < 2.5 && s != 1.5 {
            (2.0 * s - 1.0) / 4.0
        } else if s > 2.5 {
            s / 5.0
        } else {
            continue;
        };
        out.push((format!("rate_h{s}"), Some(tau.powf(exponent) * norms.require_hdot(s)?)));
    }
    out.push(("strong_h32".to_string(), Some(tau.sqrt() * h32 / nu.sqrt())));
    out.push(("log_h32".to_string(), root_abs_log(tau).map(|l| tau.sqrt() * l * h32)));
    let l = tau.ln().abs();
    out.push(("log_h52".to_string(), (l > 0.0).then_some(tau * l * h52)));
    Ok(out)
}

/// Inverse of `x ↦ x√(ln x)` on `x >= 4`, by bisection.
pub fn invert_rate(y: f64) -> Result<f64> {
    let forward = |x: f64| x * x.ln().sqrt();
    let floor = forward(4.0);
    if !(y.is_finite() && y >= floor * (1.0 - 1e-15)) {
        return Err(Error::InvalidArgument(format!("rate value {y} is below the range start {floor}")));
    }
    if y <= floor {
        return Ok(4.0);
    }
    // x√(ln x) >= x once x >= e, so the root lies below y.
    let (mut lo, mut hi) = (4.0_f64, y.max(4.0));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if forward(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}
