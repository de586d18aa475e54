//! Acceptance criteria, one line of output each. Runs without the libtest
//! harness so the PASS/FAIL lines are always shown; the process exits
//! nonzero if any criterion fails.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use blowlab_core::band::{continuum_band_constant, Band};
use blowlab_core::products::Dealias;
use blowlab_core::lab::{
    check_trilinear_chain, check_x0_interpolation, check_x0_via_h12_x1, check_x0_via_xm1_h52, commutator_l2,
    split_verdict, split_x1, trilinear_report, ConstantMode, Corpus, CorpusConfig, SplitVariant,
};
use blowlab_core::monitor::{
    h12_log_growth_check, h52_energy_residual, invert_rate, rate_catalog, theorem1_functional,
    theorem2_functional, theorem3_functional, xm1_gronwall_check,
};
use blowlab_core::sim::{
    energy_balance_residual, integrate, integrate_with_state, Integrator, SolverConfig, TimeStep, TrajectorySample,
};
use blowlab_core::{random_band_limited, single_mode, taylor_green, Complex64, Lattice, NormReport, VelocityField};
use blowlab_cli::{cmd_simulate, cmd_verify, InitialCondition, RunConfig};

type Outcome = Result<String, String>;
type Criterion = (&'static str, &'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn corpus32() -> Corpus {
    Corpus::generate(&CorpusConfig { n: 32, size: 100, ..CorpusConfig::default() }).expect("corpus")
}

/// Single modes with every `|m_i| <= 3`, one per conjugate pair.
fn single_modes(lattice: Lattice) -> Vec<VelocityField> {
    let mut out = Vec::new();
    for a in 0..=3i64 {
        for b in -3..=3i64 {
            for c in -3..=3i64 {
                if (a, b, c) == (0, 0, 0) || (a == 0 && (b < 0 || (b == 0 && c < 0))) {
                    continue;
                }
                out.push(single_mode(lattice, [a, b, c], Complex64::new(0.7, -0.2)).unwrap());
            }
        }
    }
    out
}

fn ac1() -> Outcome {
    let corpus = corpus32();
    let mut worst = 0.0f64;
    for f in &corpus.fields {
        let v = check_x0_interpolation(&f.components, ConstantMode::Lattice).map_err(|e| e.to_string())?;
        ensure(v.holds, || format!("seed {} ratio {}", f.seed, v.ratio))?;
        worst = worst.max(v.ratio);
    }
    let modes = single_modes(corpus.lattice);
    for u in &modes {
        let v = check_x0_interpolation(u, ConstantMode::Lattice).map_err(|e| e.to_string())?;
        ensure((v.ratio - 1.0).abs() <= 1e-12, || format!("single mode ratio {}", v.ratio))?;
    }
    Ok(format!("100 fields hold (max ratio {worst:.6}); {} single modes at ratio 1", modes.len()))
}

fn ac2() -> Outcome {
    let corpus = corpus32();
    let edge = corpus.lattice.nyquist();
    let pairs = [(edge / 16.0, edge / 4.0), (edge / 8.0, edge / 2.0), (edge / 4.0, 0.75 * edge)];
    let mut verdicts = 0;
    let mut worst = 0.0f64;
    let mut worst_partition = 0.0f64;
    for f in &corpus.fields {
        let c = &f.components;
        for v in [
            check_x0_via_xm1_h52(c, ConstantMode::Lattice).map_err(|e| e.to_string())?.verdict,
            check_x0_via_h12_x1(c, ConstantMode::Lattice).map_err(|e| e.to_string())?.verdict,
        ] {
            ensure(v.holds, || format!("seed {} {} ratio {}", f.seed, v.name, v.ratio))?;
            worst = worst.max(v.ratio);
            verdicts += 1;
        }
        for &(alpha, beta) in &pairs {
            for variant in SplitVariant::ALL {
                let r = split_x1(c, alpha, beta, variant, ConstantMode::Lattice).map_err(|e| e.to_string())?;
                let v = split_verdict(&r);
                ensure(v.holds && v.ratio <= 1.0 + 1e-10, || format!("seed {} {} ratio {}", f.seed, v.name, v.ratio))?;
                worst = worst.max(v.ratio);
                verdicts += 1;
                let rel = (r.band_sum() - r.x1).abs() / r.x1;
                ensure(rel <= 1e-12, || format!("seed {} partition defect {rel:e}", f.seed))?;
                worst_partition = worst_partition.max(rel);
            }
        }
    }
    Ok(format!("{verdicts} verdicts hold (max ratio {worst:.6}); partition defect <= {worst_partition:.1e}"))
}

/// Adaptive Simpson on `[a, b]`.
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// `∫ |ξ|^{2a} dξ` over a radial band, by quadrature in `r`. The unbounded
/// high band is mapped to `(0, 1]` by `r = β/t`.
fn radial_integral(a: f64, band: Band) -> f64 {
    let p = 2.0 * a + 2.0;
    let shell = |r: f64| 4.0 * PI * r.powf(p);
    match band {
        Band::Low { alpha } => simpson(&shell, 0.0, alpha, 1e-14),
        Band::Middle { alpha, beta } => simpson(&shell, alpha, beta, 1e-14),
        Band::High { beta } => {
            let g = |t: f64| if t == 0.0 { 0.0 } else { shell(beta / t) * beta / (t * t) };
            simpson(&g, 0.0, 1.0, 1e-16)
        }
    }
}

fn ac3() -> Outcome {
    let cases: Vec<(&str, f64, Band, f64)> = vec![
        ("sqrt(4pi/5) a^(5/2)", 1.0, Band::Low { alpha: 3.0 }, (4.0 * PI / 5.0).sqrt() * 3f64.powf(2.5)),
        ("sqrt(4pi ln(b/a))", -1.5, Band::Middle { alpha: 2.0, beta: 8.0 }, (4.0 * PI * 4f64.ln()).sqrt()),
        ("sqrt(2pi)/b", -2.5, Band::High { beta: 5.0 }, (2.0 * PI).sqrt() / 5.0),
        ("sqrt(2pi) R", -0.5, Band::Low { alpha: 2.5 }, (2.0 * PI).sqrt() * 2.5),
    ];
    let mut worst = 0.0f64;
    for (name, a, band, closed) in &cases {
        let value = continuum_band_constant(*a, *band).map_err(|e| e.to_string())?;
        let quad = radial_integral(*a, *band).sqrt();
        let rel_closed = (value - closed).abs() / closed;
        let rel_quad = (value - quad).abs() / quad;
        ensure(rel_closed <= 1e-12 && rel_quad <= 1e-6, || {
            format!("{name}: code {value}, closed form {closed}, quadrature {quad}")
        })?;
        worst = worst.max(rel_quad);
    }
    // The high-band integral behind the interpolation bound via X^-1 and H^5/2.
    let r = 1.7;
    let tail = radial_integral(-2.5, Band::High { beta: r });
    let expected = 2.0 * PI / (r * r);
    ensure((tail - expected).abs() / expected <= 1e-6, || format!("tail integral {tail}, expected {expected}"))?;
    let stated = PI.sqrt() / r;
    Ok(format!(
        "closed forms match quadrature to {worst:.1e}; tail integral = 2pi/R^2, so the constant is sqrt(2pi)/R = {:.6} against sqrt(pi)/R = {:.6}, a factor sqrt 2 apart",
        tail.sqrt(),
        stated
    ))
}

/// `‖|D|ˢ(f·∇f) − f·∇(|D|ˢf)‖` by direct convolution over mode pairs.
fn commutator_oracle(f: &VelocityField, s: f64) -> f64 {
    let lattice = f.component(0).lattice();
    let nz: Vec<usize> =
        (0..lattice.len()).filter(|&i| (0..3).any(|c| f.component(c).coeffs()[i] != Complex64::default())).collect();
    let mut out: std::collections::HashMap<[i64; 3], [Complex64; 3]> = Default::default();
    let mag = |k: [f64; 3]| (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
    let pow = |k: f64| if s == 0.0 { 1.0 } else if k == 0.0 { 0.0 } else { k.powf(s) };
    for &p in &nz {
        for &q in &nz {
            let (mp, mq) = (lattice.mode(p), lattice.mode(q));
            let m = [mp[0] + mq[0], mp[1] + mq[1], mp[2] + mq[2]];
            let kq = lattice.wavevector(q);
            let km = [kq[0] + lattice.wavevector(p)[0], kq[1] + lattice.wavevector(p)[1], kq[2] + lattice.wavevector(p)[2]];
            let weight = pow(mag(km)) - pow(mag(kq));
            let dot: Complex64 = (0..3).map(|j| f.component(j).coeffs()[p] * Complex64::new(0.0, kq[j])).sum();
            let entry = out.entry(m).or_insert([Complex64::default(); 3]);
            for (i, e) in entry.iter_mut().enumerate() {
                *e += dot * f.component(i).coeffs()[q] * weight;
            }
        }
    }
    out.values().flat_map(|v| v.iter().map(|z| z.norm_sqr())).sum::<f64>().sqrt()
}

fn ac4() -> Outcome {
    let lattice = Lattice::cube(16).unwrap();
    let budget_radius = 5.0 * lattice.k_unit();
    let mut worst_cancel = 0.0f64;
    let mut worst_chain = 0.0f64;
    for seed in 0..20u64 {
        let f = random_band_limited(lattice, 1.0, budget_radius, 1.0 + (seed % 3) as f64, 500 + seed)
            .map_err(|e| e.to_string())?;
        for s in [0.0, 1.5, 2.5] {
            let r = trilinear_report(&f, s).map_err(|e| e.to_string())?;
            let scale = r.x1 * r.hs * r.hs;
            let rel = r.cancellation.abs() / scale;
            ensure(rel <= 1e-10, || format!("seed {seed} s={s}: cancellation {rel:e}"))?;
            worst_cancel = worst_cancel.max(rel);
            let v = check_trilinear_chain(&f, s).map_err(|e| e.to_string())?;
            ensure(v.holds, || format!("seed {seed} s={s}: chain ratio {}", v.ratio))?;
            worst_chain = worst_chain.max(v.ratio);
        }
    }
    let small = Lattice::cube(8).unwrap();
    let mut worst_oracle = 0.0f64;
    for seed in 0..3u64 {
        let f = random_band_limited(small, 1.0, 2.0, 1.0, 900 + seed).map_err(|e| e.to_string())?;
        for s in [0.0, 1.5, 2.5] {
            let got = commutator_l2(&f, s).map_err(|e| e.to_string())?;
            let want = commutator_oracle(&f, s);
            let rel = if want == 0.0 { got } else { (got - want).abs() / want };
            ensure(rel <= 1e-10, || format!("n=8 seed {seed} s={s}: commutator {got} vs oracle {want}"))?;
            worst_oracle = worst_oracle.max(rel);
        }
    }
    Ok(format!(
        "cancellation <= {worst_cancel:.1e} relative; chain max ratio {worst_chain:.4}; commutator vs oracle {worst_oracle:.1e}"
    ))
}

fn distance(a: &VelocityField, b: &VelocityField) -> f64 {
    (0..3)
        .flat_map(|i| a.component(i).coeffs().iter().zip(b.component(i).coeffs()).map(|(x, y)| (x - y).norm_sqr()))
        .sum::<f64>()
        .sqrt()
}

fn ac5() -> Outcome {
    // Heat decay through the integrating factor.
    let lat8 = Lattice::cube(8).unwrap();
    let nu = 0.2;
    let u0 = single_mode(lat8, [2, -1, 1], Complex64::new(0.4, 0.3)).unwrap();
    let cfg = SolverConfig {
        nu,
        dt: TimeStep::Fixed(0.01),
        t_end: 0.5,
        integrator: Integrator::Imex,
        nonlinear: false,
        sample_every: 50,
        ..Default::default()
    };
    let (_, end) = integrate_with_state(&u0, &cfg, &mut []).map_err(|e| e.to_string())?;
    let factor = (-nu * 6.0 * end.t).exp();
    let mut heat_err = 0.0f64;
    for i in 0..3 {
        for (a, b) in end.u.component(i).coeffs().iter().zip(u0.component(i).coeffs()) {
            if b.norm() > 0.0 {
                heat_err = heat_err.max((a - b * factor).norm() / (b * factor).norm());
            }
        }
    }
    ensure(heat_err <= 1e-12, || format!("heat decay error {heat_err:e}"))?;

    // rk4 self-convergence on Taylor-Green over [0, 0.1].
    let lat32 = Lattice::cube(32).unwrap();
    let tg = taylor_green(lat32);
    let run = |dt: f64| {
        let cfg = SolverConfig { nu: 0.1, dt: TimeStep::Fixed(dt), t_end: 0.1, sample_every: 1000, ..Default::default() };
        integrate_with_state(&tg, &cfg, &mut []).map(|(_, s)| s.u)
    };
    let sols = [0.025, 0.0125, 0.00625].iter().map(|&dt| run(dt)).collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?;
    let (e1, e2) = (distance(&sols[0], &sols[1]), distance(&sols[1], &sols[2]));
    let order = (e1 / e2).log2();
    ensure(order >= 3.8, || format!("rk4 order {order}"))?;

    // Energy balance on Taylor-Green, n = 32, nu = 0.1, dt = 1e-3.
    let cfg = SolverConfig { nu: 0.1, dt: TimeStep::Fixed(1e-3), t_end: 0.1, sample_every: 1, ..Default::default() };
    let tr = integrate(&tg, &cfg, &mut []).map_err(|e| e.to_string())?;
    let e0 = tr.samples[0].norms.l2.powi(2);
    let resid = energy_balance_residual(&tr.samples, 0.1).map_err(|e| e.to_string())?;
    let worst = resid.iter().map(|r| r.residual).fold(0.0, f64::max);
    ensure(worst <= 1e-4 * e0, || format!("energy residual {worst:e} > 1e-4 * {e0}"))?;

    // Solenoidal and mean-free for 1000 steps.
    let lat16 = Lattice::cube(16).unwrap();
    let u = random_band_limited(lat16, 1.0, 5.0, 1.0, 77).map_err(|e| e.to_string())?;
    let cfg = SolverConfig { nu: 0.05, dt: TimeStep::Fixed(1e-3), t_end: 1.0, sample_every: 1, ..Default::default() };
    let tr = integrate(&u, &cfg, &mut []).map_err(|e| e.to_string())?;
    let steps = tr.samples.last().map_or(0, |s| s.step);
    ensure(steps == 1000, || format!("ran {steps} steps"))?;
    let div = tr.samples.iter().map(|s| s.div_max).fold(0.0, f64::max);
    ensure(div <= 1e-10, || format!("divergence defect {div:e}"))?;
    Ok(format!(
        "heat error {heat_err:.1e}; rk4 order {order:.3}; energy residual {:.1e} of |u0|^2; divergence {div:.1e} over 1000 steps",
        worst / e0
    ))
}

fn stable(a: f64, b: f64) -> bool {
    a.is_finite() && b.is_finite() && (a - b).abs() <= 0.05 * a.abs().max(b.abs())
}

fn ac6() -> Outcome {
    let lattice = Lattice::cube(32).unwrap();
    let tg = taylor_green(lattice);
    let mut lines = Vec::new();
    for nu in [0.02, 0.05, 0.1] {
        let mut consts = Vec::new();
        for (dt, every) in [(0.01, 5), (0.005, 10)] {
            let cfg = SolverConfig {
                nu,
                dt: TimeStep::Fixed(dt),
                t_end: 1.0,
                sample_every: every,
                dealias: Dealias::TwoThirds,
                ..Default::default()
            };
            let tr = integrate(&tg, &cfg, &mut []).map_err(|e| e.to_string())?;
            let h = h52_energy_residual(&tr.samples, nu).map_err(|e| e.to_string())?;
            let g = h12_log_growth_check(&tr.samples, 1.0, nu).map_err(|e| e.to_string())?;
            let x = xm1_gronwall_check(&tr.samples).map_err(|e| e.to_string())?;
            ensure(h.holds && g.holds && x.holds, || format!("nu={nu} dt={dt}: a check failed"))?;
            consts.push([h.c_emp, g.constant, x.constant]);
        }
        for (k, name) in ["C_emp", "C0", "C'"].iter().enumerate() {
            let (a, b) = (consts[0][k], consts[1][k]);
            ensure(stable(a, b) || (a == 0.0 && b == 0.0), || format!("nu={nu} {name}: {a} vs {b}"))?;
        }
        lines.push(format!("nu={nu}: C_emp {:.4} C0 {:.4} C' {:.4}", consts[1][0], consts[1][1], consts[1][2]));
    }
    Ok(lines.join("; "))
}

fn unit_sample(t: f64) -> TrajectorySample {
    TrajectorySample {
        t,
        step: 0,
        dt: 0.0,
        norms: NormReport {
            l2: 1.0,
            hdot: [0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5].iter().map(|&s| (s, 1.0)).collect(),
            leilin: [-1.0, 0.0, 1.0].iter().map(|&s| (s, 1.0)).collect(),
        },
        div_max: 0.0,
        extras: vec![],
    }
}

fn ac7() -> Outcome {
    let close = |got: f64, want: f64| (got - want).abs() <= 1e-6 * want.abs().max(1e-300);
    let mut s = unit_sample(0.0);
    s.norms.hdot[4].1 = 2.0;
    let t1 = theorem1_functional(&s, (-1.0f64).exp()).map_err(|e| e.to_string())?.ok_or("undefined")?;
    ensure(close(t1, 2.0 * (-1.0f64).exp()) && (t1 - 0.7358).abs() < 1e-4, || format!("theorem1 {t1}"))?;
    let s = unit_sample(0.0);
    let t2 = theorem2_functional(&s, 0.5, 1.0, 1.0).map_err(|e| e.to_string())?.ok_or("undefined")?;
    ensure(close(t2, 0.5 * 4f64.ln().sqrt()) && (t2 - 0.5887).abs() < 1e-4, || format!("theorem2 {t2}"))?;
    let t3 = theorem3_functional(&s, 1.0, 1.0).map_err(|e| e.to_string())?.ok_or("undefined")?;
    ensure(close(t3, 8f64.ln().sqrt()) && (t3 - 1.4421).abs() < 1e-4, || format!("theorem3 {t3}"))?;
    let cat = rate_catalog(&s, 16.0, &[1.0], 1.0).map_err(|e| e.to_string())?;
    let leray = cat.iter().find(|(n, _)| n == "leray").and_then(|(_, v)| *v).ok_or("no leray entry")?;
    ensure(close(leray, 2.0), || format!("leray {leray}"))?;
    let mut s = unit_sample(0.0);
    s.norms.hdot[2].1 = 3.0;
    let cat = rate_catalog(&s, 0.25, &[], 0.01).map_err(|e| e.to_string())?;
    let strong = cat.iter().find(|(n, _)| n == "strong_h32").and_then(|(_, v)| *v).ok_or("no strong entry")?;
    ensure(close(strong, 15.0), || format!("strong H^3/2 rate {strong}"))?;

    let mut worst = 0.0f64;
    let points = 2000;
    for i in 0..=points {
        let x = 4.0 * (1e8f64 / 4.0).powf(i as f64 / points as f64);
        let y = x * x.ln().sqrt();
        let back = invert_rate(y).map_err(|e| e.to_string())?;
        worst = worst.max((back - x).abs() / x);
    }
    ensure(worst <= 1e-10, || format!("invert_rate round trip {worst:e}"))?;
    Ok(format!(
        "spot values {t1:.4} {t2:.4} {t3:.4} {leray:.4} {strong:.4}; invert_rate round trip {worst:.1e} on [4, 1e8]"
    ))
}

fn files_equal(a: &Path, b: &Path) -> Result<(), String> {
    let (x, y) = (std::fs::read(a).map_err(|e| e.to_string())?, std::fs::read(b).map_err(|e| e.to_string())?);
    ensure(x == y, || format!("{} and {} differ", a.display(), b.display()))
}

fn ac8() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut cfg = RunConfig { out: tmp.path().to_path_buf(), seed: 11, ..RunConfig::default() };
    cfg.lattice.n = 16;
    cfg.corpus.size = 12;
    cfg.solver.t_end = 0.05;
    cfg.solver.sample_every = 5;
    cfg.simulate.initial = InitialCondition::TaylorGreen;
    let mut compared = 0;
    for _ in 0..2 {
        let a = cmd_verify(&cfg, false).map_err(|e| e.to_string())?;
        let b = cmd_verify(&cfg, false).map_err(|e| e.to_string())?;
        ensure(a.exit_code == 0, || "verify failed".into())?;
        ensure(a.run_dir != b.run_dir, || "run directory reused".into())?;
        for (x, y) in a.files.iter().zip(&b.files) {
            files_equal(x, y)?;
            compared += 1;
        }
        let a = cmd_simulate(&cfg).map_err(|e| e.to_string())?;
        let b = cmd_simulate(&cfg).map_err(|e| e.to_string())?;
        for (x, y) in a.files.iter().zip(&b.files) {
            files_equal(x, y)?;
            compared += 1;
        }
        cfg.simulate.initial = InitialCondition::Random;
    }
    Ok(format!("{compared} report files byte-identical across repeated runs"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("AC1", "x0 interpolation on the corpus and single modes", ac1),
        ("AC2", "lattice-exact radius and split bounds, band partition", ac2),
        ("AC3", "continuum constants against radial quadrature", ac3),
        ("AC4", "trilinear cancellation, commutator chain and oracle", ac4),
        ("AC5", "solver validation", ac5),
        ("AC6", "proof inequalities along Taylor-Green trajectories", ac6),
        ("AC7", "monitor arithmetic and rate inversion", ac7),
        ("AC8", "determinism of verify and simulate outputs", ac8),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (id, title, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| id.eq_ignore_ascii_case(f)) {
            continue;
        }
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let elapsed = start.elapsed();
        match result {
            Ok(detail) => println!("{id} PASS {title} [{}] {detail}", secs(elapsed)),
            Err(detail) => {
                failed += 1;
                println!("{id} FAIL {title} [{}] {detail}", secs(elapsed));
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

fn secs(d: Duration) -> String {
    format!("{:.1}s", d.as_secs_f64())
}
