use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::corpus::Corpus;
use super::interpolation::{check_x0_interpolation, check_x0_via_h12_x1, check_x0_via_xm1_h52};
use super::split::{split_verdict, split_x1, SplitVariant};
use super::trilinear::{check_h32_trilinear, check_trilinear_chain};
use super::ConstantMode;
use crate::error::{Error, Result};
use crate::field::{project_in_place, ScalarSpectralField, VelocityField};
use crate::generators::single_mode;
use crate::lattice::Lattice;
use crate::products::product_budget;

const REGISTERED: [&str; 8] = [
    "x0_interpolation",
    "x0_via_xm1_h52",
    "x0_via_h12_x1",
    "split_x1_l2",
    "split_x1_h12",
    "split_x1_xm1",
    "trilinear_chain",
    "h32_trilinear",
];

pub fn registered_inequalities() -> &'static [&'static str] {
    &REGISTERED
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeOptions {
    pub mode: ConstantMode,
    /// Split radii as fractions of the lattice edge wavenumber.
    pub alpha_fraction: f64,
    pub beta_fraction: f64,
    /// Order used by `trilinear_chain`.
    pub order: f64,
    /// Hill-climbing iterations after the initial scan.
    pub steps: usize,
    pub step_size: f64,
    pub seed: u64,
    /// Include single Fourier modes among the starting candidates.
    pub single_modes: bool,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        Self {
            mode: ConstantMode::Lattice,
            alpha_fraction: 0.125,
            beta_fraction: 0.5,
            order: 1.5,
            steps: 200,
            step_size: 0.3,
            seed: 0,
            single_modes: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProbeResult {
    pub name: String,
    pub best_ratio: f64,
    pub witness_label: String,
    pub witness: VelocityField,
    pub evaluations: usize,
}

struct Evaluator<'a> {
    name: &'a str,
    opts: &'a ProbeOptions,
}

impl Evaluator<'_> {
    fn ratio(&self, u: &VelocityField) -> Result<f64> {
        let mode = self.opts.mode;
        let lat = u.as_array()[0].lattice();
        let split = |variant| {
            let edge = lat.nyquist();
            split_x1(u, self.opts.alpha_fraction * edge, self.opts.beta_fraction * edge, variant, mode)
                .map(|r| split_verdict(&r).ratio)
        };
        match self.name {
            "x0_interpolation" => Ok(check_x0_interpolation(u, mode)?.ratio),
            "x0_via_xm1_h52" => Ok(check_x0_via_xm1_h52(u, mode)?.verdict.ratio),
            "x0_via_h12_x1" => Ok(check_x0_via_h12_x1(u, mode)?.verdict.ratio),
            "split_x1_l2" => split(SplitVariant::L2),
            "split_x1_h12" => split(SplitVariant::H12),
            "split_x1_xm1" => split(SplitVariant::Xm1),
            "trilinear_chain" => Ok(check_trilinear_chain(u, self.opts.order)?.ratio),
            "h32_trilinear" => Ok(check_h32_trilinear(u)?.ratio),
            other => Err(Error::UnknownInequality(other.to_string())),
        }
    }
}

/// Canonical members of conjugate pairs that products can resolve exactly.
fn perturbable_modes(lattice: Lattice) -> Vec<(usize, usize)> {
    let tables = lattice.tables();
    let budget = product_budget(lattice.n());
    (1..lattice.len())
        .filter_map(|i| {
            let j = tables.conj_index[i] as usize;
            (j > i && lattice.max_abs_mode(i) <= budget && !lattice.is_nyquist(i)).then_some((i, j))
        })
        .collect()
}

fn perturb(u: &VelocityField, modes: &[(usize, usize)], step: f64, rng: &mut ChaCha8Rng) -> Result<VelocityField> {
    let lattice = u.as_array()[0].lattice();
    let scale = u.as_array().iter().map(|c| c.max_abs_coeff()).fold(0.0, f64::max).max(1e-300);
    let mut comps: [Vec<Complex64>; 3] = std::array::from_fn(|c| u.as_array()[c].coeffs().to_vec());
    let touches = 1 + rng.random_range(0..3);
    for _ in 0..touches {
        let (i, j) = modes[rng.random_range(0..modes.len())];
        for comp in comps.iter_mut() {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let d = Complex64::new(re, im) * (step * scale);
            comp[i] += d;
            comp[j] = comp[i].conj();
        }
    }
    {
        let [a, b, c] = &mut comps;
        project_in_place(lattice, [a.as_mut_slice(), b.as_mut_slice(), c.as_mut_slice()]);
    }
    let [a, b, c] = comps;
    VelocityField::new([
        ScalarSpectralField::new(lattice, a)?,
        ScalarSpectralField::new(lattice, b)?,
        ScalarSpectralField::new(lattice, c)?,
    ])
}

/// Searches for the field that makes the named inequality tightest.
///
/// Starts from every corpus field (and optionally each single mode inside
/// the product budget), then hill-climbs from the best candidate with
/// random projected perturbations. The search is deterministic in
/// `opts.seed`.
pub fn equality_probe(name: &str, corpus: &Corpus, opts: &ProbeOptions) -> Result<ProbeResult> {
    if !REGISTERED.contains(&name) {
        return Err(Error::UnknownInequality(name.to_string()));
    }
    let eval = Evaluator { name, opts };
    let lattice = corpus.lattice;
    let mut evaluations = 0;
    let mut best: Option<(f64, String, VelocityField)> = None;
    let mut consider = |ratio: Result<f64>, label: String, u: VelocityField, evaluations: &mut usize| {
        *evaluations += 1;
        if let Ok(r) = ratio {
            if r.is_finite() && best.as_ref().is_none_or(|b| r > b.0) {
                best = Some((r, label, u));
            }
        }
    };
    for f in &corpus.fields {
        if let Ok(u) = f.velocity() {
            let r = eval.ratio(&u);
            consider(r, format!("corpus seed={}", f.seed), u, &mut evaluations);
        }
    }
    if opts.single_modes {
        let budget = product_budget(lattice.n()) as i64;
        for m0 in 0..=budget {
            for m1 in -budget..=budget {
                for m2 in -budget..=budget {
                    let m = [m0, m1, m2];
                    if m == [0, 0, 0] || (m0 == 0 && (m1 < 0 || (m1 == 0 && m2 < 0))) {
                        continue;
                    }
                    if let Ok(u) = single_mode(lattice, m, Complex64::new(1.0, 0.0)) {
                        let r = eval.ratio(&u);
                        consider(r, format!("mode {m:?}"), u, &mut evaluations);
                    }
                }
            }
        }
    }
    let (mut best_ratio, mut label, mut witness) =
        best.ok_or_else(|| Error::InvalidArgument("no admissible starting field".into()))?;
    let modes = perturbable_modes(lattice);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut step = opts.step_size;
    let mut misses = 0;
    let mut improved = false;
    for _ in 0..opts.steps {
        if modes.is_empty() {
            break;
        }
        let candidate = perturb(&witness, &modes, step, &mut rng)?;
        evaluations += 1;
        match eval.ratio(&candidate) {
            Ok(r) if r.is_finite() && r > best_ratio => {
                best_ratio = r;
                witness = candidate;
                improved = true;
                misses = 0;
            }
            _ => {
                misses += 1;
                if misses >= 20 {
                    step *= 0.5;
                    misses = 0;
                }
            }
        }
    }
    if improved {
        label = format!("{label} refined");
    }
    Ok(ProbeResult { name: name.to_string(), best_ratio, witness_label: label, witness, evaluations })
}
