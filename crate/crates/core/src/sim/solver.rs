use num_complex::Complex64;
use rayon::prelude::*;

use super::config::{max_k2, Integrator, NonlinearForm, SolverConfig, TimeStep, RK4_DIFFUSIVE_LIMIT};
use crate::error::{Error, Result};
use crate::fft::Fft3;
use crate::field::{project_in_place, ScalarSpectralField, VelocityField};
use crate::lattice::Lattice;
use crate::products::{
    advect, divergence_of_outer, embed, mask_cube, padded_lattice, restrict, two_thirds_cutoff, Dealias,
};

type Spectrum = [Vec<Complex64>; 3];

fn refs(v: &Spectrum) -> [&[Complex64]; 3] {
    [&v[0], &v[1], &v[2]]
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub t: f64,
    pub step: usize,
    pub u: VelocityField,
}

impl SolverState {
    pub fn new(u: VelocityField) -> Self {
        Self { t: 0.0, step: 0, u }
    }
}

/// `−P[u·∇u]` for a solenoidal `u`, dealiased with the given rule.
pub fn nonlinear_term(u: &VelocityField, dealias: Dealias, form: NonlinearForm) -> VelocityField {
    let lattice = u.as_array()[0].lattice();
    let spec: Spectrum = std::array::from_fn(|i| u.component(i).coeffs().to_vec());
    let out = nonlinear(lattice, &spec, dealias, form);
    VelocityField::new_unchecked(out.map(|c| ScalarSpectralField::from_raw(lattice, c)))
}

fn nonlinear(lattice: Lattice, u: &Spectrum, dealias: Dealias, form: NonlinearForm) -> Spectrum {
    let product = |grid: Lattice, v: &Spectrum| match form {
        NonlinearForm::Divergence => divergence_of_outer(grid, refs(v)),
        NonlinearForm::Convective => advect(grid, refs(v), refs(v)),
    };
    let mut out = match dealias {
        Dealias::ThreeHalves => {
            let big = padded_lattice(lattice);
            let up: Spectrum = std::array::from_fn(|i| embed(lattice, &u[i], big));
            let p = product(big, &up);
            let mut out: Spectrum = std::array::from_fn(|i| restrict(big, &p[i], lattice));
            // Nyquist planes have no conjugate partner on the base lattice.
            let nyquist = nyquist_indices(lattice);
            for c in out.iter_mut() {
                nyquist.iter().for_each(|&i| c[i] = Complex64::default());
            }
            out
        }
        Dealias::TwoThirds => {
            let cutoff = two_thirds_cutoff(lattice.n());
            let mut v = u.clone();
            v.iter_mut().for_each(|c| mask_cube(lattice, c, cutoff));
            let mut out = product(lattice, &v);
            out.iter_mut().for_each(|c| mask_cube(lattice, c, cutoff));
            out
        }
    };
    for c in out.iter_mut() {
        c.iter_mut().for_each(|z| *z = -*z);
    }
    {
        let [a, b, c] = &mut out;
        project_in_place(lattice, [a.as_mut_slice(), b.as_mut_slice(), c.as_mut_slice()]);
    }
    out
}

fn nyquist_indices(lattice: Lattice) -> Vec<usize> {
    let n = lattice.n();
    let h = n / 2;
    (0..lattice.len()).filter(|i| i / (n * n) == h || (i / n) % n == h || i % n == h).collect()
}

/// Pseudo-spectral Navier–Stokes stepper for one lattice and configuration.
#[derive(Debug, Clone)]
pub struct Solver {
    lattice: Lattice,
    config: SolverConfig,
    k2: Vec<f64>,
}

impl Solver {
    pub fn new(lattice: Lattice, config: SolverConfig) -> Result<Self> {
        config.validate(lattice)?;
        let tables = lattice.tables();
        let k2 = tables.kmag.iter().map(|k| k * k).collect();
        Ok(Self { lattice, config, k2 })
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    fn advection(&self, u: &Spectrum) -> Spectrum {
        if self.config.nonlinear {
            nonlinear(self.lattice, u, self.config.dealias, self.config.form)
        } else {
            std::array::from_fn(|_| vec![Complex64::default(); self.lattice.len()])
        }
    }

    /// Full right side `νΔu − P[u·∇u]`.
    fn rhs(&self, u: &Spectrum) -> Spectrum {
        let mut out = self.advection(u);
        let nu = self.config.nu;
        for (o, c) in out.iter_mut().zip(u) {
            o.par_iter_mut().zip(c).zip(&self.k2).for_each(|((o, c), k2)| *o -= c * (nu * k2));
        }
        out
    }

    /// Step size the configuration asks for at this state, before clipping
    /// to `t_end`.
    pub fn preferred_dt(&self, state: &SolverState) -> f64 {
        match self.config.dt {
            TimeStep::Fixed(dt) => dt,
            TimeStep::Auto => {
                let mut dt = f64::INFINITY;
                if self.config.nonlinear {
                    let umax = max_speed(&state.u);
                    if umax > 0.0 {
                        dt = self.config.cfl * self.lattice.grid_spacing() / umax;
                    }
                }
                if self.config.integrator == Integrator::Rk4 {
                    dt = dt.min(0.9 * RK4_DIFFUSIVE_LIMIT / (self.config.nu * max_k2(self.lattice)));
                }
                dt
            }
        }
    }

    /// Advance by `dt`. NaN or infinite coefficients end in
    /// [`Error::SchemeBlowup`].
    pub fn step(&self, state: &SolverState, dt: f64) -> Result<SolverState> {
        let u: Spectrum = std::array::from_fn(|i| state.u.component(i).coeffs().to_vec());
        let mut next = match self.config.integrator {
            Integrator::Rk4 => self.rk4(&u, dt),
            Integrator::Imex => self.integrating_factor(&u, dt),
        };
        for c in next.iter_mut() {
            c[0] = Complex64::default();
        }
        {
            let [a, b, c] = &mut next;
            project_in_place(self.lattice, [a.as_mut_slice(), b.as_mut_slice(), c.as_mut_slice()]);
        }
        let t = state.t + dt;
        if next.iter().flatten().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::SchemeBlowup { t });
        }
        let u = VelocityField::new_unchecked(next.map(|c| ScalarSpectralField::from_raw(self.lattice, c)));
        Ok(SolverState { t, step: state.step + 1, u })
    }

    fn rk4(&self, u: &Spectrum, dt: f64) -> Spectrum {
        let k1 = self.rhs(u);
        let k2 = self.rhs(&lincomb(u, &[(0.5 * dt, &k1)]));
        let k3 = self.rhs(&lincomb(u, &[(0.5 * dt, &k2)]));
        let k4 = self.rhs(&lincomb(u, &[(dt, &k3)]));
        lincomb(u, &[(dt / 6.0, &k1), (dt / 3.0, &k2), (dt / 3.0, &k3), (dt / 6.0, &k4)])
    }

    fn integrating_factor(&self, u: &Spectrum, dt: f64) -> Spectrum {
        let e: Vec<f64> = self.k2.iter().map(|k2| (-self.config.nu * k2 * 0.5 * dt).exp()).collect();
        let scale = |v: &Spectrum, times: i32| -> Spectrum {
            std::array::from_fn(|i| v[i].iter().zip(&e).map(|(c, e)| c * e.powi(times)).collect())
        };
        let eu = scale(u, 1);
        let e2u = scale(u, 2);
        let a = self.advection(u);
        let b = self.advection(&scale(&lincomb(u, &[(0.5 * dt, &a)]), 1));
        let c = self.advection(&lincomb(&eu, &[(0.5 * dt, &b)]));
        let d = self.advection(&lincomb(&e2u, &[(dt, &scale(&c, 1))]));
        let bc = lincomb(&b, &[(1.0, &c)]);
        lincomb(&e2u, &[(dt / 6.0, &scale(&a, 2)), (dt / 3.0, &scale(&bc, 1)), (dt / 6.0, &d)])
    }
}

fn lincomb(base: &Spectrum, terms: &[(f64, &Spectrum)]) -> Spectrum {
    std::array::from_fn(|i| {
        let mut out = base[i].clone();
        for (w, t) in terms {
            out.par_iter_mut().zip(&t[i]).for_each(|(o, x)| *o += x * w);
        }
        out
    })
}

/// Largest pointwise speed on the native grid.
pub fn max_speed(u: &VelocityField) -> f64 {
    let n = u.as_array()[0].lattice().n();
    let fft = Fft3::get(n);
    let grids: Vec<Vec<Complex64>> = (0..3)
        .into_par_iter()
        .map(|i| {
            let mut d = u.component(i).coeffs().to_vec();
            fft.inverse(&mut d);
            d
        })
        .collect();
    (0..grids[0].len())
        .map(|p| (grids[0][p].re.powi(2) + grids[1][p].re.powi(2) + grids[2][p].re.powi(2)).sqrt())
        .fold(0.0, f64::max)
}
