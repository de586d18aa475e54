use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::products::Dealias;

/// Largest `dt·ν·|k|²` for which classical RK4 is stable on the heat part.
pub const RK4_DIFFUSIVE_LIMIT: f64 = 2.78;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TimeStepRepr", into = "TimeStepRepr")]
pub enum TimeStep {
    Fixed(f64),
    /// Chosen each step from the CFL number (and the diffusive limit for rk4).
    Auto,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum TimeStepRepr {
    Number(f64),
    Text(String),
}

impl TryFrom<TimeStepRepr> for TimeStep {
    type Error = Error;
    fn try_from(r: TimeStepRepr) -> Result<Self> {
        match r {
            TimeStepRepr::Number(x) => Ok(TimeStep::Fixed(x)),
            TimeStepRepr::Text(s) => s.parse(),
        }
    }
}

impl From<TimeStep> for TimeStepRepr {
    fn from(t: TimeStep) -> Self {
        match t {
            TimeStep::Fixed(x) => TimeStepRepr::Number(x),
            TimeStep::Auto => TimeStepRepr::Text("auto".into()),
        }
    }
}

impl std::str::FromStr for TimeStep {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(TimeStep::Auto);
        }
        s.parse::<f64>()
            .map(TimeStep::Fixed)
            .map_err(|_| Error::InvalidArgument(format!("time step must be a number or `auto`, got `{s}`")))
    }
}

impl std::fmt::Display for TimeStep {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TimeStep::Fixed(x) => write!(f, "{x}"),
            TimeStep::Auto => f.write_str("auto"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Integrator {
    /// Classical fourth-order Runge–Kutta, diffusion treated explicitly.
    Rk4,
    /// Integrating-factor RK4: diffusion exact, advection explicit.
    Imex,
}

impl std::str::FromStr for Integrator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rk4" => Ok(Integrator::Rk4),
            "imex" => Ok(Integrator::Imex),
            other => Err(Error::InvalidArgument(format!("unknown integrator `{other}`"))),
        }
    }
}

impl std::fmt::Display for Integrator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Integrator::Rk4 => "rk4",
            Integrator::Imex => "imex",
        })
    }
}

/// How `u·∇u` is formed on the grid. Both agree for solenoidal fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NonlinearForm {
    /// `div(u ⊗ u)`: six products.
    Divergence,
    /// `(u·∇)u`: nine products.
    Convective,
}

impl std::str::FromStr for NonlinearForm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "divergence" => Ok(NonlinearForm::Divergence),
            "convective" => Ok(NonlinearForm::Convective),
            other => Err(Error::InvalidArgument(format!("unknown nonlinear form `{other}`"))),
        }
    }
}

impl std::fmt::Display for NonlinearForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            NonlinearForm::Divergence => "divergence",
            NonlinearForm::Convective => "convective",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub nu: f64,
    pub dt: TimeStep,
    pub t_end: f64,
    pub dealias: Dealias,
    pub integrator: Integrator,
    pub sample_every: usize,
    pub cfl: f64,
    /// Switch off advection to get the pure heat flow.
    pub nonlinear: bool,
    pub form: NonlinearForm,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            nu: 0.1,
            dt: TimeStep::Fixed(1e-3),
            t_end: 1.0,
            dealias: Dealias::ThreeHalves,
            integrator: Integrator::Rk4,
            sample_every: 10,
            cfl: 0.4,
            nonlinear: true,
            form: NonlinearForm::Divergence,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self, lattice: Lattice) -> Result<()> {
        if !(self.nu.is_finite() && self.nu > 0.0) {
            return Err(Error::InvalidArgument(format!("viscosity must be positive, got {}", self.nu)));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(Error::InvalidArgument(format!("t_end must be >= 0, got {}", self.t_end)));
        }
        if self.sample_every == 0 {
            return Err(Error::InvalidArgument("sample_every must be >= 1".into()));
        }
        if !(self.cfl.is_finite() && self.cfl > 0.0) {
            return Err(Error::InvalidArgument(format!("cfl must be positive, got {}", self.cfl)));
        }
        if let TimeStep::Fixed(dt) = self.dt {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
            }
            if self.integrator == Integrator::Rk4 {
                let stiffness = dt * self.nu * max_k2(lattice);
                if stiffness > RK4_DIFFUSIVE_LIMIT {
                    return Err(Error::InvalidArgument(format!(
                        "dt·ν·k_max² = {stiffness:.3} exceeds the rk4 limit {RK4_DIFFUSIVE_LIMIT}; use a smaller dt or imex"
                    )));
                }
            }
        }
        Ok(())
    }

    /// `key=value` pairs echoed into output headers.
    pub fn echo(&self) -> Vec<(String, String)> {
        vec![
            ("nu".into(), self.nu.to_string()),
            ("dt".into(), self.dt.to_string()),
            ("t_end".into(), self.t_end.to_string()),
            ("dealias".into(), self.dealias.to_string()),
            ("integrator".into(), self.integrator.to_string()),
            ("sample_every".into(), self.sample_every.to_string()),
            ("cfl".into(), self.cfl.to_string()),
            ("nonlinear".into(), self.nonlinear.to_string()),
            ("form".into(), self.form.to_string()),
        ]
    }
}

pub(crate) fn max_k2(lattice: Lattice) -> f64 {
    let k = lattice.nyquist();
    3.0 * k * k
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn time_step_serde() {
        let t: TimeStep = serde_json::from_str("\"auto\"").unwrap();
        assert_eq!(t, TimeStep::Auto);
        let t: TimeStep = serde_json::from_str("0.01").unwrap();
        assert_eq!(t, TimeStep::Fixed(0.01));
        assert!(serde_json::from_str::<TimeStep>("\"fast\"").is_err());
        assert_eq!(serde_json::to_string(&TimeStep::Auto).unwrap(), "\"auto\"");
    }

    #[test]
    fn validation() {
        let lat = Lattice::cube(32).unwrap();
        assert!(SolverConfig::default().validate(lat).is_ok());
        let bad = SolverConfig { nu: 0.0, ..Default::default() };
        assert!(bad.validate(lat).is_err());
        let bad = SolverConfig { nu: -1.0, ..Default::default() };
        assert!(bad.validate(lat).is_err());
        let stiff = SolverConfig { nu: 1.0, dt: TimeStep::Fixed(0.1), ..Default::default() };
        assert!(stiff.validate(lat).is_err());
        let imex = SolverConfig { integrator: Integrator::Imex, ..stiff };
        assert!(imex.validate(lat).is_ok());
    }
}
