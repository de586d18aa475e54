use std::path::{Path, PathBuf};

use blowlab_core::lab::{ConstantMode, CorpusConfig, SuiteConfig};
use blowlab_core::monitor::MonitorConfig;
use blowlab_core::sim::SolverConfig;
use blowlab_core::Lattice;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatticeSection {
    pub n: usize,
    pub period: f64,
}

impl Default for LatticeSection {
    fn default() -> Self {
        Self { n: 32, period: 2.0 * std::f64::consts::PI }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusSection {
    pub size: usize,
    /// Band edges in units of the fundamental wavenumber.
    pub kmin: f64,
    pub kmax: Option<f64>,
    pub decays: Vec<f64>,
}

impl Default for CorpusSection {
    fn default() -> Self {
        Self { size: 100, kmin: 1.0, kmax: None, decays: vec![1.0, 2.0, 3.0] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum InitialCondition {
    TaylorGreen,
    Random,
}

impl InitialCondition {
    pub fn label(self) -> &'static str {
        match self {
            InitialCondition::TaylorGreen => "taylor-green",
            InitialCondition::Random => "random",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateSection {
    pub initial: InitialCondition,
    /// Band of the random initial field, in units of the fundamental wavenumber.
    pub kmin: f64,
    pub kmax: f64,
    pub decay: f64,
    /// Scale applied to the initial field.
    pub amplitude: f64,
    /// Times at which field snapshots are written (first sample at or after each).
    pub snapshots: Vec<f64>,
}

impl Default for SimulateSection {
    fn default() -> Self {
        Self { initial: InitialCondition::TaylorGreen, kmin: 1.0, kmax: 4.0, decay: 1.0, amplitude: 1.0, snapshots: vec![] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MonitorSection {
    pub c_small: f64,
    pub t_star: Vec<f64>,
    pub s_list: Vec<f64>,
    /// Viscosity; read from the trajectory header when absent.
    pub nu: Option<f64>,
}

impl Default for MonitorSection {
    fn default() -> Self {
        let m = MonitorConfig::default();
        Self { c_small: m.c_small, t_star: m.t_star, s_list: m.s_list, nu: None }
    }
}

impl MonitorSection {
    pub fn monitor_config(&self) -> MonitorConfig {
        MonitorConfig { c_small: self.c_small, t_star: self.t_star.clone(), s_list: self.s_list.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantRequest {
    /// Weight exponent in `|ξ|^{2a}`.
    pub a: f64,
    pub alpha: f64,
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstantsSection {
    pub requests: Vec<ConstantRequest>,
}

impl Default for ConstantsSection {
    fn default() -> Self {
        let r = |a, alpha, beta| ConstantRequest { a, alpha, beta };
        Self {
            requests: vec![
                r(-1.5, 2.0, Some(8.0)),
                r(1.0, 0.5, None),
                r(1.0, 4.0, None),
                r(1.0, 8.0, None),
                r(-0.5, 4.0, None),
                r(-2.5, 4.0, None),
            ],
        }
    }
}

/// Everything a run depends on. Two runs with equal configs and the same
/// code version write identical reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub constant_mode: ConstantMode,
    pub out: PathBuf,
    pub lattice: LatticeSection,
    pub corpus: CorpusSection,
    pub suite: SuiteConfig,
    pub solver: SolverConfig,
    pub simulate: SimulateSection,
    pub monitor: MonitorSection,
    pub constants: ConstantsSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            constant_mode: ConstantMode::Lattice,
            out: PathBuf::from("out"),
            lattice: LatticeSection::default(),
            corpus: CorpusSection::default(),
            suite: SuiteConfig::default(),
            solver: SolverConfig::default(),
            simulate: SimulateSection::default(),
            monitor: MonitorSection::default(),
            constants: ConstantsSection::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn lattice(&self) -> CliResult<Lattice> {
        Ok(Lattice::new(self.lattice.n, self.lattice.period)?)
    }

    pub fn corpus_config(&self) -> CliResult<CorpusConfig> {
        let lattice = self.lattice()?;
        Ok(CorpusConfig {
            n: self.lattice.n,
            period: self.lattice.period,
            size: self.corpus.size,
            kmin: self.corpus.kmin,
            kmax: self.corpus.kmax.map(|k| k * lattice.k_unit()),
            decays: self.corpus.decays.clone(),
            base_seed: self.seed,
        })
    }

    pub fn suite_config(&self) -> SuiteConfig {
        SuiteConfig { mode: self.constant_mode, ..self.suite.clone() }
    }

    /// Flattened `section.key=value` pairs of the effective configuration,
    /// without the output directory.
    pub fn echo(&self) -> Vec<(String, String)> {
        let mut value = serde_json::to_value(self).expect("config serializes");
        if let Some(map) = value.as_object_mut() {
            map.remove("out");
        }
        let mut out = Vec::new();
        flatten("", &value, &mut out);
        out
    }
}

fn flatten(prefix: &str, value: &serde_json::Value, out: &mut Vec<(String, String)>) {
    match value {
        serde_json::Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, out);
            }
        }
        serde_json::Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}
