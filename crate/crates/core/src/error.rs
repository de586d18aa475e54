use thiserror::Error;

/// Errors raised by field construction, norms, checks and the solver.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("sample count {got} does not match lattice size {expected}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("field has nonzero mean (|c_0| = {0:e})")]
    NonzeroMean(f64),
    #[error("field is not divergence-free (worst relative defect {0:e})")]
    NotDivergenceFree(f64),
    #[error("fields live on different lattices")]
    LatticeMismatch,
    #[error("no lattice wavenumbers in band [{kmin}, {kmax}]")]
    EmptyBand { kmin: f64, kmax: f64 },
    #[error("invalid band: {0}")]
    InvalidBand(String),
    #[error("divergent continuum integral: {0}")]
    DivergentIntegral(String),
    #[error("input not band-limited for alias-free products: max mode {max_mode} exceeds budget {budget}")]
    AliasingBudget { max_mode: usize, budget: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unknown inequality `{0}`")]
    UnknownInequality(String),
    #[error("time stepping produced non-finite coefficients at t = {t}")]
    SchemeBlowup { t: f64 },
    #[error("snapshot format: {0}")]
    Snapshot(String),
    #[error("trajectory parse error at line {line}: {msg}")]
    TrajectoryParse { line: usize, msg: String },
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
