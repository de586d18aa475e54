//! Command-line driver: corpus verification, simulation, trajectory
//! monitoring and band-constant tables.
//!
//! Every command reads a [`RunConfig`] (TOML file plus flag overrides),
//! writes its reports into a fresh numbered directory under `--out`, and
//! maps its result onto the exit codes in [`error`].

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use blowlab_core::lab::ConstantMode;
use blowlab_core::products::Dealias;
use blowlab_core::sim::{Integrator, TimeStep};
use clap::{Args, Parser, Subcommand};

pub use commands::{cmd_constants, cmd_monitor, cmd_simulate, cmd_verify, Outcome};
pub use config::{ConstantRequest, InitialCondition, RunConfig};
pub use error::{CliError, CliResult, EXIT_CHECK_FAILED, EXIT_IO, EXIT_OK, EXIT_USAGE};

#[derive(Debug, Parser)]
#[command(name = "blowlab", version, about = "Spectral inequality checks and Navier-Stokes blow-up monitors")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Root directory for numbered run directories.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub lattice_n: Option<usize>,
    /// lattice, continuum or empirical.
    #[arg(long, global = true)]
    pub constant_mode: Option<ConstantMode>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the inequality suite over a random corpus.
    Verify(VerifyArgs),
    /// Integrate Navier-Stokes and write a trajectory.
    Simulate(SimulateArgs),
    /// Evaluate blow-up functionals on a trajectory file.
    Monitor(MonitorArgs),
    /// Tabulate lattice and continuum band constants.
    Constants(ConstantsArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub corpus_size: Option<usize>,
    /// Append a field with nonzero mean to exercise failure reporting.
    #[arg(long, hide = true)]
    pub inject_mean_violation: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub nu: Option<f64>,
    /// Fixed step or `auto`.
    #[arg(long)]
    pub dt: Option<TimeStep>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long, value_enum)]
    pub initial: Option<InitialCondition>,
    /// 23 or 32.
    #[arg(long)]
    pub dealias: Option<Dealias>,
    /// rk4 or imex.
    #[arg(long)]
    pub integrator: Option<Integrator>,
    #[arg(long)]
    pub sample_every: Option<usize>,
}

#[derive(Debug, Args)]
pub struct MonitorArgs {
    /// Trajectory file (`.csv` or `.json`).
    pub trajectory: PathBuf,
    /// Comma-separated candidate singular times.
    #[arg(long, value_delimiter = ',')]
    pub t_star: Vec<f64>,
    #[arg(long)]
    pub c_small: Option<f64>,
    /// Viscosity, if the trajectory header lacks it.
    #[arg(long)]
    pub nu: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ConstantsArgs {
    /// Weight exponent; replaces the configured request list.
    #[arg(long, allow_negative_numbers = true, requires = "alpha")]
    pub a: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
}

/// Effective configuration: file (if any), then flags.
pub fn resolve_config(cli: &Cli) -> CliResult<RunConfig> {
    let mut cfg = match &cli.common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let c = &cli.common;
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(o) = &c.out {
        cfg.out = o.clone();
    }
    if let Some(n) = c.lattice_n {
        cfg.lattice.n = n;
    }
    if let Some(m) = c.constant_mode {
        cfg.constant_mode = m;
    }
    match &cli.command {
        Command::Verify(a) => {
            if let Some(size) = a.corpus_size {
                cfg.corpus.size = size;
            }
        }
        Command::Simulate(a) => {
            let s = &mut cfg.solver;
            if let Some(v) = a.nu {
                s.nu = v;
            }
            if let Some(v) = a.dt {
                s.dt = v;
            }
            if let Some(v) = a.t_end {
                s.t_end = v;
            }
            if let Some(v) = a.dealias {
                s.dealias = v;
            }
            if let Some(v) = a.integrator {
                s.integrator = v;
            }
            if let Some(v) = a.sample_every {
                s.sample_every = v;
            }
            if let Some(v) = a.initial {
                cfg.simulate.initial = v;
            }
        }
        Command::Monitor(a) => {
            if !a.t_star.is_empty() {
                cfg.monitor.t_star = a.t_star.clone();
            }
            if let Some(v) = a.c_small {
                cfg.monitor.c_small = v;
            }
            if let Some(v) = a.nu {
                cfg.monitor.nu = Some(v);
            }
        }
        Command::Constants(a) => {
            if let (Some(exp), Some(alpha)) = (a.a, a.alpha) {
                cfg.constants.requests = vec![ConstantRequest { a: exp, alpha, beta: a.beta }];
            }
        }
    }
    Ok(cfg)
}

pub fn execute(cli: &Cli) -> CliResult<Outcome> {
    let cfg = resolve_config(cli)?;
    match &cli.command {
        Command::Verify(a) => cmd_verify(&cfg, a.inject_mean_violation),
        Command::Simulate(_) => cmd_simulate(&cfg),
        Command::Monitor(a) => cmd_monitor(&cfg, &a.trajectory),
        Command::Constants(_) => cmd_constants(&cfg),
    }
}

/// Parses arguments, runs, reports, and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            print!("{}", outcome.summary);
            println!("wrote {}", outcome.run_dir.display());
            outcome.exit_code
        }
        Err(e) => {
            eprintln!("blowlab: {e}");
            e.exit_code()
        }
    }
}
