//! Pseudo-spectral solver for the unforced incompressible Navier–Stokes
//! equations on the periodic lattice, and the trajectory files it writes.

mod config;
mod solver;
mod trajectory;

pub use config::{Integrator, NonlinearForm, SolverConfig, TimeStep, RK4_DIFFUSIVE_LIMIT};
pub use solver::{max_speed, nonlinear_term, Solver, SolverState};
pub use trajectory::{
    energy_balance_residual, integrate, integrate_with_state, IntervalResidual, RunStatus, SampleHook,
    Trajectory, TrajectoryHeader, TrajectorySample, CODE_VERSION,
};
