//! Blow-up lower-bound functionals and proof-level inequalities evaluated
//! along solver trajectories.
//!
//! Singular times `t_star` are counterfactual inputs: nothing here tries to
//! locate one. Unspecified constants are either configuration (`c_small`)
//! or reported as the smallest value consistent with the data.

mod checks;
mod functionals;
mod report;

pub use checks::{
    h12_log_growth_check, h52_energy_residual, threshold_crossings, xm1_gronwall_check, Crossing, GrowthReport,
    H52Interval, H52Report,
};
pub use functionals::{
    invert_rate, rate_catalog, theorem1_functional, theorem2_functional, theorem2_squared_functional,
    theorem3_cnu_functional, theorem3_functional,
};
pub use report::{run_monitor, Availability, FunctionalTrace, MonitorConfig, MonitorReport};
