//! Spectral functional analysis on the periodic 3D lattice: homogeneous
//! Sobolev and Lei–Lin norms, frequency-split inequality checks, a
//! dealiased pseudo-spectral Navier–Stokes solver, and blow-up functional
//! monitors evaluated along its trajectories.

// `!(a < b)` guards also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::manual_is_multiple_of)]

pub mod band;
pub mod error;
mod fft;
pub mod field;
pub mod generators;
pub mod lab;
pub mod lattice;
pub mod monitor;
pub mod norms;
pub mod products;
pub mod sim;
pub mod snapshot;
pub mod summation;

pub use band::{band_constant, Band, BandConstant};
pub use error::{Error, Result};
pub use field::{leray_project, ScalarSpectralField, Side, SpectralComponents, VelocityField};
pub use generators::{random_band_limited, single_mode, taylor_green};
pub use lattice::Lattice;
pub use norms::{full_report, leilin_norm, sobolev_norm, NormReport, ReportOrders};

pub use num_complex::Complex64;
