//! Pseudospectral simulator and diagnostic laboratory for BBM-type
//! Boussinesq systems with bore-type (non-decaying) initial data.
//!
//! The crate is organized around:
//! - [`grid`], [`field`], [`multiplier`]: periodic grids, fields with cached
//!   spectra, Fourier-multiplier operators, dealiased products and the
//!   Friedrichs low-pass projector;
//! - [`lp`]: the dyadic partition of unity, Besov norms and the ε-weighted
//!   block energies;
//! - [`bore`]: bore-type initial data, periodization, the low/high frequency
//!   split and 2D composition;
//! - [`linwave`]: the exact linear-wave background and its forcing terms;
//! - [`solver`]: the generalized quasilinear system, RK4 time stepping, the
//!   1D/2D bore pipelines and the explicit bootstrap constants;
//! - [`diag`]: energy ledgers, the modified-energy bracket, blow-up and
//!   buffer-contamination monitors, the differential-inequality audit;
//! - [`io`]: field/ledger serialization, run configs and JSON reports.

pub mod error;
pub mod fft;
pub mod field;
pub mod grid;
pub mod lp;
pub mod multiplier;

pub use error::{CoreError, Result};
pub use field::{Field, State};
pub use grid::GridSpec;

pub mod bore;
pub mod diag;
pub mod io;
pub mod linwave;
pub mod solver;

/// The bootstrap threshold factor 1 + e√7 from the lower-bound argument.
pub fn threshold_factor() -> f64 {
    1.0 + std::f64::consts::E * 7f64.sqrt()
}
