//! The generalized weakly dispersive quasilinear system
//!
//!   (I − εbΔ)∂ₜη + div V + ε div(ηW₁ + hV + βηV) = εf,
//!   (I − εdΔ)∂ₜV + ∇η + ε(W₂ + βV)·∇V + εV·∇W₃ = εg,
//!
//! its projected right-hand side (the Friedrichs scheme), RK4 time stepping,
//! the 1D/2D bore pipelines and the explicit bootstrap constants.

mod bootstrap;
mod coeffs;
mod params;
mod pipeline;
mod rhs;
mod stepper;

pub use bootstrap::{t_star_measure, BootstrapConstants, BootstrapInputs, TStarResult};
pub use coeffs::{
    AnalyticCoeffs, BackgroundCoeffs, CoeffFields, CoeffSource, FrameCoeffs, Rule, ZeroCoeffs,
};
pub use params::{ModelParams, SolverConfig};
pub use pipeline::{
    fit_dteta_constant, solve_1d_bore, solve_2d_bore, solve_2d_direct, solve_direct, BoreRun1D,
    BoreRun2D, PipelineOptions,
};
pub use rhs::RhsCtx;
pub use stepper::{BufferGuard, RunOutcome, RunSetup, SampleHook, Solver, Termination};
