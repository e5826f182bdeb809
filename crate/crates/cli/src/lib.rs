//! Library backing the `borewave` binary; commands are callable directly so
//! integration tests can drive them without spawning processes.

pub mod commands;
pub mod svg;
pub mod verify;

pub use commands::{
    cmd_conv_dt, cmd_conv_m, cmd_norms, cmd_run, cmd_sweep_eps, GlobalOpts, NormArgs, RunSummary,
};
