//! Serialization: field CSV/binary layouts, run configuration files
//! (TOML/JSON) and JSON report records.

mod config;
mod fieldio;
mod report;

pub use config::{
    GridConfig, InitConfig, LedgerConfig, ParamsConfig, PerturbationConfig, Pipeline, RunConfig,
    SolverSection, ThresholdConfig, VelocityConfig,
};
pub use fieldio::{read_field_binary, read_field_csv, write_field_binary, write_field_csv};
pub use report::{FittedConstants, NormReport, RunRecord};
