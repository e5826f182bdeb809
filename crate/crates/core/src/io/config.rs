//! Run configuration files. TOML is the primary format, JSON is accepted;
//! the format is chosen by extension, with a content-sniffing fallback.

use crate::error::{CoreError, Result};
use crate::grid::GridSpec;
use crate::solver::{ModelParams, SolverConfig};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    pub grid: GridConfig,
    pub params: ParamsConfig,
    pub init: InitConfig,
    pub solver: SolverSection,
    pub ledger: LedgerConfig,
    #[serde(default)]
    pub threshold: ThresholdConfig,
}

fn default_schema_version() -> u32 {
    1
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridConfig {
    pub dim: usize,
    pub length: Vec<f64>,
    pub points: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ParamsConfig {
    pub b: f64,
    pub d: f64,
    pub eps: f64,
    #[serde(default = "one")]
    pub beta: f64,
    /// require b + d = 1/3 when set
    #[serde(default)]
    pub enforce_bbm_sum: bool,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pipeline {
    #[serde(rename = "direct")]
    Direct,
    #[serde(rename = "bore-1d")]
    Bore1d,
    #[serde(rename = "bore-2d")]
    Bore2d,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InitConfig {
    pub pipeline: Pipeline,
    /// bore profile kind: "tanh" | "smoothed-step" | "gaussian" | "zero"
    pub kind: String,
    #[serde(default)]
    pub eta_minus: f64,
    #[serde(default)]
    pub eta_plus: f64,
    #[serde(default = "one")]
    pub steepness: f64,
    #[serde(default)]
    pub center: f64,
    #[serde(default)]
    pub velocity: Option<VelocityConfig>,
    #[serde(default)]
    pub perturbation: Option<PerturbationConfig>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VelocityConfig {
    pub kind: String,
    #[serde(default)]
    pub eta_minus: f64,
    #[serde(default)]
    pub eta_plus: f64,
    #[serde(default = "one")]
    pub steepness: f64,
    #[serde(default)]
    pub center: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PerturbationConfig {
    pub amplitude: f64,
    pub width: f64,
    #[serde(default)]
    pub center: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolverSection {
    pub dt: f64,
    pub t_end: f64,
    #[serde(default)]
    pub m: Option<f64>,
    #[serde(default = "yes")]
    pub dealias: bool,
    /// checkpoint times; the nearest step state is written in the binary layout
    #[serde(default)]
    pub snapshots: Vec<f64>,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LedgerConfig {
    pub stride: f64,
    pub s: f64,
    pub r: f64,
    #[serde(default = "yes")]
    pub track_blocks: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ThresholdConfig {
    #[serde(default = "yes")]
    pub enabled: bool,
    #[serde(default = "yes")]
    pub halt_on_contamination: bool,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        Self { enabled: true, halt_on_contamination: true }
    }
}

impl RunConfig {
    pub fn from_str_auto(text: &str, hint: Option<&str>) -> Result<Self> {
        let cfg: RunConfig = match hint {
            Some("json") => serde_json::from_str(text)
                .map_err(|e| CoreError::Parse(format!("json config: {e}")))?,
            Some("toml") => {
                toml::from_str(text).map_err(|e| CoreError::Parse(format!("toml config: {e}")))?
            }
            _ => {
                if text.trim_start().starts_with('{') {
                    serde_json::from_str(text)
                        .map_err(|e| CoreError::Parse(format!("json config: {e}")))?
                } else {
                    toml::from_str(text)
                        .map_err(|e| CoreError::Parse(format!("toml config: {e}")))?
                }
            }
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let hint = path.extension().and_then(|e| e.to_str());
        Self::from_str_auto(&text, hint)
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.dim != self.grid.length.len() || self.grid.dim != self.grid.points.len() {
            return Err(CoreError::Config("grid dim does not match length/points arrays".into()));
        }
        if self.init.pipeline == Pipeline::Bore2d && self.grid.dim != 2 {
            return Err(CoreError::Config("bore-2d needs a 2D grid".into()));
        }
        if self.init.pipeline == Pipeline::Bore1d && self.grid.dim != 1 {
            return Err(CoreError::Config("bore-1d needs a 1D grid".into()));
        }
        if !(self.ledger.stride > 0.0) {
            return Err(CoreError::Config("ledger stride must be positive".into()));
        }
        if !(self.ledger.r >= 1.0) {
            return Err(CoreError::Config("ledger r must be >= 1".into()));
        }
        Ok(())
    }

    pub fn grid_spec(&self) -> Result<GridSpec> {
        GridSpec::new(&self.grid.length, &self.grid.points)
    }

    pub fn model_params(&self) -> Result<ModelParams> {
        let p = ModelParams::new(self.params.b, self.params.d, self.params.eps, self.params.beta)?;
        if self.params.enforce_bbm_sum {
            p.with_bbm_sum_rule()
        } else {
            Ok(p)
        }
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            dt: self.solver.dt,
            t_end: self.solver.t_end,
            friedrichs_m: self.solver.m,
            dealias: self.solver.dealias,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOML_EXAMPLE: &str = r#"
[grid]
dim = 1
length = [80.0]
points = [1024]

[params]
b = 0.16666666666666666
d = 0.16666666666666666
eps = 0.1
enforce_bbm_sum = true

[init]
pipeline = "bore-1d"
kind = "tanh"
eta_minus = -0.5
eta_plus = 0.5

[solver]
dt = 0.02
t_end = 2.0

[ledger]
stride = 0.05
s = 2.0
r = 2.0
"#;

    #[test]
    fn toml_parses_and_validates() {
        let cfg = RunConfig::from_str_auto(TOML_EXAMPLE, Some("toml")).unwrap();
        assert_eq!(cfg.schema_version, 1);
        assert_eq!(cfg.init.pipeline, Pipeline::Bore1d);
        assert_eq!(cfg.params.beta, 1.0);
        assert!(cfg.solver.dealias);
        cfg.model_params().unwrap();
        cfg.grid_spec().unwrap();
    }

    #[test]
    fn json_accepted_and_missing_field_named() {
        let cfg = RunConfig::from_str_auto(TOML_EXAMPLE, Some("toml")).unwrap();
        let json = serde_json::to_string(&cfg).unwrap();
        let back = RunConfig::from_str_auto(&json, None).unwrap();
        assert_eq!(back.grid.points, vec![1024]);

        let broken = TOML_EXAMPLE.replace("eps = 0.1", "");
        let err = RunConfig::from_str_auto(&broken, Some("toml")).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("eps"), "diagnostic should name the field: {msg}");
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let broken = TOML_EXAMPLE.replace("length = [80.0]", "length = [80.0, 40.0]");
        assert!(RunConfig::from_str_auto(&broken, Some("toml")).is_err());
    }
}
