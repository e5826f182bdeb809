//! Self-describing JSON records emitted by runs and norm computations.

use crate::solver::Termination;
use serde::{Deserialize, Serialize};

/// One norm computation: {quantity, s, p, r, eps, b, d, value, tail_estimate}.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormReport {
    pub quantity: String,
    pub s: f64,
    pub p: String,
    pub r: f64,
    pub eps: f64,
    pub b: f64,
    pub d: f64,
    pub value: f64,
    pub tail_estimate: f64,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct FittedConstants {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c1_embedding: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c2_split: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_final1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_dteta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_forcing: Option<f64>,
}

/// One record per run; self-describing via `schema_version`.
#[derive(Clone, Debug, Serialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub artifact_version: String,
    pub config: serde_json::Value,
    pub wall_seconds: f64,
    pub termination: Termination,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_star: Option<f64>,
    pub threshold: f64,
    pub r0_eps: f64,
    /// max U_s over the run divided by the threshold
    pub margin: f64,
    pub final_t: f64,
    pub final_u_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_e_norm: Option<f64>,
    pub max_buffer_leak: f64,
    pub fitted: FittedConstants,
    /// explicit bootstrap constants from measured quantities, when the run
    /// has nonzero data (eps0, Ctilde and the predicted horizon Ctilde/eps)
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bootstrap: Option<serde_json::Value>,
    /// universal constants used for theorem-driven thresholds (user-supplied
    /// or defaulted to 1; the theory gives no numeric values)
    pub constants_note: String,
}

impl RunRecord {
    pub fn constants_note_default() -> String {
        "thresholds use user-supplied/fitted constants (C, C1 default 1); the theory fixes none"
            .to_string()
    }
}
