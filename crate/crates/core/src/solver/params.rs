use crate::error::{CoreError, Result};
use crate::grid::GridSpec;
use crate::lp::EnergyWeights;
use serde::{Deserialize, Serialize};

/// Model parameters (b, d, ε, β) of one run.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ModelParams {
    pub b: f64,
    pub d: f64,
    pub eps: f64,
    pub beta: f64,
}

impl ModelParams {
    pub fn new(b: f64, d: f64, eps: f64, beta: f64) -> Result<Self> {
        if b < 0.0 || d < 0.0 {
            return Err(CoreError::Domain("b and d must be nonnegative".into()));
        }
        if !(0.0..=1.0).contains(&eps) {
            return Err(CoreError::Domain(format!("eps must lie in [0,1], got {eps}")));
        }
        if !(0.0..=1.0).contains(&beta) {
            return Err(CoreError::Domain(format!("beta must lie in [0,1], got {beta}")));
        }
        Ok(Self { b, d, eps, beta })
    }

    /// Enforce the BBM-case instance of the parameter sum rule, b + d = 1/3.
    pub fn with_bbm_sum_rule(self) -> Result<Self> {
        if (self.b + self.d - 1.0 / 3.0).abs() >= 1e-12 {
            return Err(CoreError::Domain(format!(
                "sum rule requires b + d = 1/3, got {}",
                self.b + self.d
            )));
        }
        Ok(self)
    }

    pub fn weights(&self, s: f64) -> EnergyWeights {
        EnergyWeights { b: self.b, d: self.d, eps: self.eps, s }
    }
}

/// Time-stepping configuration.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Friedrichs cutoff; `None` leaves the projector as the identity.
    pub friedrichs_m: Option<f64>,
    pub dealias: bool,
}

impl SolverConfig {
    pub fn new(dt: f64, t_end: f64) -> Self {
        Self { dt, t_end, friedrichs_m: None, dealias: true }
    }

    pub fn with_friedrichs(mut self, m: f64) -> Self {
        self.friedrichs_m = Some(m);
        self
    }

    pub fn validate(&self, grid: &GridSpec, params: &ModelParams) -> Result<()> {
        if !(self.dt > 0.0) {
            return Err(CoreError::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= 0.0) {
            return Err(CoreError::Config(format!("t_end must be nonnegative, got {}", self.t_end)));
        }
        if let Some(m) = self.friedrichs_m {
            if !(m > 0.0) {
                return Err(CoreError::Config(format!("friedrichs cutoff must be positive, got {m}")));
            }
        }
        // without dispersive regularization the advective CFL cap is enforced
        if params.eps * params.b == 0.0 || params.eps * params.d == 0.0 {
            let cap = 0.5 * grid.min_spacing();
            if self.dt > cap {
                return Err(CoreError::Config(format!(
                    "dt = {} exceeds the advective CFL cap 0.5·h = {cap} required when b, d or eps vanish",
                    self.dt
                )));
            }
        }
        Ok(())
    }
}
