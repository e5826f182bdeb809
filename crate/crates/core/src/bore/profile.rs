//! Bore profiles and their grid-periodic realization.
//!
//! A bore has distinct limits η₋, η₊ at x → ∓∞, so it cannot live on a torus
//! as is. The net jump is undone by a smooth compensating anti-transition
//! confined to a declared buffer near the periodic seam; the monitored buffer
//! zone is seam-centered with total width 20% of the domain, the ramp itself
//! occupies its right half.

use crate::error::{CoreError, Result};
use crate::field::Field;
use crate::grid::GridSpec;
use crate::lp::smooth_step;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileKind {
    Tanh,
    SmoothedStep,
    CustomSamples(Vec<f64>),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoreProfile {
    pub kind: ProfileKind,
    pub eta_minus: f64,
    pub eta_plus: f64,
    /// transition steepness; for `SmoothedStep` the Gaussian width is 1/steepness
    pub steepness: f64,
    pub center: f64,
}

impl BoreProfile {
    pub fn tanh(eta_minus: f64, eta_plus: f64, steepness: f64, center: f64) -> Self {
        Self { kind: ProfileKind::Tanh, eta_minus, eta_plus, steepness, center }
    }

    pub fn constant(c: f64) -> Self {
        Self::tanh(c, c, 1.0, 0.0)
    }

    pub fn jump(&self) -> f64 {
        self.eta_plus - self.eta_minus
    }

    pub fn mean_level(&self) -> f64 {
        0.5 * (self.eta_plus + self.eta_minus)
    }

    pub fn amplitude(&self) -> f64 {
        0.5 * self.jump()
    }

    /// Pointwise evaluation of the pure (non-periodized) profile on the line.
    pub fn eval(&self, x: f64) -> f64 {
        match &self.kind {
            ProfileKind::Tanh => {
                self.mean_level() + self.amplitude() * (self.steepness * (x - self.center)).tanh()
            }
            ProfileKind::SmoothedStep => {
                // Gaussian-smoothed step: erf((x-c)·σ/√2) has transform
                // 2 e^{-k²/(2σ²)}/(ik) — the closed form the split relies on.
                let z = self.steepness * (x - self.center) / std::f64::consts::SQRT_2;
                self.mean_level() + self.amplitude() * erf(z)
            }
            ProfileKind::CustomSamples(_) => f64::NAN,
        }
    }
}

/// Seam-centered monitored zone; the set of x with distance to ±L/2 below
/// `width/2` (on the torus).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BufferZone {
    pub width: f64,
}

impl BufferZone {
    pub fn contains(&self, x: f64, length: f64) -> bool {
        let dist_to_seam = (length / 2.0 - x.abs()).abs();
        dist_to_seam <= self.width / 2.0
    }

    /// Node mask along axis 0 of `grid` (1D) — true for buffer nodes.
    pub fn mask(&self, grid: &GridSpec) -> Vec<bool> {
        let l = grid.lengths()[0];
        (0..grid.points()[0]).map(|i| self.contains(grid.coord(0, i), l)).collect()
    }
}

/// A periodized bore together with its construction record: the ramp part
/// (for contamination accounting) and the originating profile when analytic.
#[derive(Clone, Debug)]
pub struct BoreField {
    pub field: Field,
    pub buffer: BufferZone,
    pub ramp: Field,
    pub profile: Option<BoreProfile>,
}

fn erf(x: f64) -> f64 {
    // Abramowitz-Stegun 7.1.26-style rational approximation is not accurate
    // enough for the split oracles; integrate the series/continued fraction
    // via the complementary error function with double-precision constants.
    // For |x| <= 6 use the Taylor/asymptotic split.
    if x < 0.0 {
        return -erf(-x);
    }
    if x > 6.0 {
        return 1.0;
    }
    // series: erf(x) = 2/√π Σ (-1)^n x^{2n+1}/(n!(2n+1)) converges fast for
    // small x; the Laplace continued fraction takes over beyond 2.5.
    if x < 2.5 {
        let mut term = x;
        let mut sum = x;
        let x2 = x * x;
        let mut n = 0usize;
        loop {
            n += 1;
            term *= -x2 / n as f64;
            let add = term / (2 * n + 1) as f64;
            sum += add;
            if add.abs() < 1e-18 * sum.abs().max(1e-18) {
                break;
            }
        }
        (2.0 / std::f64::consts::PI.sqrt()) * sum
    } else {
        1.0 - erfc_large(x)
    }
}

fn erfc_large(x: f64) -> f64 {
    // Laplace continued fraction for erfc, accurate for x >= 3
    let mut f = 0.0;
    for n in (1..=40).rev() {
        f = 0.5 * n as f64 / (x + f);
    }
    (-x * x).exp() / ((x + f) * std::f64::consts::PI.sqrt())
}

/// Sample a bore profile on the grid, periodized by a compensating
/// anti-transition in the buffer.
pub fn make_bore(profile: &BoreProfile, grid: &GridSpec) -> Result<BoreField> {
    if grid.dim() != 1 {
        return Err(CoreError::Config("bores are one-dimensional profiles".into()));
    }
    let l = grid.lengths()[0];
    let buffer = BufferZone { width: 0.2 * l };

    if let ProfileKind::CustomSamples(samples) = &profile.kind {
        if samples.len() != grid.points()[0] {
            return Err(CoreError::GridMismatch("custom samples do not match the grid".into()));
        }
        let field = Field::from_samples(grid.clone(), samples.clone())?;
        return Ok(BoreField { field, buffer, ramp: Field::zeros(grid), profile: None });
    }

    let jump = profile.jump();
    // ramp occupies [L/2 - width/2, L/2)
    let ramp_start = 0.5 * l - 0.5 * buffer.width;
    let ramp_width = 0.5 * buffer.width;

    if jump != 0.0 {
        // the transition must fit with decay room before the ramp begins
        let dist = ramp_start - profile.center.abs();
        if profile.steepness * dist < 20.0 {
            return Err(CoreError::DomainTooSmall(format!(
                "transition at {} with steepness {} does not decay before the buffer at {ramp_start}",
                profile.center, profile.steepness
            )));
        }
    }

    let n = grid.points()[0];
    let mut ramp_samples = vec![0.0_f64; n];
    let mut samples = vec![0.0_f64; n];
    for i in 0..n {
        let x = grid.coord(0, i);
        let r = if jump != 0.0 { -jump * smooth_step((x - ramp_start) / ramp_width) } else { 0.0 };
        ramp_samples[i] = r;
        samples[i] = profile.eval(x) + r;
    }

    // boundary decay check on the pure profile derivative
    if jump != 0.0 {
        let h = grid.spacing(0);
        let edge = (profile.eval(-0.5 * l + h) - profile.eval(-0.5 * l)).abs() / h;
        let peak = profile.steepness * profile.amplitude().abs();
        if edge > 1e-8 * peak.max(1e-300) {
            return Err(CoreError::DomainTooSmall(format!(
                "profile derivative at the boundary is {edge:.3e}, not decayed"
            )));
        }
    }

    Ok(BoreField {
        field: Field::from_samples(grid.clone(), samples)?,
        buffer,
        ramp: Field::from_samples(grid.clone(), ramp_samples)?,
        profile: Some(profile.clone()),
    })
}
