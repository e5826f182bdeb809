//! Coefficient data 𝒟 = (f, g, h, W₁, W₂, W₃) supplied to the system.
//!
//! Sources produce materialized per-time coefficient fields; `None` entries
//! are identically zero. The pipeline sources cache the last two evaluation
//! times since RK4 revisits the half-step and step endpoints.

use crate::bore::extend_1d_to_2d;
use crate::error::{CoreError, Result};
use crate::field::Field;
use crate::grid::GridSpec;
use crate::linwave::WaveBackground;
use std::sync::Arc;

#[derive(Clone, Debug, Default)]
pub struct CoeffFields {
    pub h: Option<Field>,
    pub dt_h: Option<Field>,
    pub w1: Option<Vec<Field>>,
    pub w2: Option<Vec<Field>>,
    pub w3: Option<Vec<Field>>,
    pub f: Option<Field>,
    pub g: Option<Vec<Field>>,
}

impl CoeffFields {
    pub fn is_zero(&self) -> bool {
        self.h.is_none()
            && self.w1.is_none()
            && self.w2.is_none()
            && self.w3.is_none()
            && self.f.is_none()
            && self.g.is_none()
    }
}

pub trait CoeffSource {
    fn eval(&mut self, t: f64, grid: &GridSpec) -> Result<CoeffFields>;
}

/// The homogeneous system (direct solves of the plain model).
pub struct ZeroCoeffs;

impl CoeffSource for ZeroCoeffs {
    fn eval(&mut self, _t: f64, _grid: &GridSpec) -> Result<CoeffFields> {
        Ok(CoeffFields::default())
    }
}

pub type Rule = Arc<dyn Fn(f64, &[f64]) -> f64 + Send + Sync>;

/// Coefficients given as analytic rules of (t, x).
#[derive(Default, Clone)]
pub struct AnalyticCoeffs {
    pub h: Option<Rule>,
    pub dt_h: Option<Rule>,
    pub w1: Option<Vec<Rule>>,
    pub w2: Option<Vec<Rule>>,
    pub w3: Option<Vec<Rule>>,
    pub f: Option<Rule>,
    pub g: Option<Vec<Rule>>,
}

fn sample_rule(rule: &Rule, t: f64, grid: &GridSpec) -> Field {
    Field::from_fn(grid, |x| rule(t, x))
}

impl CoeffSource for AnalyticCoeffs {
    fn eval(&mut self, t: f64, grid: &GridSpec) -> Result<CoeffFields> {
        let vecify = |rules: &Option<Vec<Rule>>| -> Option<Vec<Field>> {
            rules.as_ref().map(|rs| rs.iter().map(|r| sample_rule(r, t, grid)).collect())
        };
        Ok(CoeffFields {
            h: self.h.as_ref().map(|r| sample_rule(r, t, grid)),
            dt_h: self.dt_h.as_ref().map(|r| sample_rule(r, t, grid)),
            w1: vecify(&self.w1),
            w2: vecify(&self.w2),
            w3: vecify(&self.w3),
            f: self.f.as_ref().map(|r| sample_rule(r, t, grid)),
            g: vecify(&self.g),
        })
    }
}

/// The 1D bore pipeline source: h := η_L, W₁ = W₂ = W₃ := u_L, f := f_L,
/// g := g_L, all evaluated exactly from the linear-wave background.
pub struct BackgroundCoeffs {
    bg: WaveBackground,
    b: f64,
    d: f64,
    cache: Vec<(f64, CoeffFields)>,
}

impl BackgroundCoeffs {
    pub fn new(bg: WaveBackground, b: f64, d: f64) -> Self {
        Self { bg, b, d, cache: Vec::new() }
    }

    pub fn background(&self) -> &WaveBackground {
        &self.bg
    }
}

impl CoeffSource for BackgroundCoeffs {
    fn eval(&mut self, t: f64, grid: &GridSpec) -> Result<CoeffFields> {
        if let Some((_, c)) = self.cache.iter().find(|(tc, _)| *tc == t) {
            return Ok(c.clone());
        }
        if grid != self.bg.grid() {
            return Err(CoreError::GridMismatch("background grid differs from run grid".into()));
        }
        let (eta_l, u_l) = self.bg.evolve(t)?;
        let (f_l, g_l) = self.bg.forcing_from(&eta_l, &u_l, self.b, self.d)?;
        let dt_h = self.bg.dt_eta(t)?;
        let fields = CoeffFields {
            h: Some(eta_l),
            dt_h: Some(dt_h),
            w1: Some(vec![u_l.clone()]),
            w2: Some(vec![u_l.clone()]),
            w3: Some(vec![u_l]),
            f: Some(f_l),
            g: Some(vec![g_l]),
        };
        if self.cache.len() >= 2 {
            self.cache.remove(0);
        }
        self.cache.push((t, fields.clone()));
        Ok(fields)
    }
}

/// One stored 1D background frame for the 2D pipeline.
#[derive(Clone, Debug)]
pub struct Frame1D {
    pub t: f64,
    pub eta: Field,
    pub u: Field,
    pub dt_eta: Field,
}

/// The 2D pipeline source: extrudes a stored 1D trajectory y-independently,
/// with h := η₁, W₁ = W₂ = W₃ := (u₁, 0), ∂ₜh := ∂ₜη₁ and no forcing.
pub struct FrameCoeffs {
    dt: f64,
    frames: Vec<Frame1D>,
    cache: Vec<(f64, CoeffFields)>,
}

impl FrameCoeffs {
    pub fn new(frames: Vec<Frame1D>) -> Result<Self> {
        if frames.len() < 2 {
            return Err(CoreError::Config("need at least two background frames".into()));
        }
        let dt = frames[1].t - frames[0].t;
        Ok(Self { dt, frames, cache: Vec::new() })
    }
}

impl CoeffSource for FrameCoeffs {
    fn eval(&mut self, t: f64, grid: &GridSpec) -> Result<CoeffFields> {
        if let Some((_, c)) = self.cache.iter().find(|(tc, _)| *tc == t) {
            return Ok(c.clone());
        }
        let fidx = (t / self.dt).round() as usize;
        let frame = self.frames.get(fidx.min(self.frames.len() - 1)).ok_or_else(|| {
            CoreError::Config(format!("no background frame at t = {t} (have {})", self.frames.len()))
        })?;
        // frames normally align with the stage times exactly; off-node times
        // are blended linearly between the bracketing frames
        let (eta1, u1, dte1);
        let (eta_ref, u_ref, dte_ref) = if (frame.t - t).abs() <= 1e-9 * (1.0 + t.abs()) {
            (&frame.eta, &frame.u, &frame.dt_eta)
        } else {
            let i0 = ((t / self.dt).floor() as usize).min(self.frames.len() - 2);
            let (a, b) = (&self.frames[i0], &self.frames[i0 + 1]);
            let w = ((t - a.t) / (b.t - a.t)).clamp(0.0, 1.0);
            eta1 = a.eta.scale(1.0 - w).add(&b.eta.scale(w));
            u1 = a.u.scale(1.0 - w).add(&b.u.scale(w));
            dte1 = a.dt_eta.scale(1.0 - w).add(&b.dt_eta.scale(w));
            (&eta1, &u1, &dte1)
        };
        let eta2 = extend_1d_to_2d(eta_ref, grid)?;
        let u2 = extend_1d_to_2d(u_ref, grid)?;
        let dte2 = extend_1d_to_2d(dte_ref, grid)?;
        let zero = Field::zeros(grid);
        let w = vec![u2, zero];
        let fields = CoeffFields {
            h: Some(eta2),
            dt_h: Some(dte2),
            w1: Some(w.clone()),
            w2: Some(w.clone()),
            w3: Some(w),
            f: None,
            g: None,
        };
        if self.cache.len() >= 2 {
            self.cache.remove(0);
        }
        self.cache.push((t, fields.clone()));
        Ok(fields)
    }
}
