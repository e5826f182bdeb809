//! Scalar fields on a periodic grid with cached Fourier coefficients.
//!
//! A [`Field`] always carries both representations; linear operations act on
//! both simultaneously (the DFT is linear), so no transform is needed for
//! sums, scalings or time-step combinations. Nonlinear and spectral
//! operations rebuild one side from the other.

use crate::error::{CoreError, Result};
use crate::fft;
use crate::grid::GridSpec;
use num_complex::Complex64;

#[derive(Clone, Debug)]
pub struct Field {
    grid: GridSpec,
    samples: Vec<f64>,
    spectrum: Vec<Complex64>,
}

impl Field {
    pub fn from_samples(grid: GridSpec, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.total_points() {
            return Err(CoreError::GridMismatch(format!(
                "sample array has {} entries, grid has {} nodes",
                samples.len(),
                grid.total_points()
            )));
        }
        let spectrum = fft::forward(&grid, &samples);
        Ok(Self { grid, samples, spectrum })
    }

    pub fn from_spectrum(grid: GridSpec, spectrum: Vec<Complex64>) -> Result<Self> {
        if spectrum.len() != grid.total_points() {
            return Err(CoreError::GridMismatch(format!(
                "spectrum has {} entries, grid has {} modes",
                spectrum.len(),
                grid.total_points()
            )));
        }
        let samples = fft::inverse(&grid, &spectrum);
        Ok(Self { grid, samples, spectrum })
    }

    pub fn zeros(grid: &GridSpec) -> Self {
        Self {
            grid: grid.clone(),
            samples: vec![0.0; grid.total_points()],
            spectrum: vec![Complex64::new(0.0, 0.0); grid.total_points()],
        }
    }

    pub fn constant(grid: &GridSpec, c: f64) -> Self {
        let mut f = Self::zeros(grid);
        f.samples.iter_mut().for_each(|x| *x = c);
        f.spectrum[0] = Complex64::new(c * grid.total_points() as f64, 0.0);
        f
    }

    /// Sample a function of the physical coordinates.
    pub fn from_fn(grid: &GridSpec, f: impl Fn(&[f64]) -> f64) -> Self {
        let dim = grid.dim();
        let samples: Vec<f64> = (0..grid.total_points())
            .map(|idx| {
                let x = grid.node(idx);
                f(&x[..dim])
            })
            .collect();
        Self::from_samples(grid.clone(), samples).expect("sized by construction")
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn spectrum(&self) -> &[Complex64] {
        &self.spectrum
    }

    pub fn same_grid(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            return Err(CoreError::GridMismatch("fields live on different grids".into()));
        }
        Ok(())
    }

    // ── linear algebra (acts on both representations) ──────────────────────

    pub fn add(&self, other: &Field) -> Field {
        self.zip(other, |a, b| a + b, |a, b| a + b)
    }

    pub fn sub(&self, other: &Field) -> Field {
        self.zip(other, |a, b| a - b, |a, b| a - b)
    }

    pub fn scale(&self, c: f64) -> Field {
        Field {
            grid: self.grid.clone(),
            samples: self.samples.iter().map(|x| c * x).collect(),
            spectrum: self.spectrum.iter().map(|z| c * z).collect(),
        }
    }

    /// `self + c * other`, the RK building block.
    pub fn add_scaled(&self, c: f64, other: &Field) -> Field {
        self.zip(other, |a, b| a + c * b, |a, b| a + c * b)
    }

    fn zip(
        &self,
        other: &Field,
        fr: impl Fn(f64, f64) -> f64,
        fc: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Field {
        debug_assert_eq!(self.grid, other.grid);
        Field {
            grid: self.grid.clone(),
            samples: self.samples.iter().zip(&other.samples).map(|(&a, &b)| fr(a, b)).collect(),
            spectrum: self.spectrum.iter().zip(&other.spectrum).map(|(&a, &b)| fc(a, b)).collect(),
        }
    }

    // ── reductions ──────────────────────────────────────────────────────────

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, &x| m.max(x.abs()))
    }

    /// Discrete L² norm, `sqrt(cell_volume · Σ u²)`.
    pub fn l2_norm(&self) -> f64 {
        (self.grid.cell_volume() * self.samples.iter().map(|x| x * x).sum::<f64>()).sqrt()
    }

    /// Discrete L² inner product.
    pub fn inner(&self, other: &Field) -> f64 {
        self.grid.cell_volume()
            * self.samples.iter().zip(&other.samples).map(|(a, b)| a * b).sum::<f64>()
    }

    /// Integral over the domain, `cell_volume · Σ u`.
    pub fn integral(&self) -> f64 {
        self.grid.cell_volume() * self.samples.iter().sum::<f64>()
    }

    pub fn is_finite(&self) -> bool {
        self.samples.iter().all(|x| x.is_finite())
    }
}

/// The pair (η, V) advanced by the integrator; `vel` has one component per
/// grid dimension.
#[derive(Clone, Debug)]
pub struct State {
    pub eta: Field,
    pub vel: Vec<Field>,
}

impl State {
    pub fn new(eta: Field, vel: Vec<Field>) -> Result<Self> {
        if vel.len() != eta.grid().dim() {
            return Err(CoreError::Config(format!(
                "velocity must have {} components, got {}",
                eta.grid().dim(),
                vel.len()
            )));
        }
        for v in &vel {
            eta.same_grid(v)?;
        }
        Ok(Self { eta, vel })
    }

    pub fn zeros(grid: &GridSpec) -> Self {
        Self {
            eta: Field::zeros(grid),
            vel: (0..grid.dim()).map(|_| Field::zeros(grid)).collect(),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        self.eta.grid()
    }

    pub fn add(&self, other: &State) -> State {
        State {
            eta: self.eta.add(&other.eta),
            vel: self.vel.iter().zip(&other.vel).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, other: &State) -> State {
        State {
            eta: self.eta.sub(&other.eta),
            vel: self.vel.iter().zip(&other.vel).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn add_scaled(&self, c: f64, other: &State) -> State {
        State {
            eta: self.eta.add_scaled(c, &other.eta),
            vel: self.vel.iter().zip(&other.vel).map(|(a, b)| a.add_scaled(c, b)).collect(),
        }
    }

    pub fn scale(&self, c: f64) -> State {
        State { eta: self.eta.scale(c), vel: self.vel.iter().map(|v| v.scale(c)).collect() }
    }

    pub fn is_finite(&self) -> bool {
        self.eta.is_finite() && self.vel.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.vel.iter().fold(self.eta.max_abs(), |m, v| m.max(v.max_abs()))
    }

    /// Discrete L² norm of the full vector (η, V).
    pub fn l2_norm(&self) -> f64 {
        let mut s = self.eta.l2_norm().powi(2);
        for v in &self.vel {
            s += v.l2_norm().powi(2);
        }
        s.sqrt()
    }
}
