//! Fourier-multiplier operators, dealiased products and the low-pass
//! projector used by the Friedrichs scheme.
//!
//! Differentiation zeroes the Nyquist mode (its sign is ambiguous on an even
//! grid). Quadratic products follow the 2/3 rule: both factors and the result
//! are truncated to `|n| <= floor(N/3)` per axis.

use crate::error::{CoreError, Result};
use crate::field::Field;
use crate::grid::GridSpec;
use num_complex::Complex64;

#[derive(Clone, Debug)]
pub struct MultiplierOp {
    grid: GridSpec,
    symbol: Vec<Complex64>,
    label: String,
}

impl MultiplierOp {
    /// Tabulate a symbol over the wavenumber lattice.
    pub fn new(
        grid: &GridSpec,
        label: &str,
        symbol: impl Fn(&[f64]) -> Complex64,
    ) -> Result<Self> {
        let dim = grid.dim();
        let mut tab = Vec::with_capacity(grid.total_points());
        for idx in 0..grid.total_points() {
            let k = grid.k_vec(idx);
            let v = symbol(&k[..dim]);
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(CoreError::Config(format!(
                    "symbol '{label}' not finite at k = {:?}",
                    &k[..dim]
                )));
            }
            tab.push(v);
        }
        Ok(Self { grid: grid.clone(), symbol: tab, label: label.to_string() })
    }

    pub fn real(grid: &GridSpec, label: &str, symbol: impl Fn(&[f64]) -> f64) -> Result<Self> {
        Self::new(grid, label, |k| Complex64::new(symbol(k), 0.0))
    }

    /// ∂/∂x_axis as the symbol i·k_axis, Nyquist zeroed.
    pub fn derivative(grid: &GridSpec, axis: usize) -> Result<Self> {
        let n = grid.points()[axis];
        let l = grid.lengths()[axis];
        let nyquist = std::f64::consts::PI * n as f64 / l;
        Self::new(grid, &format!("d/dx{axis}"), move |k| {
            if (k[axis].abs() - nyquist).abs() < 1e-12 * nyquist.max(1.0) {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, k[axis])
            }
        })
    }

    /// Third derivative along `axis` (symbol (ik)³), Nyquist zeroed.
    pub fn third_derivative(grid: &GridSpec, axis: usize) -> Result<Self> {
        let n = grid.points()[axis];
        let l = grid.lengths()[axis];
        let nyquist = std::f64::consts::PI * n as f64 / l;
        Self::new(grid, &format!("d3/dx{axis}"), move |k| {
            if (k[axis].abs() - nyquist).abs() < 1e-12 * nyquist.max(1.0) {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, -k[axis].powi(3))
            }
        })
    }

    /// (I − c Δ)⁻¹, symbol 1/(1 + c|k|²) ∈ (0, 1] for c ≥ 0.
    pub fn helmholtz_inverse(grid: &GridSpec, c: f64) -> Result<Self> {
        if c < 0.0 {
            return Err(CoreError::Config(format!("helmholtz coefficient must be >= 0, got {c}")));
        }
        Self::real(grid, &format!("(I-{c}Δ)^-1"), move |k| {
            let k2: f64 = k.iter().map(|x| x * x).sum();
            1.0 / (1.0 + c * k2)
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn symbol(&self) -> &[Complex64] {
        &self.symbol
    }

    pub fn apply(&self, f: &Field) -> Result<Field> {
        if *f.grid() != self.grid {
            return Err(CoreError::GridMismatch(format!(
                "multiplier '{}' applied to a field on a different grid",
                self.label
            )));
        }
        let spec: Vec<Complex64> =
            f.spectrum().iter().zip(&self.symbol).map(|(z, s)| z * s).collect();
        Field::from_spectrum(self.grid.clone(), spec)
    }
}

/// All first derivatives of `f`.
pub fn gradient(f: &Field) -> Result<Vec<Field>> {
    (0..f.grid().dim()).map(|a| MultiplierOp::derivative(f.grid(), a)?.apply(f)).collect()
}

/// Divergence of a vector field.
pub fn divergence(v: &[Field]) -> Result<Field> {
    let grid = v[0].grid().clone();
    let mut out = Field::zeros(&grid);
    for (a, comp) in v.iter().enumerate() {
        out = out.add(&MultiplierOp::derivative(&grid, a)?.apply(comp)?);
    }
    Ok(out)
}

/// Per-axis 2/3-rule mask: 1 where `|n| <= floor(N/3)` on every axis.
pub fn dealias_mask(grid: &GridSpec) -> Vec<f64> {
    let cutoffs: Vec<i64> = grid.points().iter().map(|&n| (n / 3) as i64).collect();
    (0..grid.total_points())
        .map(|idx| {
            let ij = grid.unflatten(idx);
            for a in 0..grid.dim() {
                if grid.int_wavenumber(a, ij[a]).abs() > cutoffs[a] {
                    return 0.0;
                }
            }
            1.0
        })
        .collect()
}

fn masked(f: &Field, mask: &[f64]) -> Vec<Complex64> {
    f.spectrum().iter().zip(mask).map(|(z, m)| z * m).collect()
}

/// Pointwise product with 2/3-rule dealiasing: both inputs are truncated,
/// multiplied in physical space, and the result truncated to the same band.
pub fn dealias_product(f: &Field, g: &Field) -> Result<Field> {
    f.same_grid(g)?;
    let grid = f.grid().clone();
    let mask = dealias_mask(&grid);
    let fp = crate::fft::inverse(&grid, &masked(f, &mask));
    let gp = crate::fft::inverse(&grid, &masked(g, &mask));
    let prod: Vec<f64> = fp.iter().zip(&gp).map(|(a, b)| a * b).collect();
    let mut spec = crate::fft::forward(&grid, &prod);
    for (z, m) in spec.iter_mut().zip(&mask) {
        *z *= m;
    }
    Field::from_spectrum(grid, spec)
}

/// Friedrichs low-pass projector: zero the spectrum strictly outside |k| ≤ m.
pub fn friedrichs_project(f: &Field, m: f64) -> Result<Field> {
    if !(m > 0.0) {
        return Err(CoreError::Config(format!("friedrichs cutoff must be positive, got {m}")));
    }
    let grid = f.grid().clone();
    let spec: Vec<Complex64> = f
        .spectrum()
        .iter()
        .enumerate()
        .map(|(idx, z)| if grid.k_norm(idx) <= m { *z } else { Complex64::new(0.0, 0.0) })
        .collect();
    Field::from_spectrum(grid, spec)
}

/// Spectral mask of the projector (used by the solver's hot path).
pub fn friedrichs_mask(grid: &GridSpec, m: f64) -> Vec<f64> {
    (0..grid.total_points()).map(|idx| if grid.k_norm(idx) <= m { 1.0 } else { 0.0 }).collect()
}
