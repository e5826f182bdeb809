//! Uniform periodic grids in one and two dimensions.
//!
//! The domain is the torus `[-L/2, L/2)` per axis. Physical wavenumbers are
//! `k = 2π n / L` with integer index `n` in standard FFT order
//! `[0, 1, …, N/2, -N/2+1, …, -1]` (the Nyquist index `N/2` appears exactly
//! once per axis).

use crate::error::{CoreError, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    lengths: Vec<f64>,
    points: Vec<usize>,
}

impl GridSpec {
    pub fn new(lengths: &[f64], points: &[usize]) -> Result<Self> {
        if lengths.len() != points.len() {
            return Err(CoreError::Config(
                "lengths and points must have the same dimension".into(),
            ));
        }
        let dim = lengths.len();
        if dim == 0 || dim > 2 {
            return Err(CoreError::Config(format!(
                "only 1D and 2D grids are supported, got dim = {dim}"
            )));
        }
        for (&l, &n) in lengths.iter().zip(points) {
            if !(l > 0.0) || !l.is_finite() {
                return Err(CoreError::Config(format!("axis length must be positive, got {l}")));
            }
            if n < 4 || n % 2 != 0 {
                return Err(CoreError::Config(format!(
                    "points per axis must be even and >= 4, got {n}"
                )));
            }
        }
        Ok(Self { lengths: lengths.to_vec(), points: points.to_vec() })
    }

    pub fn new_1d(length: f64, points: usize) -> Result<Self> {
        Self::new(&[length], &[points])
    }

    pub fn new_2d(lengths: [f64; 2], points: [usize; 2]) -> Result<Self> {
        Self::new(&lengths, &points)
    }

    pub fn dim(&self) -> usize {
        self.lengths.len()
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.lengths[axis] / self.points[axis] as f64
    }

    pub fn min_spacing(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).fold(f64::INFINITY, f64::min)
    }

    /// Total number of nodes (product over axes).
    pub fn total_points(&self) -> usize {
        self.points.iter().product()
    }

    /// Quadrature weight of one node, `prod_axis spacing`.
    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).product()
    }

    /// Physical coordinate of node `i` along `axis`: `-L/2 + i h`.
    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        -0.5 * self.lengths[axis] + i as f64 * self.spacing(axis)
    }

    /// Signed integer wavenumber index for FFT bin `i` along an axis.
    pub fn int_wavenumber(&self, axis: usize, i: usize) -> i64 {
        let n = self.points[axis];
        if i <= n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    /// Physical wavenumber `2π n / L` for FFT bin `i` along `axis`.
    pub fn wavenumber(&self, axis: usize, i: usize) -> f64 {
        2.0 * PI * self.int_wavenumber(axis, i) as f64 / self.lengths[axis]
    }

    /// Largest |k| present on the lattice (Nyquist corner).
    pub fn k_max(&self) -> f64 {
        let per_axis: Vec<f64> = (0..self.dim())
            .map(|a| PI * self.points[a] as f64 / self.lengths[a])
            .collect();
        per_axis.iter().map(|k| k * k).sum::<f64>().sqrt()
    }

    /// Decompose a flat (row-major) node or spectral index into per-axis indices.
    pub fn unflatten(&self, idx: usize) -> [usize; 2] {
        match self.dim() {
            1 => [idx, 0],
            _ => {
                let ny = self.points[1];
                [idx / ny, idx % ny]
            }
        }
    }

    /// Physical wavenumber vector at flat spectral index `idx`.
    pub fn k_vec(&self, idx: usize) -> [f64; 2] {
        let ij = self.unflatten(idx);
        match self.dim() {
            1 => [self.wavenumber(0, ij[0]), 0.0],
            _ => [self.wavenumber(0, ij[0]), self.wavenumber(1, ij[1])],
        }
    }

    /// |k| at flat spectral index `idx`.
    pub fn k_norm(&self, idx: usize) -> f64 {
        let k = self.k_vec(idx);
        (k[0] * k[0] + k[1] * k[1]).sqrt()
    }

    /// |k| as seen by the discrete gradient: Nyquist components count as
    /// zero, matching the differentiation convention.
    pub fn k_norm_deriv(&self, idx: usize) -> f64 {
        let ij = self.unflatten(idx);
        let mut k2 = 0.0;
        for a in 0..self.dim() {
            if !self.is_nyquist(a, ij[a]) {
                k2 += self.wavenumber(a, ij[a]).powi(2);
            }
        }
        k2.sqrt()
    }

    /// Physical coordinates of flat node index `idx`.
    pub fn node(&self, idx: usize) -> [f64; 2] {
        let ij = self.unflatten(idx);
        match self.dim() {
            1 => [self.coord(0, ij[0]), 0.0],
            _ => [self.coord(0, ij[0]), self.coord(1, ij[1])],
        }
    }

    /// True if bin `i` along `axis` is the Nyquist mode.
    pub fn is_nyquist(&self, axis: usize, i: usize) -> bool {
        i == self.points[axis] / 2
    }
}
