//! The dyadic partition of unity and nonhomogeneous dyadic blocks.
//!
//! `chi` is radial, identically 1 on [0, 1], identically 0 on [4/3, ∞), glued
//! with the classical C^∞ step built from exp(−1/t). `phi(r) = chi(r/2) −
//! chi(r)` is then supported in [1, 8/3] ⊂ [3/4, 8/3] and the telescoping
//! identity `chi(ξ) + Σ_{j≥0} phi(2^{-j}ξ) = 1` holds pointwise.

use crate::error::{CoreError, Result};
use crate::field::Field;
use crate::grid::GridSpec;
use num_complex::Complex64;

/// Smallest nonhomogeneous block index; blocks below it are identically zero.
pub const J_MIN: i32 = -1;

fn glue(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

/// C^∞ step: 0 for u ≤ 0, 1 for u ≥ 1, strictly increasing in between.
pub fn smooth_step(u: f64) -> f64 {
    let a = glue(u);
    let b = glue(1.0 - u);
    if a == 0.0 {
        0.0
    } else if b == 0.0 {
        1.0
    } else {
        a / (a + b)
    }
}

/// Radial low-frequency cutoff profile.
pub fn chi(r: f64) -> f64 {
    let r = r.abs();
    if r <= 1.0 {
        1.0
    } else if r >= 4.0 / 3.0 {
        0.0
    } else {
        1.0 - smooth_step(3.0 * (r - 1.0))
    }
}

/// Annulus profile `phi(r) = chi(r/2) − chi(r)`, supported in [1, 8/3].
pub fn phi(r: f64) -> f64 {
    chi(0.5 * r) - chi(r)
}

/// Partition data for one grid: the admissible block range plus cached
/// per-block spectral weights.
#[derive(Clone, Debug)]
pub struct DyadicPartition {
    grid: GridSpec,
    j_max: i32,
    /// weights[j - J_MIN][idx] = chi(|k|) or phi(2^{-j}|k|) over the lattice
    weights: Vec<Vec<f64>>,
}

impl DyadicPartition {
    pub fn new(grid: &GridSpec) -> Result<Self> {
        let kmax = grid.k_max();
        if kmax < 0.75 {
            return Err(CoreError::DegenerateGrid { kmax });
        }
        // largest j with 2^j · (3/4) ≤ max |k|
        let j_max = (kmax / 0.75).log2().floor() as i32;
        let n = grid.total_points();
        let mut weights = Vec::with_capacity((j_max - J_MIN + 1) as usize);
        for j in J_MIN..=j_max {
            let mut w = Vec::with_capacity(n);
            for idx in 0..n {
                let r = grid.k_norm(idx);
                w.push(if j == -1 { chi(r) } else { phi(r / 2f64.powi(j)) });
            }
            weights.push(w);
        }
        Ok(Self { grid: grid.clone(), j_max, weights })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn j_max(&self) -> i32 {
        self.j_max
    }

    pub fn j_range(&self) -> impl Iterator<Item = i32> {
        J_MIN..=self.j_max
    }

    /// Spectral weight of block `j` over the lattice; `None` for j ≤ −2 or
    /// j > j_max (those blocks vanish on this grid).
    pub fn block_weights(&self, j: i32) -> Option<&[f64]> {
        if j < J_MIN || j > self.j_max {
            None
        } else {
            Some(&self.weights[(j - J_MIN) as usize])
        }
    }

    /// Block weight at one lattice radius (exact evaluation, not the cache).
    pub fn weight_at(&self, j: i32, r: f64) -> f64 {
        if j < J_MIN {
            0.0
        } else if j == -1 {
            chi(r)
        } else {
            phi(r / 2f64.powi(j))
        }
    }
}

/// Nonhomogeneous dyadic block Δ_j u (zero field for j ≤ −2).
pub fn dyadic_block(u: &Field, j: i32, part: &DyadicPartition) -> Result<Field> {
    u.same_grid(&Field::zeros(part.grid()))?;
    match part.block_weights(j) {
        None => Ok(Field::zeros(u.grid())),
        Some(w) => {
            let spec: Vec<Complex64> = u.spectrum().iter().zip(w).map(|(z, m)| z * m).collect();
            Field::from_spectrum(u.grid().clone(), spec)
        }
    }
}
