//! Discrete Fourier transforms on the grids of [`GridSpec`].
//!
//! Convention: the forward transform is the plain unnormalized sum
//! `û_k = Σ_n u_n e^{-i k·x_n}`-style (rustfft's default), the inverse divides
//! by the total point count. 2D transforms are separable row/column passes.

use crate::grid::GridSpec;
use num_complex::Complex64;
use once_cell::sync::Lazy;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

static PLAN_CACHE: Lazy<Mutex<HashMap<usize, Arc<Plans>>>> = Lazy::new(|| Mutex::new(HashMap::new()));

fn plans(n: usize) -> Arc<Plans> {
    let mut cache = PLAN_CACHE.lock().unwrap();
    cache
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Plans {
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

// Threshold below which the per-line rayon fan-out costs more than it saves.
const PAR_MIN_LINES: usize = 32;

fn fft_lines(buf: &mut [Complex64], n_lines: usize, line_len: usize, fft: &Arc<dyn Fft<f64>>) {
    debug_assert_eq!(buf.len(), n_lines * line_len);
    if n_lines >= PAR_MIN_LINES && line_len * n_lines >= 1 << 14 {
        buf.par_chunks_mut(line_len).for_each(|line| {
            let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
            fft.process_with_scratch(line, &mut scratch);
        });
    } else {
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        for line in buf.chunks_mut(line_len) {
            fft.process_with_scratch(line, &mut scratch);
        }
    }
}

fn transpose(src: &[Complex64], rows: usize, cols: usize, dst: &mut [Complex64]) {
    for r in 0..rows {
        for c in 0..cols {
            dst[c * rows + r] = src[r * cols + c];
        }
    }
}

fn transform_complex(grid: &GridSpec, data: &mut [Complex64], forward: bool) {
    match grid.dim() {
        1 => {
            let n = grid.points()[0];
            let p = plans(n);
            let fft = if forward { &p.forward } else { &p.inverse };
            fft_lines(data, 1, n, fft);
        }
        _ => {
            let (nx, ny) = (grid.points()[0], grid.points()[1]);
            let px = plans(nx);
            let py = plans(ny);
            let (fx, fy) = if forward {
                (&px.forward, &py.forward)
            } else {
                (&px.inverse, &py.inverse)
            };
            // rows are contiguous lines of length ny
            fft_lines(data, nx, ny, fy);
            let mut tmp = vec![Complex64::default(); data.len()];
            transpose(data, nx, ny, &mut tmp);
            fft_lines(&mut tmp, ny, nx, fx);
            transpose(&tmp, ny, nx, data);
        }
    }
}

/// Coefficients are referenced to the physical basis e^{ikx} on
/// [-L/2, L/2): with x₀ = −L/2 the rebasing factor e^{−ikx₀} is exactly
/// (−1)^{n₁+n₂+…} per mode — sign flips, no rounding.
fn origin_sign(grid: &GridSpec, idx: usize) -> f64 {
    let ij = grid.unflatten(idx);
    let mut parity = 0i64;
    for a in 0..grid.dim() {
        parity += grid.int_wavenumber(a, ij[a]).abs();
    }
    if parity % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Forward transform of real samples: û_k = Σ_n u(x_n) e^{−ik·x_n}
/// (unnormalized sum over physical nodes).
pub fn forward(grid: &GridSpec, samples: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    transform_complex(grid, &mut buf, true);
    for (idx, z) in buf.iter_mut().enumerate() {
        *z *= origin_sign(grid, idx);
    }
    buf
}

/// Inverse transform normalized by the total point count; returns the real part.
pub fn inverse(grid: &GridSpec, spectrum: &[Complex64]) -> Vec<f64> {
    let mut buf: Vec<Complex64> = spectrum
        .iter()
        .enumerate()
        .map(|(idx, z)| z * origin_sign(grid, idx))
        .collect();
    transform_complex(grid, &mut buf, false);
    let scale = 1.0 / grid.total_points() as f64;
    buf.iter().map(|c| c.re * scale).collect()
}

/// Inverse transform keeping the complex result (used by consistency checks).
pub fn inverse_complex(grid: &GridSpec, spectrum: &[Complex64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = spectrum
        .iter()
        .enumerate()
        .map(|(idx, z)| z * origin_sign(grid, idx))
        .collect();
    transform_complex(grid, &mut buf, false);
    let scale = 1.0 / grid.total_points() as f64;
    for c in &mut buf {
        *c *= scale;
    }
    buf
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    /// O(N²) reference DFT over physical nodes, the independent oracle for
    /// the transform layer: û_k = Σ_n u(x_n) e^{−i k x_n}.
    pub fn naive_dft_1d(grid: &GridSpec, samples: &[f64]) -> Vec<Complex64> {
        let n = samples.len();
        (0..n)
            .map(|k| {
                let kp = grid.wavenumber(0, k);
                (0..n)
                    .map(|j| {
                        let x = grid.coord(0, j);
                        samples[j] * Complex64::new(0.0, -kp * x).exp()
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft_and_round_trips() {
        let grid = GridSpec::new_1d(3.0, 16).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let samples: Vec<f64> = (0..16).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let spec = forward(&grid, &samples);
        let oracle = naive_dft_1d(&grid, &samples);
        for (a, b) in spec.iter().zip(&oracle) {
            assert!((a - b).norm() < 1e-10, "{a} vs {b}");
        }
        let back = inverse(&grid, &spec);
        let num: f64 = back.iter().zip(&samples).map(|(a, b)| (a - b) * (a - b)).sum();
        let den: f64 = samples.iter().map(|x| x * x).sum();
        assert!((num / den).sqrt() < 1e-12);
    }

    #[test]
    fn round_trip_2d() {
        let grid = GridSpec::new_2d([2.0, 5.0], [8, 12]).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let samples: Vec<f64> = (0..grid.total_points()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let back = inverse(&grid, &forward(&grid, &samples));
        for (a, b) in back.iter().zip(&samples) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
