//! Nonhomogeneous Besov norms `B^s_{p,r}` evaluated discretely.
//!
//! `p` is restricted to 2 (spectral Parseval, no inverse transform needed)
//! and ∞ (grid max per block). `r = ∞` is the supremum over blocks.

use crate::error::Result;
use crate::field::Field;
use crate::lp::partition::{dyadic_block, DyadicPartition};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lp {
    Two,
    Inf,
}

#[derive(Clone, Copy, Debug)]
pub struct BesovSpec {
    pub s: f64,
    pub p: Lp,
    /// summation exponent in [1, ∞]; `f64::INFINITY` means the supremum
    pub r: f64,
}

impl BesovSpec {
    pub fn new(s: f64, p: Lp, r: f64) -> Result<Self> {
        if !(r >= 1.0) {
            return Err(crate::error::CoreError::Domain(format!("r must be >= 1, got {r}")));
        }
        Ok(Self { s, p, r })
    }
}

/// ℓ^r norm of a sequence (sup for r = ∞).
pub fn lr_stack(vals: impl Iterator<Item = f64>, r: f64) -> f64 {
    if r.is_infinite() {
        vals.fold(0.0, f64::max)
    } else if (r - 2.0).abs() < 1e-14 {
        vals.map(|v| v * v).sum::<f64>().sqrt()
    } else {
        vals.map(|v| v.abs().powf(r)).sum::<f64>().powf(1.0 / r)
    }
}

/// Block L^p norms of `u` for j in the admissible range.
fn block_lp_norms(u: &Field, p: Lp, part: &DyadicPartition) -> Result<Vec<f64>> {
    match p {
        Lp::Two => {
            // Parseval: ‖Δ_j u‖²_{L²} = (cell_volume/N_total) Σ_k weight_j(k)² |û_k|²
            let grid = u.grid();
            let norm_factor = grid.cell_volume() / grid.total_points() as f64;
            let mut out = Vec::new();
            for j in part.j_range() {
                let weights = part.block_weights(j).expect("in range");
                let mut acc = 0.0;
                for (z, m) in u.spectrum().iter().zip(weights) {
                    acc += (m * m) * z.norm_sqr();
                }
                out.push((acc * norm_factor).sqrt());
            }
            Ok(out)
        }
        Lp::Inf => part
            .j_range()
            .map(|j| Ok(dyadic_block(u, j, part)?.max_abs()))
            .collect(),
    }
}

/// `‖u‖_{B^s_{p,r}}` together with the contribution of the last admissible
/// block (the reported truncation tail).
pub fn besov_norm_with_tail(u: &Field, spec: &BesovSpec, part: &DyadicPartition) -> Result<(f64, f64)> {
    let norms = block_lp_norms(u, spec.p, part)?;
    let weighted = norms
        .iter()
        .enumerate()
        .map(|(i, n)| 2f64.powf(spec.s * (i as f64 - 1.0)) * n);
    let value = lr_stack(weighted, spec.r);
    let tail = 2f64.powf(spec.s * part.j_max() as f64) * norms.last().copied().unwrap_or(0.0);
    Ok((value, tail))
}

pub fn besov_norm(u: &Field, spec: &BesovSpec, part: &DyadicPartition) -> Result<f64> {
    besov_norm_with_tail(u, spec, part).map(|(v, _)| v)
}

/// B^s_{2,r} norm of a tuple given directly by spectra (no transforms);
/// components combine in ℓ² per block.
pub fn besov_p2_multi(
    grid: &crate::grid::GridSpec,
    spectra: &[&[num_complex::Complex64]],
    s: f64,
    r: f64,
    part: &DyadicPartition,
) -> f64 {
    let norm_factor = grid.cell_volume() / grid.total_points() as f64;
    let n_blocks = (part.j_max() - super::J_MIN + 1) as usize;
    let mut acc = vec![0.0_f64; n_blocks];
    for spec in spectra {
        for (idx, z) in spec.iter().enumerate() {
            let z2 = z.norm_sqr();
            if z2 == 0.0 {
                continue;
            }
            for (bi, j) in part.j_range().enumerate() {
                let m = part.block_weights(j).expect("in range")[idx];
                if m != 0.0 {
                    acc[bi] += m * m * z2;
                }
            }
        }
    }
    lr_stack(
        acc.iter()
            .enumerate()
            .map(|(i, a)| 2f64.powf(s * (i as f64 - 1.0)) * (a * norm_factor).sqrt()),
        r,
    )
}

/// Besov norm of a tuple of fields: per block, components combine in ℓ²
/// for p = 2 and by max for p = ∞.
pub fn besov_norm_pair(fields: &[&Field], spec: &BesovSpec, part: &DyadicPartition) -> Result<f64> {
    let n_blocks = (part.j_max() - super::J_MIN + 1) as usize;
    let mut per_block: Vec<f64> = vec![0.0; n_blocks];
    for f in fields {
        let norms = block_lp_norms(f, spec.p, part)?;
        for (acc, n) in per_block.iter_mut().zip(&norms) {
            match spec.p {
                Lp::Two => *acc += n * n,
                Lp::Inf => *acc = acc.max(*n),
            }
        }
    }
    if matches!(spec.p, Lp::Two) {
        for v in &mut per_block {
            *v = v.sqrt();
        }
    }
    let weighted = per_block
        .iter()
        .enumerate()
        .map(|(i, n)| 2f64.powf(spec.s * (i as f64 - 1.0)) * n);
    Ok(lr_stack(weighted, spec.r))
}
