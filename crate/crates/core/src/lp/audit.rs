//! Numerical audits of the frequency-localization inequalities: the two-sided
//! derivative bound on annulus-supported fields and the commutator residual
//! `R_j = Δ_j(u ∂^α v) − u Δ_j ∂^α v`.

use crate::error::Result;
use crate::field::Field;
use crate::grid::GridSpec;
use crate::lp::besov::{besov_norm, lr_stack, BesovSpec, Lp};
use crate::lp::energy::grad_sup_norm;
use crate::lp::partition::{dyadic_block, DyadicPartition};
use crate::multiplier::{dealias_product, MultiplierOp};
use rand::{Rng, SeedableRng};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct BernsteinReport {
    pub j: i32,
    pub trials: usize,
    pub skipped: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub pass: bool,
}

/// Derivative/value L² ratios of random fields localized at scale j must lie
/// in the support bracket [0.75·2^j, (8/3)·2^j]. Zero blocks are skipped.
pub fn bernstein_audit(
    part: &DyadicPartition,
    grid: &GridSpec,
    j: i32,
    trials: usize,
    seed: u64,
) -> Result<BernsteinReport> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let lower = 0.75 * 2f64.powi(j);
    let upper = 8.0 / 3.0 * 2f64.powi(j);
    let mut min_ratio = f64::INFINITY;
    let mut max_ratio = 0.0_f64;
    let mut skipped = 0;
    for _ in 0..trials {
        let samples: Vec<f64> = (0..grid.total_points()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let u = Field::from_samples(grid.clone(), samples)?;
        let v = dyadic_block(&u, j, part)?;
        let denom = v.l2_norm();
        if denom < 1e-14 {
            skipped += 1;
            continue;
        }
        let mut grad_sq = 0.0;
        for axis in 0..grid.dim() {
            grad_sq += MultiplierOp::derivative(grid, axis)?.apply(&v)?.l2_norm().powi(2);
        }
        let ratio = grad_sq.sqrt() / denom;
        min_ratio = min_ratio.min(ratio);
        max_ratio = max_ratio.max(ratio);
    }
    let pass = skipped < trials
        && min_ratio >= lower * (1.0 - 1e-12)
        && max_ratio <= upper * (1.0 + 1e-12);
    Ok(BernsteinReport {
        j,
        trials,
        skipped,
        min_ratio,
        max_ratio,
        lower_bound: lower,
        upper_bound: upper,
        pass,
    })
}

/// ‖R_j‖_{L²} with R_j = Δ_j(u ∂^α v) − u Δ_j ∂^α v, products dealiased.
pub fn commutator_residual(
    u: &Field,
    v: &Field,
    j: i32,
    axis: usize,
    part: &DyadicPartition,
) -> Result<f64> {
    u.same_grid(v)?;
    let dv = MultiplierOp::derivative(u.grid(), axis)?.apply(v)?;
    let r = commutator_field(u, &dv, j, part)?;
    Ok(r.l2_norm())
}

fn commutator_field(u: &Field, w: &Field, j: i32, part: &DyadicPartition) -> Result<Field> {
    let a = dyadic_block(&dealias_product(u, w)?, j, part)?;
    let b = dealias_product(u, &dyadic_block(w, j, part)?)?;
    Ok(a.sub(&b))
}

#[derive(Debug, Clone, Serialize)]
pub struct CommutatorReport {
    pub stacked: f64,
    pub bound_without_constant: f64,
    pub fitted_constant: f64,
}

/// Stack 2^{js}‖R_j‖ in ℓ^r and report the fitted constant against
/// ‖∇u‖_∞‖∇v‖_{B^{s−1}_{2,r}} + ‖∇v‖_∞‖∇u‖_{B^{s−1}_{2,r}} (reported, not
/// asserted).
pub fn commutator_stack_report(
    u: &Field,
    v: &Field,
    axis: usize,
    s: f64,
    r: f64,
    part: &DyadicPartition,
) -> Result<CommutatorReport> {
    let residuals: Vec<f64> = part
        .j_range()
        .map(|j| commutator_residual(u, v, j, axis, part))
        .collect::<Result<_>>()?;
    let stacked = lr_stack(
        residuals.iter().enumerate().map(|(i, n)| 2f64.powf(s * (i as f64 - 1.0)) * n),
        r,
    );
    let spec = BesovSpec::new(s - 1.0, Lp::Two, r)?;
    let mut bound = 0.0;
    for a in 0..u.grid().dim() {
        let da_u = MultiplierOp::derivative(u.grid(), a)?.apply(u)?;
        let da_v = MultiplierOp::derivative(u.grid(), a)?.apply(v)?;
        bound += grad_sup_norm(u)? * besov_norm(&da_v, &spec, part)?
            + grad_sup_norm(v)? * besov_norm(&da_u, &spec, part)?;
    }
    let fitted = if bound > 0.0 { stacked / bound } else { 0.0 };
    Ok(CommutatorReport { stacked, bound_without_constant: bound, fitted_constant: fitted })
}
