//! The ε-weighted block energies and stacked norms.
//!
//! Per block, `U_j²(η,V) = ∫ |η_j|² + εb Σ_k|∂_k η_j|² + Σ_k|V_j^k|² +
//! εd Σ_{k,l}|∂_l V_j^k|²`, and the stacked norm is `U_s = ‖(2^{js} U_j)_j‖_{ℓ^r}`.
//! All integrals are evaluated spectrally (Parseval), one pass per field.

use crate::error::{CoreError, Result};
use crate::field::{Field, State};
use crate::lp::besov::lr_stack;
use crate::lp::partition::DyadicPartition;
use crate::multiplier::gradient;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct EnergyWeights {
    pub b: f64,
    pub d: f64,
    pub eps: f64,
    pub s: f64,
}

impl EnergyWeights {
    pub fn new(b: f64, d: f64, eps: f64, s: f64) -> Result<Self> {
        if b < 0.0 || d < 0.0 {
            return Err(CoreError::Domain("b and d must be nonnegative".into()));
        }
        if !(0.0..=1.0).contains(&eps) {
            return Err(CoreError::Domain(format!("eps must lie in [0,1], got {eps}")));
        }
        Ok(Self { b, d, eps, s })
    }

    fn sgn(x: f64) -> f64 {
        if x > 0.0 {
            1.0
        } else {
            0.0
        }
    }

    /// s + sgn(b)
    pub fn s_b(&self) -> f64 {
        self.s + Self::sgn(self.b)
    }

    /// s + sgn(d)
    pub fn s_d(&self) -> f64 {
        self.s + Self::sgn(self.d)
    }

    /// b + d > 0 and ε > 0, the hypotheses of the long-time statements.
    pub fn validate_for_theorem(&self) -> Result<()> {
        if self.b + self.d <= 0.0 {
            return Err(CoreError::Domain("theorem mode requires b + d > 0".into()));
        }
        if self.eps <= 0.0 {
            return Err(CoreError::Domain("theorem mode requires eps > 0".into()));
        }
        Ok(())
    }
}

/// All block energies U_j for j in the admissible range, in one spectrum pass.
pub fn block_energies(state: &State, w: &EnergyWeights, part: &DyadicPartition) -> Result<Vec<f64>> {
    let grid = state.grid();
    if grid != part.grid() {
        return Err(CoreError::GridMismatch("state and partition grids differ".into()));
    }
    let norm_factor = grid.cell_volume() / grid.total_points() as f64;
    let n_blocks = (part.j_max() + 1 - super::J_MIN) as usize;
    let mut acc = vec![0.0_f64; n_blocks];
    let n = grid.total_points();

    let mut add_field = |f: &Field, grad_weight: f64| {
        for idx in 0..n {
            let z2 = f.spectrum()[idx].norm_sqr();
            if z2 == 0.0 {
                continue;
            }
            // gradient terms follow the discrete derivative (Nyquist zeroed)
            let k2 = grid.k_norm_deriv(idx).powi(2);
            let contrib = z2 * (1.0 + grad_weight * k2);
            for (bi, j) in part.j_range().enumerate() {
                let m = part.block_weights(j).expect("in range")[idx];
                if m != 0.0 {
                    acc[bi] += m * m * contrib;
                }
            }
        }
    };

    add_field(&state.eta, w.eps * w.b);
    for v in &state.vel {
        add_field(v, w.eps * w.d);
    }
    Ok(acc.iter().map(|a| (a * norm_factor).sqrt()).collect())
}

/// Single block energy U_j (zero for j outside the admissible range).
pub fn block_energy(state: &State, j: i32, w: &EnergyWeights, part: &DyadicPartition) -> Result<f64> {
    if j < super::J_MIN || j > part.j_max() {
        return Ok(0.0);
    }
    let all = block_energies(state, w, part)?;
    Ok(all[(j - super::J_MIN) as usize])
}

/// The stacked norm U_s = ‖(2^{js} U_j)_j‖_{ℓ^r} (the X^{s,ε}_{b,d,r} norm).
pub fn stacked_norm(state: &State, w: &EnergyWeights, part: &DyadicPartition, r: f64) -> Result<f64> {
    let blocks = block_energies(state, w, part)?;
    Ok(stack_blocks(&blocks, w.s, r))
}

/// Stack precomputed block energies (index 0 is j = −1).
pub fn stack_blocks(blocks: &[f64], s: f64, r: f64) -> f64 {
    lr_stack(
        blocks.iter().enumerate().map(|(i, u)| 2f64.powf(s * (i as f64 - 1.0)) * u),
        r,
    )
}

/// E-norm: ‖(η,V)‖_∞ + (Σ_k ‖(∂_k η, ∂_k V)‖²_{X^{s−1,ε}})^{1/2}.
pub fn e_norm(state: &State, w: &EnergyWeights, part: &DyadicPartition, r: f64) -> Result<f64> {
    let sup = state.max_abs();
    let wm1 = EnergyWeights { s: w.s - 1.0, ..*w };
    let mut deriv_sq = 0.0;
    for axis in 0..state.grid().dim() {
        let op = crate::multiplier::MultiplierOp::derivative(state.grid(), axis)?;
        let deta = op.apply(&state.eta)?;
        let dvel: Vec<Field> = state.vel.iter().map(|v| op.apply(v)).collect::<Result<_>>()?;
        let ds = State::new(deta, dvel)?;
        deriv_sq += stacked_norm(&ds, &wm1, part, r)?.powi(2);
    }
    Ok(sup + deriv_sq.sqrt())
}

/// M-norm of a decomposed 2D state: E-norm of the 1D background plus X-norm
/// of the 2D remainder.
pub fn m_norm(
    bg_1d: &State,
    pert_2d: &State,
    sigma_weights: &EnergyWeights,
    s_weights: &EnergyWeights,
    part_1d: &DyadicPartition,
    part_2d: &DyadicPartition,
    r: f64,
) -> Result<f64> {
    let e = e_norm(bg_1d, sigma_weights, part_1d, r)?;
    let x = stacked_norm(pert_2d, s_weights, part_2d, r)?;
    Ok(e + x)
}

/// U(t) = ‖(η, ∇η, V, ∇V)‖_{L^∞} (p₂ = ∞ throughout).
pub fn sup_norm_u(state: &State) -> Result<f64> {
    let mut m = state.max_abs();
    m = m.max(grad_sup_norm(&state.eta)?);
    for v in &state.vel {
        m = m.max(grad_sup_norm(v)?);
    }
    Ok(m)
}

/// max_k ‖∂_k f‖_∞
pub fn grad_sup_norm(f: &Field) -> Result<f64> {
    Ok(gradient(f)?.iter().fold(0.0, |m, g| m.max(g.max_abs())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn random_state(grid: &GridSpec, seed: u64) -> State {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut mk = || {
            let s: Vec<f64> = (0..grid.total_points()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            Field::from_samples(grid.clone(), s).unwrap()
        };
        let eta = mk();
        let vel = (0..grid.dim()).map(|_| mk()).collect();
        State::new(eta, vel).unwrap()
    }

    #[test]
    fn zero_state_zero_energy() {
        let grid = GridSpec::new_1d(2.0 * PI, 64).unwrap();
        let part = DyadicPartition::new(&grid).unwrap();
        let w = EnergyWeights::new(0.5, 0.5, 0.3, 2.0).unwrap();
        let z = State::zeros(&grid);
        for j in part.j_range() {
            assert_eq!(block_energy(&z, j, &w, &part).unwrap(), 0.0);
        }
        assert_eq!(stacked_norm(&z, &w, &part, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn b_d_zero_reduces_to_l2_blocks() {
        let grid = GridSpec::new_1d(7.0, 64).unwrap();
        let part = DyadicPartition::new(&grid).unwrap();
        let w = EnergyWeights::new(0.0, 0.0, 0.7, 1.0).unwrap();
        let st = random_state(&grid, 1);
        for j in part.j_range() {
            let u = block_energy(&st, j, &w, &part).unwrap();
            let eta_j = crate::lp::dyadic_block(&st.eta, j, &part).unwrap();
            let v_j = crate::lp::dyadic_block(&st.vel[0], j, &part).unwrap();
            let l2 = (eta_j.l2_norm().powi(2) + v_j.l2_norm().powi(2)).sqrt();
            assert!((u - l2).abs() < 1e-11 * (1.0 + l2));
        }
    }

    #[test]
    fn cos_2x_block_energy_matches_analytic_integral() {
        // η = cos 2x, V = 0, b = 1, d = 0, ε = 0.25, L = 2π:
        // Σ_j U_j² = ∫cos²(2x) + 0.25 ∫(2 sin 2x)² = π + 0.25·4π = 2π
        let grid = GridSpec::new_1d(2.0 * PI, 64).unwrap();
        let part = DyadicPartition::new(&grid).unwrap();
        let w = EnergyWeights::new(1.0, 0.0, 0.25, 2.0).unwrap();
        let eta = Field::from_fn(&grid, |x| (2.0 * x[0]).cos());
        let st = State::new(eta, vec![Field::zeros(&grid)]).unwrap();
        let total: f64 = block_energies(&st, &w, &part).unwrap().iter().map(|u| u * u).sum();
        assert!((total - 2.0 * PI).abs() < 1e-12, "got {total}");
    }

    #[test]
    fn stacked_norm_monotone_in_eps() {
        let grid = GridSpec::new_1d(5.0, 64).unwrap();
        let part = DyadicPartition::new(&grid).unwrap();
        for seed in 0..10 {
            let st = random_state(&grid, seed);
            let w1 = EnergyWeights::new(0.4, 0.7, 0.1, 1.5).unwrap();
            let w2 = EnergyWeights::new(0.4, 0.7, 0.2, 1.5).unwrap();
            let a = stacked_norm(&st, &w1, &part, 2.0).unwrap();
            let b = stacked_norm(&st, &w2, &part, 2.0).unwrap();
            assert!(a <= b + 1e-14);
        }
    }

    #[test]
    fn eps_zero_equals_besov_of_pair() {
        let grid = GridSpec::new_1d(5.0, 64).unwrap();
        let part = DyadicPartition::new(&grid).unwrap();
        let st = random_state(&grid, 3);
        let w = EnergyWeights::new(0.4, 0.7, 0.0, 1.25).unwrap();
        let a = stacked_norm(&st, &w, &part, 2.0).unwrap();
        let spec = crate::lp::BesovSpec::new(1.25, crate::lp::Lp::Two, 2.0).unwrap();
        let b = crate::lp::besov_norm_pair(&[&st.eta, &st.vel[0]], &spec, &part).unwrap();
        assert!((a - b).abs() < 1e-12 * (1.0 + b));
    }

    #[test]
    fn e_norm_of_constant_state() {
        let grid = GridSpec::new_1d(2.0 * PI, 64).unwrap();
        let part = DyadicPartition::new(&grid).unwrap();
        let w = EnergyWeights::new(0.5, 0.5, 0.5, 2.0).unwrap();
        let st = State::new(Field::constant(&grid, -1.75), vec![Field::zeros(&grid)]).unwrap();
        let e = e_norm(&st, &w, &part, 2.0).unwrap();
        assert!((e - 1.75).abs() < 1e-12);
    }

    #[test]
    fn e_norm_triangle_inequality() {
        let grid = GridSpec::new_1d(9.0, 64).unwrap();
        let part = DyadicPartition::new(&grid).unwrap();
        let w = EnergyWeights::new(1.0 / 6.0, 1.0 / 6.0, 0.5, 2.0).unwrap();
        for seed in 0..10 {
            let a = random_state(&grid, seed);
            let b = random_state(&grid, seed + 100);
            let ea = e_norm(&a, &w, &part, 2.0).unwrap();
            let eb = e_norm(&b, &w, &part, 2.0).unwrap();
            let eab = e_norm(&a.add(&b), &w, &part, 2.0).unwrap();
            assert!(eab <= ea + eb + 1e-10);
        }
    }

    #[test]
    fn block_energy_linear_in_eps_with_gradient_slope() {
        // U_j(ε)² = U_j(0)² + ε(b‖∇η_j‖² + d‖∇V_j‖²) exactly
        let grid = GridSpec::new_1d(9.0, 64).unwrap();
        let part = DyadicPartition::new(&grid).unwrap();
        let st = random_state(&grid, 5);
        let (b, d, s) = (0.7, 0.2, 1.0);
        let w0 = EnergyWeights::new(b, d, 0.0, s).unwrap();
        let we = EnergyWeights::new(b, d, 0.25, s).unwrap();
        let u0 = block_energies(&st, &w0, &part).unwrap();
        let ue = block_energies(&st, &we, &part).unwrap();
        for (bi, j) in part.j_range().enumerate() {
            let eta_j = crate::lp::dyadic_block(&st.eta, j, &part).unwrap();
            let v_j = crate::lp::dyadic_block(&st.vel[0], j, &part).unwrap();
            let ge = crate::multiplier::gradient(&eta_j).unwrap()[0].l2_norm().powi(2);
            let gv = crate::multiplier::gradient(&v_j).unwrap()[0].l2_norm().powi(2);
            let slope = b * ge + d * gv;
            let lhs = ue[bi].powi(2) - u0[bi].powi(2);
            assert!(
                (lhs - 0.25 * slope).abs() < 1e-12 * (1.0 + lhs.abs()),
                "block {j}: {lhs} vs {}",
                0.25 * slope
            );
        }
    }

    #[test]
    fn weights_validation() {
        assert!(EnergyWeights::new(-0.1, 0.0, 0.5, 1.0).is_err());
        assert!(EnergyWeights::new(0.1, 0.0, 1.5, 1.0).is_err());
        let w = EnergyWeights::new(0.0, 0.3, 0.5, 1.0).unwrap();
        assert_eq!(w.s_b(), 1.0);
        assert_eq!(w.s_d(), 2.0);
        w.validate_for_theorem().unwrap();
        let w0 = EnergyWeights::new(0.0, 0.0, 0.5, 1.0).unwrap();
        assert!(w0.validate_for_theorem().is_err());
    }
}
