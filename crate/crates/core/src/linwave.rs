//! Exact evolution of the low-frequency background under the linear acoustic
//! system  ∂ₜη_L + ∂ₓu_L = 0,  ∂ₜu_L + ∂ₓη_L = 0,  and assembly of the
//! forcing terms fed into the perturbation system:
//!
//!   f_L = −η_L ∂ₓu_L − u_L ∂ₓη_L − b ∂³ₓ u_L,
//!   g_L = −u_L ∂ₓu_L − d ∂³ₓ η_L.
//!
//! In characteristic form η_L ± u_L are pure right/left movers, i.e.
//! 2η_L(t,x) = (η₀(x+t)+η₀(x−t)) − (u₀(x+t)−u₀(x−t)) and
//! 2u_L(t,x) = −(η₀(x+t)−η₀(x−t)) + (u₀(x+t)+u₀(x−t)). Translations are
//! spectral phase shifts, exact for grid-periodic data mode by mode.

use crate::error::{CoreError, Result};
use crate::field::{Field, State};
use crate::grid::GridSpec;
use crate::multiplier::{dealias_product, MultiplierOp};
use num_complex::Complex64;

#[derive(Clone, Debug)]
pub struct WaveBackground {
    eta0: Field,
    u0: Field,
}

impl WaveBackground {
    /// Seed with the low-frequency pair (η₀ˡᵒʷ, u₀ˡᵒʷ).
    pub fn new(low: &State) -> Result<Self> {
        if low.grid().dim() != 1 {
            return Err(CoreError::Config("the wave background is one-dimensional".into()));
        }
        Ok(Self { eta0: low.eta.clone(), u0: low.vel[0].clone() })
    }

    pub fn grid(&self) -> &GridSpec {
        self.eta0.grid()
    }

    /// (η_L, u_L)(t, ·) by exact spectral rotation, mode by mode:
    /// η̂(t) = η̂₀ cos(kt) − i û₀ sin(kt), û(t) = −i η̂₀ sin(kt) + û₀ cos(kt).
    pub fn evolve(&self, t: f64) -> Result<(Field, Field)> {
        let grid = self.grid().clone();
        let n = grid.total_points();
        let mut eta_spec = Vec::with_capacity(n);
        let mut u_spec = Vec::with_capacity(n);
        for idx in 0..n {
            let k = grid.wavenumber(0, idx);
            let (s, c) = (k * t).sin_cos();
            let e0 = self.eta0.spectrum()[idx];
            let v0 = self.u0.spectrum()[idx];
            let i = Complex64::new(0.0, 1.0);
            eta_spec.push(e0 * c - i * v0 * s);
            u_spec.push(-i * e0 * s + v0 * c);
        }
        Ok((Field::from_spectrum(grid.clone(), eta_spec)?, Field::from_spectrum(grid, u_spec)?))
    }

    /// −∂ₓu_L(t), the exact time derivative of η_L.
    pub fn dt_eta(&self, t: f64) -> Result<Field> {
        let (_, u) = self.evolve(t)?;
        Ok(MultiplierOp::derivative(self.grid(), 0)?.apply(&u)?.scale(-1.0))
    }

    /// Forcing pair (f_L, g_L) at time t; third derivatives spectral,
    /// quadratic terms dealiased.
    pub fn forcing(&self, t: f64, b: f64, d: f64) -> Result<(Field, Field)> {
        let (eta, u) = self.evolve(t)?;
        self.forcing_from(&eta, &u, b, d)
    }

    pub fn forcing_from(&self, eta: &Field, u: &Field, b: f64, d: f64) -> Result<(Field, Field)> {
        let grid = self.grid();
        let dx = MultiplierOp::derivative(grid, 0)?;
        let d3 = MultiplierOp::third_derivative(grid, 0)?;
        let eta_x = dx.apply(eta)?;
        let u_x = dx.apply(u)?;
        let f = dealias_product(eta, &u_x)?
            .add(&dealias_product(u, &eta_x)?)
            .add(&d3.apply(u)?.scale(b))
            .scale(-1.0);
        let g = dealias_product(u, &u_x)?.add(&d3.apply(eta)?.scale(d)).scale(-1.0);
        Ok((f, g))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn band_limited(grid: &GridSpec, seed: u64) -> Field {
        // a few low modes, the shape the split produces
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let coefs: Vec<(f64, f64, f64)> =
            (1..=4).map(|m| (m as f64, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let l = grid.lengths()[0];
        Field::from_fn(grid, |x| {
            coefs
                .iter()
                .map(|(m, a, b)| {
                    let k = 2.0 * PI * m / l;
                    a * (k * x[0]).cos() + b * (k * x[0]).sin()
                })
                .sum::<f64>()
                + 0.3
        })
    }

    #[test]
    fn identity_at_time_zero() {
        let grid = GridSpec::new_1d(40.0, 256).unwrap();
        let st = State::new(band_limited(&grid, 1), vec![band_limited(&grid, 2)]).unwrap();
        let bg = WaveBackground::new(&st).unwrap();
        let (e, u) = bg.evolve(0.0).unwrap();
        assert!(e.sub(&st.eta).max_abs() < 1e-13);
        assert!(u.sub(&st.vel[0]).max_abs() < 1e-13);
    }

    #[test]
    fn equal_data_moves_right() {
        // η₀ = u₀ = f → η_L(t,x) = u_L(t,x) = f(x−t) (right mover for this
        // sign convention; the characteristic η+u rides x−t)
        let grid = GridSpec::new_1d(2.0 * PI, 128).unwrap();
        let f = Field::from_fn(&grid, |x| (x[0]).sin() + 0.5 * (2.0 * x[0]).cos());
        let st = State::new(f.clone(), vec![f.clone()]).unwrap();
        let bg = WaveBackground::new(&st).unwrap();
        let t = 0.7;
        let (e, u) = bg.evolve(t).unwrap();
        let shifted = Field::from_fn(&grid, |x| (x[0] - t).sin() + 0.5 * (2.0 * (x[0] - t)).cos());
        assert!(e.sub(&shifted).max_abs() < 1e-12);
        assert!(u.sub(&shifted).max_abs() < 1e-12);
    }

    #[test]
    fn solves_the_acoustic_system() {
        // centered finite difference in t vs −∂ₓ of the partner
        let grid = GridSpec::new_1d(30.0, 256).unwrap();
        let st = State::new(band_limited(&grid, 3), vec![band_limited(&grid, 4)]).unwrap();
        let bg = WaveBackground::new(&st).unwrap();
        let (t, dt) = (1.3, 1e-5);
        let (ep, up) = bg.evolve(t + dt).unwrap();
        let (em, um) = bg.evolve(t - dt).unwrap();
        let (e, u) = bg.evolve(t).unwrap();
        let dx = MultiplierOp::derivative(&grid, 0).unwrap();
        let dte = ep.sub(&em).scale(0.5 / dt);
        let dtu = up.sub(&um).scale(0.5 / dt);
        assert!(dte.add(&dx.apply(&u).unwrap()).max_abs() < 1e-7);
        assert!(dtu.add(&dx.apply(&e).unwrap()).max_abs() < 1e-7);
    }

    #[test]
    fn discrete_energy_constant_over_long_times() {
        let grid = GridSpec::new_1d(40.0, 256).unwrap();
        let st = State::new(band_limited(&grid, 5), vec![band_limited(&grid, 6)]).unwrap();
        let bg = WaveBackground::new(&st).unwrap();
        let e0 = {
            let (e, u) = bg.evolve(0.0).unwrap();
            e.l2_norm().powi(2) + u.l2_norm().powi(2)
        };
        for step in 1..=10 {
            let t = 5.0 * step as f64; // up to t = 50
            let (e, u) = bg.evolve(t).unwrap();
            let en = e.l2_norm().powi(2) + u.l2_norm().powi(2);
            assert!((en - e0).abs() < 1e-12 * e0, "t={t}: {en} vs {e0}");
        }
    }

    #[test]
    fn semigroup_property() {
        let grid = GridSpec::new_1d(40.0, 256).unwrap();
        let st = State::new(band_limited(&grid, 7), vec![band_limited(&grid, 8)]).unwrap();
        let bg = WaveBackground::new(&st).unwrap();
        let (t1, t2) = (2.3, 4.1);
        let (e_direct, u_direct) = bg.evolve(t1 + t2).unwrap();
        let (e1, u1) = bg.evolve(t1).unwrap();
        let bg2 = WaveBackground::new(&State::new(e1, vec![u1]).unwrap()).unwrap();
        let (e_two, u_two) = bg2.evolve(t2).unwrap();
        assert!(e_direct.sub(&e_two).max_abs() < 1e-12);
        assert!(u_direct.sub(&u_two).max_abs() < 1e-12);
    }

    #[test]
    fn derivative_besov_norms_time_independent() {
        use crate::lp::{besov_norm_pair, BesovSpec, DyadicPartition, Lp};
        let grid = GridSpec::new_1d(40.0, 256).unwrap();
        let part = DyadicPartition::new(&grid).unwrap();
        let st = State::new(band_limited(&grid, 9), vec![band_limited(&grid, 10)]).unwrap();
        let bg = WaveBackground::new(&st).unwrap();
        let dx = MultiplierOp::derivative(&grid, 0).unwrap();
        let spec = BesovSpec::new(1.5, Lp::Two, 2.0).unwrap();
        let norm_at = |t: f64| {
            let (e, u) = bg.evolve(t).unwrap();
            besov_norm_pair(&[&dx.apply(&e).unwrap(), &dx.apply(&u).unwrap()], &spec, &part).unwrap()
        };
        let n0 = norm_at(0.0);
        for t in [0.5, 3.0, 17.0] {
            assert!((norm_at(t) - n0).abs() < 1e-10 * n0);
        }
    }

    #[test]
    fn forcings_vanish_for_zero_and_constant_backgrounds() {
        let grid = GridSpec::new_1d(40.0, 128).unwrap();
        let z = State::zeros(&grid);
        let bg = WaveBackground::new(&z).unwrap();
        let (f, g) = bg.forcing(1.0, 1.0 / 6.0, 1.0 / 6.0).unwrap();
        assert_eq!(f.max_abs(), 0.0);
        assert_eq!(g.max_abs(), 0.0);
        let c = State::new(Field::constant(&grid, 3.0), vec![Field::zeros(&grid)]).unwrap();
        let bgc = WaveBackground::new(&c).unwrap();
        let (fc, gc) = bgc.forcing(2.0, 1.0 / 6.0, 1.0 / 6.0).unwrap();
        assert!(fc.max_abs() < 1e-13);
        assert!(gc.max_abs() < 1e-13);
    }

    #[test]
    fn forcings_match_finite_difference_oracle() {
        // single-mode background, 6th-order finite differences for ∂ₓ and ∂³ₓ
        let grid = GridSpec::new_1d(2.0 * PI, 256).unwrap();
        let st = State::new(
            Field::from_fn(&grid, |x| 0.4 * (x[0]).cos()),
            vec![Field::from_fn(&grid, |x| 0.3 * (x[0]).sin())],
        )
        .unwrap();
        let bg = WaveBackground::new(&st).unwrap();
        let (b, d) = (1.0 / 6.0, 0.2);
        let t = 0.9;
        let (f, g) = bg.forcing(t, b, d).unwrap();
        let (eta, u) = bg.evolve(t).unwrap();

        let h = grid.spacing(0);
        let n = grid.points()[0];
        let idx = |i: i64| ((i % n as i64 + n as i64) % n as i64) as usize;
        let d1 = |s: &[f64], i: i64| {
            (-s[idx(i - 3)] / 60.0 + 3.0 * s[idx(i - 2)] / 20.0 - 3.0 * s[idx(i - 1)] / 4.0
                + 3.0 * s[idx(i + 1)] / 4.0
                - 3.0 * s[idx(i + 2)] / 20.0
                + s[idx(i + 3)] / 60.0)
                / h
        };
        let d3 = |s: &[f64], i: i64| {
            (s[idx(i - 3)] / 8.0 - s[idx(i - 2)] + 13.0 * s[idx(i - 1)] / 8.0
                - 13.0 * s[idx(i + 1)] / 8.0
                + s[idx(i + 2)]
                - s[idx(i + 3)] / 8.0)
                / (h * h * h)
        };
        let es = eta.samples();
        let us = u.samples();
        for i in (0..n as i64).step_by(17) {
            let want_f = -(es[idx(i)] * d1(us, i) + us[idx(i)] * d1(es, i) + b * d3(us, i));
            let want_g = -(us[idx(i)] * d1(us, i) + d * d3(es, i));
            assert!((f.samples()[idx(i)] - want_f).abs() < 1e-8, "f at {i}");
            assert!((g.samples()[idx(i)] - want_g).abs() < 1e-8, "g at {i}");
        }
    }
}
