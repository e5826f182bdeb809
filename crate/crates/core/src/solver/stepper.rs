//! Classical four-stage Runge-Kutta stepping and the instrumented run loop.

use crate::diag::{buffer_leak, modified_energies, Ledger, LedgerSample};
use crate::error::{CoreError, Result};
use crate::field::State;
use crate::grid::GridSpec;
use crate::lp::{
    besov_p2_multi, block_energies, stack_blocks, sup_norm_u, DyadicPartition, EnergyWeights,
};
use crate::solver::coeffs::{CoeffFields, CoeffSource};
use crate::solver::params::{ModelParams, SolverConfig};
use crate::solver::rhs::RhsCtx;
use num_complex::Complex64;
use serde::Serialize;
use std::time::Instant;

pub struct Solver {
    pub grid: GridSpec,
    pub params: ModelParams,
    pub config: SolverConfig,
    ctx: RhsCtx,
}

/// Buffer-contamination policy: the run is invalidated when the leak exceeds
/// `abs_threshold`·(interior max) and has grown past `baseline_factor`× its
/// initial level (the initial tail is a property of the data, not junk).
#[derive(Clone, Debug)]
pub struct BufferGuard {
    pub zone: crate::bore::BufferZone,
    pub halt: bool,
    pub abs_threshold: f64,
    pub baseline_factor: f64,
}

impl BufferGuard {
    pub fn new(zone: crate::bore::BufferZone, halt: bool) -> Self {
        Self { zone, halt, abs_threshold: 1e-4, baseline_factor: 10.0 }
    }
}

pub struct RunSetup<'p> {
    pub weights: EnergyWeights,
    pub part: &'p DyadicPartition,
    pub r: f64,
    pub stride: f64,
    /// compute the modified energies N_j per sample (needs block transforms)
    pub track_blocks: bool,
    /// halt once U_s exceeds this value
    pub threshold: Option<f64>,
    pub buffer: Option<BufferGuard>,
    pub snapshot_times: Vec<f64>,
    pub snapshot_every_step: bool,
}

impl<'p> RunSetup<'p> {
    pub fn new(weights: EnergyWeights, part: &'p DyadicPartition, r: f64, stride: f64) -> Self {
        Self {
            weights,
            part,
            r,
            stride,
            track_blocks: true,
            threshold: None,
            buffer: None,
            snapshot_times: Vec::new(),
            snapshot_every_step: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Termination {
    /// reached t_end
    Horizon,
    ThresholdCrossed { t: f64 },
    BlowUp { t: f64 },
    Contaminated { t: f64 },
}

#[derive(Debug)]
pub struct RunOutcome {
    pub final_state: State,
    pub final_t: f64,
    pub ledger: Ledger,
    pub termination: Termination,
    pub snapshots: Vec<(f64, State)>,
    pub wall_seconds: f64,
}

/// Per-sample hook: (t, state, rhs at t, sample under construction).
pub type SampleHook<'h> = &'h mut dyn FnMut(f64, &State, &State, &mut LedgerSample) -> Result<()>;

impl Solver {
    pub fn new(grid: &GridSpec, params: &ModelParams, config: &SolverConfig) -> Result<Self> {
        config.validate(grid, params)?;
        Ok(Self {
            grid: grid.clone(),
            params: *params,
            config: config.clone(),
            ctx: RhsCtx::new(grid, params, config)?,
        })
    }

    pub fn rhs(&self, state: &State, coeffs: &CoeffFields, t: f64) -> Result<State> {
        self.ctx.eval(state, coeffs, t)
    }

    pub fn rhs_at(&self, state: &State, t: f64, src: &mut dyn CoeffSource) -> Result<State> {
        let coeffs = src.eval(t, &self.grid)?;
        self.ctx.eval(state, &coeffs, t)
    }

    /// One classical RK4 step from t to t + dt.
    pub fn step(&self, state: &State, t: f64, dt: f64, src: &mut dyn CoeffSource) -> Result<State> {
        let c0 = src.eval(t, &self.grid)?;
        let c1 = src.eval(t + 0.5 * dt, &self.grid)?;
        let c2 = src.eval(t + dt, &self.grid)?;
        let k1 = self.ctx.eval(state, &c0, t)?;
        let k2 = self.ctx.eval(&state.add_scaled(0.5 * dt, &k1), &c1, t + 0.5 * dt)?;
        let k3 = self.ctx.eval(&state.add_scaled(0.5 * dt, &k2), &c1, t + 0.5 * dt)?;
        let k4 = self.ctx.eval(&state.add_scaled(dt, &k3), &c2, t + dt)?;
        let mut incr = k1;
        incr = incr.add_scaled(2.0, &k2);
        incr = incr.add_scaled(2.0, &k3);
        incr = incr.add(&k4);
        Ok(state.add_scaled(dt / 6.0, &incr))
    }

    /// Run to t_end recording the ledger; halts on blow-up, threshold
    /// crossing or buffer contamination.
    pub fn run(
        &self,
        init: &State,
        src: &mut dyn CoeffSource,
        setup: &RunSetup,
        mut hook: Option<SampleHook>,
    ) -> Result<RunOutcome> {
        let start = Instant::now();
        let dt = self.config.dt;
        let t_end = self.config.t_end;
        let n_full = (t_end / dt + 1e-9).floor() as usize;
        let rem = t_end - n_full as f64 * dt;
        let has_rem = rem > 1e-9 * dt.max(t_end);
        let total_steps = n_full + usize::from(has_rem);
        let sample_every = ((setup.stride / dt).round() as usize).max(1);

        let mut ledger = Ledger::default();
        let mut snapshots: Vec<(f64, State)> = Vec::new();
        let mut snap_taken = vec![false; setup.snapshot_times.len()];
        let mut state = init.clone();
        let mut termination = Termination::Horizon;
        let mut leak_baseline: Option<f64> = None;

        let record =
            |t: f64,
             state: &State,
             src: &mut dyn CoeffSource,
             ledger: &mut Ledger,
             hook: &mut Option<SampleHook>,
             leak_baseline: &mut Option<f64>|
             -> Result<Option<Termination>> {
                let coeffs = src.eval(t, &self.grid)?;
                let rhs = self.ctx.eval(state, &coeffs, t)?;
                let mut sample = self.build_sample(t, state, &rhs, &coeffs, setup, ledger)?;
                if let Some(h) = hook.as_mut() {
                    h(t, state, &rhs, &mut sample)?;
                }
                if !sample.finite() {
                    return Ok(Some(Termination::BlowUp { t }));
                }
                let mut verdict = None;
                if let Some(th) = setup.threshold {
                    if sample.u_s > th {
                        verdict = Some(Termination::ThresholdCrossed { t });
                    }
                }
                if let Some(guard) = &setup.buffer {
                    let leak = sample.buffer_leak;
                    let interior = sample.interior_high_max;
                    let base = *leak_baseline.get_or_insert(leak);
                    if guard.halt
                        && verdict.is_none()
                        && leak > guard.abs_threshold * interior.max(1e-300)
                        && leak > guard.baseline_factor * base
                    {
                        verdict = Some(Termination::Contaminated { t });
                    }
                }
                ledger.push(sample);
                Ok(verdict)
            };

        // t = 0 sample
        if let Some(v) = record(0.0, &state, src, &mut ledger, &mut hook, &mut leak_baseline)? {
            return Ok(RunOutcome {
                final_state: state,
                final_t: 0.0,
                ledger,
                termination: v,
                snapshots,
                wall_seconds: start.elapsed().as_secs_f64(),
            });
        }
        if setup.snapshot_every_step {
            snapshots.push((0.0, state.clone()));
        }
        self.take_snapshots(0.0, dt, &state, setup, &mut snap_taken, &mut snapshots);

        let mut t = 0.0;
        for istep in 0..total_steps {
            let dt_i = if istep == n_full { rem } else { dt };
            match self.step(&state, t, dt_i, src) {
                Ok(next) => state = next,
                Err(CoreError::BlowUp { t: tb }) => {
                    termination = Termination::BlowUp { t: tb };
                    break;
                }
                Err(e) => return Err(e),
            }
            t = if istep == n_full { t_end } else { (istep + 1) as f64 * dt };
            if !state.is_finite() {
                termination = Termination::BlowUp { t };
                break;
            }
            if setup.snapshot_every_step {
                snapshots.push((t, state.clone()));
            }
            self.take_snapshots(t, dt, &state, setup, &mut snap_taken, &mut snapshots);

            let is_last = istep + 1 == total_steps;
            if (istep + 1) % sample_every == 0 || is_last {
                match record(t, &state, src, &mut ledger, &mut hook, &mut leak_baseline) {
                    Ok(Some(v)) => {
                        termination = v;
                        break;
                    }
                    Ok(None) => {}
                    Err(CoreError::BlowUp { t: tb }) => {
                        termination = Termination::BlowUp { t: tb };
                        break;
                    }
                    Err(e) => return Err(e),
                }
            }
        }

        Ok(RunOutcome {
            final_state: state,
            final_t: t,
            ledger,
            termination,
            snapshots,
            wall_seconds: start.elapsed().as_secs_f64(),
        })
    }

    fn take_snapshots(
        &self,
        t: f64,
        dt: f64,
        state: &State,
        setup: &RunSetup,
        taken: &mut [bool],
        out: &mut Vec<(f64, State)>,
    ) {
        for (i, &ts) in setup.snapshot_times.iter().enumerate() {
            if !taken[i] && (t - ts).abs() <= 0.5 * dt + 1e-12 {
                taken[i] = true;
                out.push((t, state.clone()));
            }
        }
    }

    fn build_sample(
        &self,
        t: f64,
        state: &State,
        rhs: &State,
        coeffs: &CoeffFields,
        setup: &RunSetup,
        ledger: &Ledger,
    ) -> Result<LedgerSample> {
        let u_j = block_energies(state, &setup.weights, setup.part)?;
        let u_s = stack_blocks(&u_j, setup.weights.s, setup.r);
        let (n_j, positivity_ok) = if setup.track_blocks {
            let me = modified_energies(state, &setup.weights, coeffs.h.as_ref(), setup.part)?;
            (me.n_j, me.window_ok)
        } else {
            (Vec::new(), true)
        };
        let u_inf = sup_norm_u(state)?;
        let blowup_integral = match ledger.last() {
            None => 0.0,
            Some(prev) => prev.blowup_integral + 0.5 * (prev.u_inf + u_inf) * (t - prev.t),
        };
        let (leak, interior) = match &setup.buffer {
            None => (0.0, 0.0),
            Some(g) => buffer_leak(state, &g.zone, setup.part)?,
        };
        let f_s = self.forcing_norm(coeffs, setup)?;
        let w_s = self.coefficient_norm(coeffs, setup)?;
        Ok(LedgerSample {
            t,
            u_s,
            u_j,
            n_j,
            positivity_ok,
            max_eta: state.eta.max_abs(),
            dt_eta_inf: rhs.eta.max_abs(),
            dt_eta_pert: rhs.eta.max_abs(),
            u_inf,
            blowup_integral,
            buffer_leak: leak,
            interior_high_max: interior,
            f_s,
            w_s,
            e_norm_composed: None,
        })
    }

    /// F_s(t) = ‖(f,g)‖_{B^s_{2,r}}.
    fn forcing_norm(&self, coeffs: &CoeffFields, setup: &RunSetup) -> Result<f64> {
        let mut spectra: Vec<&[Complex64]> = Vec::new();
        if let Some(f) = &coeffs.f {
            spectra.push(f.spectrum());
        }
        if let Some(g) = &coeffs.g {
            for c in g {
                spectra.push(c.spectrum());
            }
        }
        if spectra.is_empty() {
            return Ok(0.0);
        }
        Ok(besov_p2_multi(&self.grid, &spectra, setup.weights.s, setup.r, setup.part))
    }

    /// 𝒲_s(t) = ‖h‖_∞ + ‖∇h‖_{B^s} + ‖∂ₜh‖_∞ + Σᵢ(‖Wᵢ‖_∞ + ‖∇Wᵢ‖_{B^s}).
    fn coefficient_norm(&self, coeffs: &CoeffFields, setup: &RunSetup) -> Result<f64> {
        let grid = &self.grid;
        let dim = grid.dim();
        let grad_spec = |f: &crate::field::Field, axis: usize| -> Vec<Complex64> {
            (0..grid.total_points())
                .map(|i| {
                    let ij = grid.unflatten(i);
                    let k = if grid.is_nyquist(axis, ij[axis]) {
                        0.0
                    } else {
                        grid.wavenumber(axis, ij[axis])
                    };
                    Complex64::new(0.0, k) * f.spectrum()[i]
                })
                .collect()
        };
        let grad_besov = |fields: &[&crate::field::Field]| -> f64 {
            let mut specs: Vec<Vec<Complex64>> = Vec::new();
            for f in fields {
                for axis in 0..dim {
                    specs.push(grad_spec(f, axis));
                }
            }
            let refs: Vec<&[Complex64]> = specs.iter().map(|v| v.as_slice()).collect();
            besov_p2_multi(grid, &refs, setup.weights.s, setup.r, setup.part)
        };
        let mut total = 0.0;
        if let Some(h) = &coeffs.h {
            total += h.max_abs() + grad_besov(&[h]);
        }
        if let Some(dth) = &coeffs.dt_h {
            total += dth.max_abs();
        }
        for w in [&coeffs.w1, &coeffs.w2, &coeffs.w3].into_iter().flatten() {
            let refs: Vec<&crate::field::Field> = w.iter().collect();
            total += w.iter().fold(0.0_f64, |m, c| m.max(c.max_abs())) + grad_besov(&refs);
        }
        Ok(total)
    }
}
