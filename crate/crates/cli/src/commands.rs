//! Command implementations behind the CLI surface.

use crate::svg::Plot;
use anyhow::{bail, Context, Result};
use borewave::bore::{make_bore, BoreField, BoreProfile, ProfileKind};
use borewave::field::{Field, State};
use borewave::io::{
    read_field_binary, write_field_binary, write_field_csv, FittedConstants, NormReport,
    Pipeline, RunConfig, RunRecord,
};
use borewave::lp::{
    besov_norm_with_tail, e_norm, stacked_norm, BesovSpec, DyadicPartition, EnergyWeights, Lp,
};
use borewave::solver::*;
use borewave::GridSpec;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Clone, Debug, Default)]
pub struct GlobalOpts {
    pub out: Option<PathBuf>,
    pub threads: usize,
    pub seed: u64,
    pub quiet: bool,
}

macro_rules! info {
    ($g:expr, $($arg:tt)*) => {
        if !$g.quiet {
            println!($($arg)*);
        }
    };
}

#[derive(Debug)]
pub struct RunSummary {
    pub exit_code: i32,
    pub record: RunRecord,
}

fn artifact_version() -> String {
    format!("borewave-{}", env!("CARGO_PKG_VERSION"))
}

fn ensure_out(g: &GlobalOpts) -> Result<Option<PathBuf>> {
    match &g.out {
        None => Ok(None),
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            Ok(Some(dir.clone()))
        }
    }
}

fn build_bore(cfg: &RunConfig, grid: &GridSpec) -> Result<(BoreField, BoreField)> {
    let kind = match cfg.init.kind.as_str() {
        "tanh" => ProfileKind::Tanh,
        "smoothed-step" => ProfileKind::SmoothedStep,
        other => bail!("config error: init.kind '{other}' is not a bore profile"),
    };
    let profile = BoreProfile {
        kind,
        eta_minus: cfg.init.eta_minus,
        eta_plus: cfg.init.eta_plus,
        steepness: cfg.init.steepness,
        center: cfg.init.center,
    };
    let eta0 = make_bore(&profile, grid)?;
    let u0 = match &cfg.init.velocity {
        None => make_bore(&BoreProfile::constant(0.0), grid)?,
        Some(v) => match v.kind.as_str() {
            "zero" => make_bore(&BoreProfile::constant(0.0), grid)?,
            "tanh" => make_bore(
                &BoreProfile::tanh(v.eta_minus, v.eta_plus, v.steepness, v.center),
                grid,
            )?,
            other => bail!("config error: velocity.kind '{other}' unsupported"),
        },
    };
    Ok((eta0, u0))
}

fn gaussian_from(cfg: &RunConfig, grid: &GridSpec) -> Result<Field> {
    let p = cfg
        .init
        .perturbation
        .as_ref()
        .context("config error: missing field init.perturbation for gaussian data")?;
    let cx = p.center.first().copied().unwrap_or(0.0);
    let cy = p.center.get(1).copied().unwrap_or(0.0);
    let w2 = p.width * p.width;
    Ok(Field::from_fn(grid, |x| {
        let mut r2 = (x[0] - cx).powi(2);
        if x.len() > 1 {
            r2 += (x[1] - cy).powi(2);
        }
        p.amplitude * (-r2 / w2).exp()
    }))
}

fn pipeline_opts(cfg: &RunConfig) -> PipelineOptions {
    let mut opts =
        PipelineOptions::new(cfg.ledger.s, cfg.ledger.r, cfg.ledger.stride);
    opts.track_blocks = cfg.ledger.track_blocks;
    opts.threshold_on = cfg.threshold.enabled;
    opts.halt_on_contamination = cfg.threshold.halt_on_contamination;
    opts.snapshot_times = cfg.solver.snapshots.clone();
    opts
}

struct Executed {
    outcome: RunOutcome,
    r0_eps: f64,
    bootstrap: Option<serde_json::Value>,
    threshold: f64,
    final_e_norm: Option<f64>,
    fitted: FittedConstants,
    final_eta: Field,
}

fn execute(cfg: &RunConfig) -> Result<Executed> {
    let grid = cfg.grid_spec()?;
    let params = cfg.model_params()?;
    let solver_cfg = cfg.solver_config();
    let opts = pipeline_opts(cfg);
    match cfg.init.pipeline {
        Pipeline::Bore1d => {
            let (eta0, u0) = build_bore(cfg, &grid)?;
            let run = solve_1d_bore(&eta0, &u0, &params, &solver_cfg, &opts)?;
            let fitted = FittedConstants {
                c1_embedding: Some(run.c1_observed),
                c2_split: Some(run.c2_observed),
                c_final1: Some(borewave::diag::fit_final1_constant(
                    &run.outcome.ledger,
                    &params.weights(cfg.ledger.s),
                    params.beta,
                    cfg.ledger.stride,
                )),
                c_dteta: Some(fit_dteta_constant(&run.outcome.ledger, params.eps, params.beta)),
                c_forcing: Some(run.c_forcing_observed),
            };
            let bootstrap = run
                .bootstrap
                .as_ref()
                .map(|b| {
                    serde_json::json!({
                        "eps0": b.eps0,
                        "eps0_candidates": b.eps0_candidates,
                        "ctilde": b.ctilde,
                        "ctilde_candidates": b.ctilde_candidates,
                        "predicted_horizon": b.predicted_horizon(params.eps),
                    })
                });
            Ok(Executed {
                final_e_norm: run.outcome.ledger.last().and_then(|s| s.e_norm_composed),
                final_eta: run.composed_final.eta.clone(),
                r0_eps: run.r0_eps,
                threshold: run.threshold,
                outcome: run.outcome,
                fitted,
                bootstrap,
            })
        }
        Pipeline::Bore2d => {
            let grid1 = GridSpec::new_1d(grid.lengths()[0], grid.points()[0])?;
            let cfg1 = {
                let mut c = cfg.clone();
                c.grid.dim = 1;
                c.grid.length = vec![grid.lengths()[0]];
                c.grid.points = vec![grid.points()[0]];
                c
            };
            let (eta0, u0) = build_bore(&cfg1, &grid1)?;
            let phi = gaussian_from(cfg, &grid)?;
            let psi = [Field::zeros(&grid), Field::zeros(&grid)];
            let run = solve_2d_bore(&eta0, &u0, &phi, &psi, &params, &solver_cfg, &opts)?;
            Ok(Executed {
                final_e_norm: Some(run.m_norm_final),
                final_eta: run.composed_final.eta.clone(),
                r0_eps: run.r0_eps,
                threshold: run.threshold,
                outcome: run.outcome,
                fitted: FittedConstants::default(),
                bootstrap: None,
            })
        }
        Pipeline::Direct => {
            let init = match cfg.init.kind.as_str() {
                "zero" => State::zeros(&grid),
                "gaussian" => {
                    let eta = gaussian_from(cfg, &grid)?;
                    State::new(eta, (0..grid.dim()).map(|_| Field::zeros(&grid)).collect())?
                }
                "tanh" | "smoothed-step" => {
                    if grid.dim() != 1 {
                        bail!("config error: direct bore data needs a 1D grid");
                    }
                    let (eta0, u0) = build_bore(cfg, &grid)?;
                    State::new(eta0.field, vec![u0.field])?
                }
                other => bail!("config error: unknown init.kind '{other}'"),
            };
            let part = DyadicPartition::new(&grid)?;
            let w = params.weights(cfg.ledger.s);
            let r0 = stacked_norm(&init, &w, &part, cfg.ledger.r)?;
            let run = solve_direct(&init, &params, &solver_cfg, &opts)?;
            Ok(Executed {
                final_e_norm: None,
                final_eta: run.final_state.eta.clone(),
                r0_eps: r0,
                threshold: borewave::threshold_factor() * r0,
                outcome: run,
                fitted: FittedConstants::default(),
                bootstrap: None,
            })
        }
    }
}

fn exit_code_for(t: &Termination) -> i32 {
    match t {
        Termination::Horizon => 0,
        Termination::ThresholdCrossed { .. } => 2,
        Termination::BlowUp { .. } => 3,
        Termination::Contaminated { .. } => 4,
    }
}

fn record_from(cfg: &RunConfig, ex: &Executed) -> Result<RunRecord> {
    let t_star = match ex.outcome.termination {
        Termination::ThresholdCrossed { .. } => {
            t_star_measure(&ex.outcome.ledger, ex.r0_eps).ok().and_then(|r| r.crossing)
        }
        _ => None,
    };
    let max_leak =
        ex.outcome.ledger.samples.iter().fold(0.0_f64, |m, s| m.max(s.buffer_leak));
    Ok(RunRecord {
        schema_version: 1,
        artifact_version: artifact_version(),
        config: serde_json::to_value(cfg)?,
        wall_seconds: ex.outcome.wall_seconds,
        termination: ex.outcome.termination.clone(),
        t_star,
        threshold: ex.threshold,
        r0_eps: ex.r0_eps,
        margin: if ex.threshold > 0.0 { ex.outcome.ledger.max_u_s() / ex.threshold } else { 0.0 },
        final_t: ex.outcome.final_t,
        final_u_s: ex.outcome.ledger.last().map(|s| s.u_s).unwrap_or(0.0),
        final_e_norm: ex.final_e_norm,
        max_buffer_leak: max_leak,
        fitted: ex.fitted.clone(),
        bootstrap: ex.bootstrap.clone(),
        constants_note: RunRecord::constants_note_default(),
    })
}

pub fn cmd_run(config_path: &Path, g: &GlobalOpts) -> Result<RunSummary> {
    let cfg = RunConfig::load(config_path)?;
    let ex = execute(&cfg)?;
    let record = record_from(&cfg, &ex)?;
    info!(
        g,
        "run: {} in {:.2}s, U_s(0) scale {:.6}, margin {:.4}, termination {:?}",
        config_path.display(),
        record.wall_seconds,
        record.r0_eps,
        record.margin,
        record.termination
    );
    if let Some(dir) = ensure_out(g)? {
        fs::write(dir.join("record.json"), serde_json::to_string_pretty(&record)?)?;
        let mut f = fs::File::create(dir.join("ledger.csv"))?;
        ex.outcome.ledger.write_csv(&mut f)?;
        let mut plot = Plot::line("tracked norm over time", "t", "U_s");
        plot.add_series(
            "U_s",
            ex.outcome.ledger.samples.iter().map(|s| (s.t, s.u_s)).collect(),
        );
        fs::write(dir.join("us.svg"), plot.render())?;
        let mut bf = fs::File::create(dir.join("eta_final.bin"))?;
        write_field_binary(&ex.final_eta, &mut bf)?;
        let mut cf = fs::File::create(dir.join("eta_final.csv"))?;
        write_field_csv(&ex.final_eta, &mut cf)?;
        for (t, state) in &ex.outcome.snapshots {
            let mut sf = fs::File::create(dir.join(format!("eta_t{t:.4}.bin")))?;
            write_field_binary(&state.eta, &mut sf)?;
        }
    }
    Ok(RunSummary { exit_code: exit_code_for(&record.termination), record })
}

#[derive(Debug, serde::Serialize)]
pub struct SweepRow {
    pub eps: f64,
    pub horizon: f64,
    pub t_star: Option<f64>,
    pub margin: f64,
    pub termination: String,
}

#[derive(Debug, serde::Serialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    pub fit_note: String,
    /// per-eps ledger CSVs (bitwise-deterministic across worker counts)
    #[serde(skip)]
    pub ledger_csvs: Vec<String>,
}

pub fn cmd_sweep_eps(config_path: &Path, eps_list: &[f64], g: &GlobalOpts) -> Result<SweepReport> {
    if eps_list.len() < 3 {
        bail!("config error: sweep needs at least 3 eps values");
    }
    let mut eps = eps_list.to_vec();
    for &e in &eps {
        if !(e > 0.0) {
            bail!("config error: eps values must be positive, got {e}");
        }
    }
    eps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if eps.windows(2).any(|w| w[0] == w[1]) {
        bail!("config error: duplicate eps values rejected");
    }
    let cfg = RunConfig::load(config_path)?;

    let worker = |e: f64| -> Result<(SweepRow, borewave::diag::Ledger)> {
        let mut c = cfg.clone();
        c.params.eps = e;
        c.solver.t_end = c.solver.t_end.min(1.0 / e);
        let ex = execute(&c)?;
        let ts = t_star_measure(&ex.outcome.ledger, ex.r0_eps)?;
        Ok((
            SweepRow {
                eps: e,
                horizon: ts.horizon,
                t_star: ts.crossing,
                margin: ts.margin,
                termination: format!("{:?}", ex.outcome.termination),
            },
            ex.outcome.ledger,
        ))
    };
    let results: Vec<Result<(SweepRow, borewave::diag::Ledger)>> = if g.threads == 1 {
        eps.iter().map(|&e| worker(e)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(g.threads)
            .build()
            .context("building worker pool")?;
        pool.install(|| {
            use rayon::prelude::*;
            eps.par_iter().map(|&e| worker(e)).collect()
        })
    };
    let mut rows = Vec::new();
    let mut ledgers = Vec::new();
    for r in results {
        let (row, ledger) = r?;
        info!(
            g,
            "  eps={}: horizon {:.2}, margin {:.4}, t* {:?} [{}]",
            row.eps, row.horizon, row.margin, row.t_star, row.termination,
        );
        rows.push(row);
        ledgers.push(ledger);
    }

    let crossed: Vec<(f64, f64)> =
        rows.iter().filter_map(|r| r.t_star.map(|t| (r.eps, t))).collect();
    let (slope, intercept, note) = if crossed.len() >= 2 {
        let xs: Vec<f64> = crossed.iter().map(|(e, _)| (1.0 / e).ln()).collect();
        let ys: Vec<f64> = crossed.iter().map(|(_, t)| t.ln()).collect();
        let xm = xs.iter().sum::<f64>() / xs.len() as f64;
        let ym = ys.iter().sum::<f64>() / ys.len() as f64;
        let sxx: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
        let slope = sxy / sxx;
        (Some(slope), Some(ym - slope * xm), format!("fit over {} crossings", crossed.len()))
    } else if crossed.is_empty() {
        (None, None, "n/a: no threshold crossing at any eps".to_string())
    } else {
        (None, None, "n/a: single crossing, no fit".to_string())
    };
    info!(g, "sweep fit: slope {slope:?} ({note})");

    let ledger_csvs: Vec<String> = ledgers.iter().map(|l| l.to_csv_string()).collect();
    let report = SweepReport { rows, slope, intercept, fit_note: note, ledger_csvs };
    if let Some(dir) = ensure_out(g)? {
        let mut csv = String::from("eps,horizon,t_star,margin,termination\n");
        for r in &report.rows {
            csv.push_str(&format!(
                "{:.16e},{:.16e},{},{:.16e},{}\n",
                r.eps,
                r.horizon,
                r.t_star.map(|t| format!("{t:.16e}")).unwrap_or_else(|| "nan".into()),
                r.margin,
                r.termination
            ));
        }
        fs::write(dir.join("sweep.csv"), csv)?;
        fs::write(dir.join("sweep.json"), serde_json::to_string_pretty(&report)?)?;
        let mut plot = Plot::line("threshold crossing time vs 1/eps", "1/eps", "T*");
        plot.log_x = true;
        plot.log_y = true;
        if !crossed.is_empty() {
            plot.add_scatter(
                "measured T*",
                crossed.iter().map(|(e, t)| (1.0 / e, *t)).collect(),
            );
        }
        if let (Some(s), Some(i)) = (report.slope, report.intercept) {
            let xs: Vec<f64> = crossed.iter().map(|(e, _)| 1.0 / e).collect();
            let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = xs.iter().cloned().fold(0.0, f64::max);
            plot.add_series(
                &format!("fit slope {s:.3}"),
                vec![(lo, (i + s * lo.ln()).exp()), (hi, (i + s * hi.ln()).exp())],
            );
        }
        // also plot U_s(t) per eps for the record
        let mut us = Plot::line("U_s per eps", "t", "U_s");
        for (r, ledger) in report.rows.iter().zip(&ledgers) {
            us.add_series(
                &format!("eps={}", r.eps),
                ledger.samples.iter().map(|s| (s.t, s.u_s)).collect(),
            );
        }
        fs::write(dir.join("sweep.svg"), plot.render())?;
        fs::write(dir.join("sweep_us.svg"), us.render())?;
    }
    Ok(report)
}

#[derive(Debug, serde::Serialize)]
pub struct ConvRow {
    pub x: f64,
    pub error: f64,
}

pub fn cmd_conv_dt(config_path: &Path, dts: &[f64], g: &GlobalOpts) -> Result<Vec<ConvRow>> {
    if dts.len() < 2 {
        bail!("config error: need at least 2 dt values");
    }
    let cfg = RunConfig::load(config_path)?;
    let mut dts = dts.to_vec();
    dts.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let dt_min = *dts.last().unwrap();
    let solve_at = |dt: f64| -> Result<Field> {
        let mut c = cfg.clone();
        c.solver.dt = dt;
        c.threshold.enabled = false;
        c.threshold.halt_on_contamination = false;
        Ok(execute(&c)?.final_eta)
    };
    let reference = solve_at(dt_min / 16.0)?;
    let mut rows = Vec::new();
    for &dt in &dts {
        let err = solve_at(dt)?.sub(&reference).l2_norm();
        info!(g, "  dt={dt}: error vs dt_min/16 reference = {err:.3e}");
        rows.push(ConvRow { x: dt, error: err });
    }
    let slope = fit_loglog(&rows);
    info!(g, "convergence order in dt: {slope:.3}");
    if let Some(dir) = ensure_out(g)? {
        write_conv_outputs(&dir, "conv_dt", &rows, slope, "dt")?;
    }
    Ok(rows)
}

pub fn cmd_conv_m(config_path: &Path, ms: Option<Vec<f64>>, g: &GlobalOpts) -> Result<Vec<ConvRow>> {
    let cfg = RunConfig::load(config_path)?;
    let grid = cfg.grid_spec()?;
    let kmax = grid.k_max();
    let ms = ms.unwrap_or_else(|| vec![kmax / 8.0, kmax / 4.0, kmax / 2.0]);
    let solve_at = |m: f64| -> Result<Field> {
        let mut c = cfg.clone();
        c.solver.m = Some(m.min(kmax));
        c.threshold.enabled = false;
        c.threshold.halt_on_contamination = false;
        Ok(execute(&c)?.final_eta)
    };
    let mut rows = Vec::new();
    for &m in &ms {
        let s1 = solve_at(m)?;
        let s2 = solve_at(2.0 * m)?;
        let err = s1.sub(&s2).l2_norm();
        info!(g, "  m={m:.3}: ||sol(m) - sol(2m)|| = {err:.3e}");
        rows.push(ConvRow { x: m, error: err });
    }
    if let Some(dir) = ensure_out(g)? {
        write_conv_outputs(&dir, "conv_m", &rows, fit_loglog(&rows), "m")?;
    }
    Ok(rows)
}

fn fit_loglog(rows: &[ConvRow]) -> f64 {
    let pts: Vec<(f64, f64)> =
        rows.iter().filter(|r| r.error > 0.0).map(|r| (r.x.ln(), r.error.ln())).collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let xm = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
    let ym = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
    let sxx: f64 = pts.iter().map(|p| (p.0 - xm) * (p.0 - xm)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - xm) * (p.1 - ym)).sum();
    sxy / sxx
}

fn write_conv_outputs(dir: &Path, stem: &str, rows: &[ConvRow], slope: f64, xname: &str) -> Result<()> {
    let mut csv = format!("{xname},error\n");
    for r in rows {
        csv.push_str(&format!("{:.16e},{:.16e}\n", r.x, r.error));
    }
    csv.push_str(&format!("# fitted slope,{slope:.6}\n"));
    fs::write(dir.join(format!("{stem}.csv")), csv)?;
    let mut plot = Plot::line(&format!("{stem} study (slope {slope:.3})"), xname, "error");
    plot.log_x = true;
    plot.log_y = true;
    plot.add_series("error", rows.iter().map(|r| (r.x, r.error)).collect());
    fs::write(dir.join(format!("{stem}.svg")), plot.render())?;
    Ok(())
}

pub struct NormArgs {
    pub field: PathBuf,
    pub s: f64,
    pub p: String,
    pub r: f64,
    pub eps: Option<f64>,
    pub b: Option<f64>,
    pub d: Option<f64>,
}

pub fn cmd_norms(args: &NormArgs, g: &GlobalOpts) -> Result<Vec<NormReport>> {
    let mut file = fs::File::open(&args.field)
        .with_context(|| format!("opening {}", args.field.display()))?;
    let field = read_field_binary(&mut file)?;
    let part = DyadicPartition::new(field.grid())?;
    let p = match args.p.as_str() {
        "2" => Lp::Two,
        "inf" | "∞" => Lp::Inf,
        other => bail!("config error: p must be 2 or inf, got {other}"),
    };
    let spec = BesovSpec::new(args.s, p, args.r)?;
    let (value, tail) = besov_norm_with_tail(&field, &spec, &part)?;
    let mut reports = vec![NormReport {
        quantity: "besov".into(),
        s: args.s,
        p: args.p.clone(),
        r: args.r,
        eps: args.eps.unwrap_or(0.0),
        b: args.b.unwrap_or(0.0),
        d: args.d.unwrap_or(0.0),
        value,
        tail_estimate: tail,
    }];
    if let (Some(eps), Some(b), Some(d)) = (args.eps, args.b, args.d) {
        let w = EnergyWeights { b, d, eps, s: args.s };
        let st = State::new(field.clone(), (0..field.grid().dim()).map(|_| Field::zeros(field.grid())).collect())?;
        let x = stacked_norm(&st, &w, &part, args.r)?;
        let e = e_norm(&st, &w, &part, args.r)?;
        for (q, v) in [("x-energy", x), ("e-norm", e)] {
            reports.push(NormReport {
                quantity: q.into(),
                s: args.s,
                p: "2".into(),
                r: args.r,
                eps,
                b,
                d,
                value: v,
                tail_estimate: 0.0,
            });
        }
    }
    let json = serde_json::to_string_pretty(&reports)?;
    info!(g, "{json}");
    if let Some(dir) = ensure_out(g)? {
        fs::write(dir.join("norms.json"), json)?;
    }
    Ok(reports)
}
