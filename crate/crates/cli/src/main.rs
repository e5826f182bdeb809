use anyhow::Result;
use borewave_cli::{commands, verify, GlobalOpts, NormArgs};
use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

/// Pseudospectral runs and diagnostics for weakly dispersive wave systems
/// with bore-type data.
#[derive(Parser)]
#[command(name = "borewave", version, about)]
struct Cli {
    /// Run configuration (TOML or JSON)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for records, CSVs and SVGs
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for sweeps (0 = rayon default)
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Seed for stability-experiment noise
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Suppress progress output
    #[arg(long, global = true, default_value_t = false)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute one run (direct, bore-1d or bore-2d per the config)
    Run,
    /// Measure T*(eps) over a list of eps values and fit the scaling
    SweepEps {
        /// comma-separated eps values, e.g. 0.1,0.05,0.025
        #[arg(long, value_delimiter = ',', required = true)]
        eps: Vec<f64>,
    },
    /// Time-step refinement study against a dt/16 reference
    ConvDt {
        /// comma-separated dt values
        #[arg(long, value_delimiter = ',', required = true)]
        dts: Vec<f64>,
    },
    /// Low-pass cutoff study: ||sol(m) - sol(2m)|| over a list of m
    ConvM {
        /// comma-separated cutoffs (defaults to kmax/8, kmax/4, kmax/2)
        #[arg(long, value_delimiter = ',')]
        ms: Option<Vec<f64>>,
    },
    /// Norms of a stored field (binary layout)
    Norms {
        #[arg(long)]
        field: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        s: f64,
        /// integrability exponent: 2 or inf
        #[arg(long, default_value = "2")]
        p: String,
        #[arg(long, default_value_t = 2.0)]
        r: f64,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        b: Option<f64>,
        #[arg(long)]
        d: Option<f64>,
    },
    /// Run the invariant suites of all modules
    Verify,
}

fn require_config(cli: &Cli) -> Result<PathBuf> {
    cli.config
        .clone()
        .ok_or_else(|| anyhow::anyhow!("config error: --config <path> is required for this command"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = GlobalOpts {
        out: cli.out.clone(),
        threads: cli.threads,
        seed: cli.seed,
        quiet: cli.quiet,
    };
    let outcome: Result<i32> = (|| {
        match &cli.command {
            Command::Run => {
                let summary = commands::cmd_run(&require_config(&cli)?, &g)?;
                Ok(summary.exit_code)
            }
            Command::SweepEps { eps } => {
                commands::cmd_sweep_eps(&require_config(&cli)?, eps, &g)?;
                Ok(0)
            }
            Command::ConvDt { dts } => {
                commands::cmd_conv_dt(&require_config(&cli)?, dts, &g)?;
                Ok(0)
            }
            Command::ConvM { ms } => {
                commands::cmd_conv_m(&require_config(&cli)?, ms.clone(), &g)?;
                Ok(0)
            }
            Command::Norms { field, s, p, r, eps, b, d } => {
                let args = NormArgs {
                    field: field.clone(),
                    s: *s,
                    p: p.clone(),
                    r: *r,
                    eps: *eps,
                    b: *b,
                    d: *d,
                };
                commands::cmd_norms(&args, &g)?;
                Ok(0)
            }
            Command::Verify => {
                let results = verify::run_checks(None);
                let mut any_fail = false;
                for r in &results {
                    let status = if r.pass { "PASS" } else { "FAIL" };
                    if !g.quiet {
                        println!("[{status}] {}: {}", r.name, r.detail);
                    }
                    any_fail |= !r.pass;
                }
                let json = serde_json::to_string_pretty(&results)?;
                if let Some(dir) = &g.out {
                    std::fs::create_dir_all(dir)?;
                    std::fs::write(dir.join("verify.json"), json)?;
                } else if g.quiet {
                    println!("{json}");
                }
                Ok(if any_fail { 1 } else { 0 })
            }
        }
    })();
    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
