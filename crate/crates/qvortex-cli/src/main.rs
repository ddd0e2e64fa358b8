//! `qvortex` — fields, vortex centers, moments and trajectories of the
//! 2-D photoionization wave packet, driven by an archivable JSON config.
//!
//! Exit codes: 0 success, 1 config error, 2 i/o error, 3 numerical
//! non-convergence. `QVORTEX_THREADS` caps the worker count.

mod commands;
mod config;
mod csvout;
mod error;
mod ppm;
mod svg;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use config::{FieldJob, GridConfig, Kind, Overrides, Quantity, RunConfig, SpaceKey};
use error::{CliError, Result};

#[derive(Parser)]
#[command(
    name = "qvortex",
    about = "Quantum vortices of a 2-D photoionization wave packet: field maps, vortex centers, moments, trajectories",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON run configuration; flags override its keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Pulse amplitude override (a.u.).
    #[arg(long = "F0", global = true)]
    f0: Option<f64>,

    /// Time override for single-time jobs (a.u.).
    #[arg(long, global = true)]
    t: Option<f64>,

    /// Space override for field jobs: k (momentum) or r (position).
    #[arg(long, global = true)]
    space: Option<SpaceKey>,

    /// Momentum wavefunction path: exact, approx or quad.
    #[arg(long, global = true)]
    kind: Option<Kind>,

    /// Output directory override.
    #[arg(long, global = true)]
    out: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a field quantity over a grid (CSV, optional PPM/SVG).
    Field {
        /// Quantity for an ad-hoc job when the config defines none.
        #[arg(long)]
        quantity: Option<Quantity>,
    },
    /// Closed-form and numerically refined vortex centers (JSON).
    Centers,
    /// Momentum and coordinate moments, numeric and closed-form (JSON).
    Moments,
    /// Vortex trajectory over a time list plus line cuts (CSV).
    Trace,
}

fn main() {
    match run() {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
        }
        Err(e) => {
            eprintln!("qvortex: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn run() -> Result<Vec<PathBuf>> {
    let cli = Cli::parse();
    init_thread_pool()?;

    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let overrides = Overrides {
        f0: cli.f0,
        t: cli.t,
        space: cli.space,
        kind: cli.kind,
        out: cli.out,
    };
    cfg.apply_overrides(&overrides)?;

    match cli.command {
        Command::Field { quantity } => {
            if cfg.field.is_empty() {
                let q = quantity.ok_or_else(|| {
                    CliError::Config(
                        "field: pass --quantity or provide field jobs in the config".into(),
                    )
                })?;
                cfg.field.push(FieldJob {
                    name: format!("field_{}", q.tag()),
                    space: overrides.space.unwrap_or(SpaceKey::Momentum),
                    quantity: q,
                    kind: None,
                    f0: None,
                    time: overrides.t.unwrap_or(5.0),
                    grid: GridConfig::default(),
                    velocity_floor_rel: 1e-300,
                });
                cfg.validate()?;
            }
            commands::cmd_field(&cfg)
        }
        Command::Centers => commands::cmd_centers(&cfg),
        Command::Moments => commands::cmd_moments(&cfg),
        Command::Trace => commands::cmd_trace(&cfg),
    }
}

fn init_thread_pool() -> Result<()> {
    if let Ok(raw) = std::env::var("QVORTEX_THREADS") {
        let n: usize = raw
            .parse()
            .map_err(|_| CliError::Config(format!("QVORTEX_THREADS must be a positive integer, got '{raw}'")))?;
        if n == 0 {
            return Err(CliError::Config(
                "QVORTEX_THREADS must be a positive integer".into(),
            ));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    Ok(())
}
