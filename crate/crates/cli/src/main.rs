//! Command-line front end for the outage library: parameter sweeps, model
//! comparison, critical-density solves, and Monte Carlo runs, emitted as CSV
//! or JSON with full provenance.
//!
//! Exit codes: 0 on success, 2 on configuration errors, 3 on numerical
//! failures. Identical configuration and seed give byte-identical output.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{cmd_ccdf, cmd_compare, cmd_critical_density, cmd_scdo, cmd_simulate, Ctx, Outcome};
use config::{load_config_file, preset, CliError, CliResult, Overlay};
use output::emit;

#[derive(Parser)]
#[command(
    name = "mrc-outage",
    version,
    about = "SIR outage probability of an N-antenna maximum-ratio-combining receiver \
             in a Poisson field of interferers"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Outage probability over a threshold grid for one or more models
    Ccdf(CommonArgs),
    /// Largest interferer density meeting a target outage, per antenna count
    #[command(name = "critical-density")]
    CriticalDensity(CommonArgs),
    /// Log-log slope of outage vs density in the small-density regime
    Scdo(CommonArgs),
    /// Deviation ratios of approximate models against the exact law
    Compare(CommonArgs),
    /// Monte Carlo estimation only, no analytic reference
    Simulate(CommonArgs),
}

impl Cmd {
    fn common(&self) -> &CommonArgs {
        match self {
            Cmd::Ccdf(a)
            | Cmd::CriticalDensity(a)
            | Cmd::Scdo(a)
            | Cmd::Compare(a)
            | Cmd::Simulate(a) => a,
        }
    }

    fn run(&self, ctx: &Ctx) -> CliResult<Outcome> {
        match self {
            Cmd::Ccdf(_) => cmd_ccdf(ctx),
            Cmd::CriticalDensity(_) => cmd_critical_density(ctx),
            Cmd::Scdo(_) => cmd_scdo(ctx),
            Cmd::Compare(_) => cmd_compare(ctx),
            Cmd::Simulate(_) => cmd_simulate(ctx),
        }
    }
}

/// Flags shared by every subcommand; each command reads the ones it needs.
/// Unset values fall back to the config file, then the preset, then built-in
/// defaults.
#[derive(Args)]
struct CommonArgs {
    /// Interferer density (points per unit area)
    #[arg(long)]
    lambda: Option<f64>,

    /// Path-loss exponent, must exceed 2
    #[arg(long)]
    alpha: Option<f64>,

    /// Transmitter-receiver distance
    #[arg(long)]
    d: Option<f64>,

    /// Number of receive antennas
    #[arg(long = "n-antennas")]
    n_antennas: Option<u32>,

    /// Single SIR threshold (a one-point grid)
    #[arg(long)]
    threshold: Option<f64>,

    /// Threshold grid: "min,max,count,log|lin" or explicit values "t1,t2,..."
    #[arg(long = "t-grid")]
    t_grid: Option<String>,

    /// Density grid for scdo, same syntax as --t-grid
    #[arg(long = "lambda-grid")]
    lambda_grid: Option<String>,

    /// Antenna counts for critical-density and compare minmax, e.g. "1,2,4,8"
    #[arg(long = "n-list")]
    n_list: Option<String>,

    /// Target outage probability for critical-density
    #[arg(long)]
    epsilon: Option<f64>,

    /// Comma list of models: exact, full-correlation, min-bound, max-bound,
    /// exact-sim, full-correlation-sim, no-correlation-sim, min-fading-sim,
    /// max-fading-sim
    #[arg(long)]
    model: Option<String>,

    /// Comparison family for compare: fc | minmax
    #[arg(long)]
    kind: Option<String>,

    /// Monte Carlo sample count
    #[arg(long)]
    samples: Option<u64>,

    /// Base RNG seed (every sample derives its own stream from it)
    #[arg(long)]
    seed: Option<u64>,

    /// Simulation window radius; omitted means automatic. The mean of the
    /// truncated far field is restored either way.
    #[arg(long)]
    radius: Option<f64>,

    /// Mean per-branch SNR in dB; switches simulated curves from SIR to SINR
    #[arg(long = "snr-db")]
    snr_db: Option<f64>,

    /// Solver tolerance on the outage residual for critical-density
    #[arg(long)]
    tol: Option<f64>,

    /// Quadrature relative tolerance
    #[arg(long = "rel-tol")]
    rel_tol: Option<f64>,

    /// Quadrature absolute tolerance
    #[arg(long = "abs-tol")]
    abs_tol: Option<f64>,

    /// Output format: csv | json
    #[arg(long)]
    format: Option<String>,

    /// Output file (written via temp file + atomic rename); default stdout
    #[arg(long)]
    out: Option<PathBuf>,

    /// TOML config file with the same keys as the long flags; flags override it
    #[arg(long)]
    config: Option<PathBuf>,

    /// Named parameter preset: fig3 | fig4 | fig5a | fig5b | fig6b | fig7
    #[arg(long)]
    preset: Option<String>,
}

impl CommonArgs {
    fn overlay(&self) -> Overlay {
        Overlay {
            lambda: self.lambda,
            alpha: self.alpha,
            d: self.d,
            n_antennas: self.n_antennas,
            threshold: self.threshold,
            t_grid: self.t_grid.clone(),
            lambda_grid: self.lambda_grid.clone(),
            n_list: self.n_list.clone(),
            epsilon: self.epsilon,
            model: self.model.clone(),
            kind: self.kind.clone(),
            samples: self.samples,
            seed: self.seed,
            radius: self.radius,
            snr_db: self.snr_db,
            tol: self.tol,
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            format: self.format.clone(),
        }
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    let common = cli.cmd.common();

    let preset_layer = match &common.preset {
        Some(name) => preset(name)?,
        None => Overlay::default(),
    };
    let file_layer = match &common.config {
        Some(path) => load_config_file(path)?,
        None => Overlay::default(),
    };
    let merged = common.overlay().over(file_layer).over(preset_layer);

    let format = merged.format.clone().unwrap_or_else(|| "csv".to_string());
    if format != "csv" && format != "json" {
        return Err(CliError::config(format!(
            "unknown format '{format}' (expected csv or json)"
        )));
    }

    let ctx = Ctx { overlay: merged, preset_name: common.preset.clone() };
    let outcome = cli.cmd.run(&ctx)?;

    let content = match format.as_str() {
        "csv" => outcome.table.to_csv(),
        _ => outcome.table.to_json(outcome.meta),
    };
    emit(common.out.as_deref(), &content)?;
    if let Some(note) = outcome.note {
        eprintln!("{note}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
