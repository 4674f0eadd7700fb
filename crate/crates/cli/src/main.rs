use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use satris::scenario::{
    parse_grid, run_resolved, GridSpec, OutputFormat, ScenarioConfig, SweepVariable,
};
use satris::Error;

#[derive(Parser)]
#[command(
    name = "satris",
    version,
    about = "Coverage and capacity of RIS-assisted LEO satellite downlinks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep defined in a scenario file.
    Run { config: PathBuf },
    /// Sweep one variable over a grid, overriding the scenario's sweep.
    Sweep {
        config: PathBuf,
        /// rho_th | rho0 (dB), N | L (counts), R0 | H (meters)
        #[arg(long = "var")]
        var: String,
        /// "start:stop:points" or a comma-separated list, ascending
        #[arg(long)]
        grid: String,
        /// Add Monte Carlo columns.
        #[arg(long)]
        mc: bool,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        format: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn execute(cli: Cli) -> satris::Result<()> {
    let (cfg_path, overrides) = match cli.command {
        Command::Run { config } => (config, None),
        Command::Sweep {
            config,
            var,
            grid,
            mc,
            seed,
            workers,
            format,
            out,
        } => (config, Some((var, grid, mc, seed, workers, format, out))),
    };
    let mut cfg = ScenarioConfig::load(&cfg_path)?;
    if let Some((var, grid, mc, seed, workers, format, out)) = overrides {
        cfg.sweep.variable = SweepVariable::parse(&var)?;
        cfg.sweep.grid = GridSpec::Values(parse_grid(&grid)?);
        cfg.monte_carlo.enabled = mc;
        if let Some(s) = seed {
            cfg.monte_carlo.seed = s;
        }
        if let Some(w) = workers {
            cfg.monte_carlo.workers = w;
        }
        if let Some(f) = format {
            cfg.output.format = OutputFormat::parse(&f)?;
        }
        if let Some(o) = out {
            cfg.output.dir = o;
        }
    }
    let resolved = cfg.resolve()?;
    let output = run_resolved(&resolved)?;
    for t in &output.tables {
        if !t.fallback_points.is_empty() {
            eprintln!(
                "warning: {} at {} = {:?} used the quadrature fallback",
                t.metric.name(),
                t.variable.name(),
                t.fallback_points
            );
        }
    }
    for f in &output.files {
        println!("{}", f.display());
    }
    println!("{}", output.resolved_config.display());
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
