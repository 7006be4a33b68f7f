use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bragg_entangle::config::{parse_config, parse_grid_arg, RunConfig};
use bragg_entangle::sweep::{figure_points, run, write_csv, Figure};
use bragg_entangle::{check, Result};

#[derive(Parser)]
#[command(name = "bragg-entangle", version, about = "Heralded two-condensate entanglement sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minimum partial-transpose eigenvalue against τ (n_p = 10, 20)
    Fig2(SweepArgs),
    /// Inequality margin against τ (n_p = 10, 20)
    Fig3(SweepArgs),
    /// Inequality margin against τ (θ_αβ = 0, π/2)
    Fig4(SweepArgs),
    /// Inequality margin against η at τ = 5 (θ_αβ = 0, π/2)
    Fig5(SweepArgs),
    /// Cross product of the configured point and every --grid axis
    Sweep(SweepArgs),
    /// Run the oracle suites
    Check,
}

#[derive(Args)]
struct SweepArgs {
    /// JSON file with RunConfig fields
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV path (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override a config field, e.g. --set n_p=20
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Shorthand for --set tau_stop=<value>
    #[arg(long)]
    tau_max: Option<f64>,
    /// Sweep axis as [key=]start:stop:step or [key=]a,b,c
    #[arg(long = "grid", value_name = "SPEC")]
    grids: Vec<String>,
}

fn sweep(figure: Figure, args: SweepArgs) -> Result<()> {
    let mut overrides = args.overrides;
    if let Some(t) = args.tau_max {
        overrides.push(format!("tau_stop={t}"));
    }
    let cfg: RunConfig = parse_config(args.config.as_deref(), &overrides)?;
    let grids = args
        .grids
        .iter()
        .map(|g| parse_grid_arg(g))
        .collect::<Result<Vec<_>>>()?;
    let rows = run(&cfg, &figure_points(figure, &cfg, &grids)?);
    match args.out {
        Some(path) => write_csv(&rows, BufWriter::new(File::create(path)?)),
        None => write_csv(&rows, io::stdout().lock()),
    }
}

fn check_all() -> Result<bool> {
    let outcomes = check::run_all()?;
    let mut out = io::stdout().lock();
    for o in &outcomes {
        writeln!(out, "{o}")?;
    }
    Ok(outcomes.iter().all(check::CheckOutcome::passed))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fig2(a) => sweep(Figure::Fig2, a).map(|_| true),
        Command::Fig3(a) => sweep(Figure::Fig3, a).map(|_| true),
        Command::Fig4(a) => sweep(Figure::Fig4, a).map(|_| true),
        Command::Fig5(a) => sweep(Figure::Fig5, a).map(|_| true),
        Command::Sweep(a) => sweep(Figure::Generic, a).map(|_| true),
        Command::Check => check_all(),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: one or more oracle checks failed");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
