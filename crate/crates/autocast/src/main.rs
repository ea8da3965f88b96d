use std::path::{Path, PathBuf};
use std::process::ExitCode;

use autocast::evaluate::run_evaluation;
use autocast::export::{export_bundle, export_validation};
use autocast::synth_spec::read_synth_spec;
use autocast::{csv_io, finalize_and_forecast, parse_config, run_validation, AppError, AppResult, PipelineConfig};
use autocast_core::eval::Alternative;
use autocast_core::synth::generate_corpus;
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Automated sales forecasting: validate a model zoo per product, recommend
/// the best model, forecast and evaluate.
#[derive(Debug, Parser)]
#[command(name = "autocast", version)]
struct Cli {
    /// Seed overriding the configuration file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Sales CSV with columns product_id,date,quantity.
    #[arg(long)]
    input: Option<PathBuf>,
    /// JSON configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AlternativeArg {
    TwoSided,
    Less,
    Greater,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score every model on a holdout and recommend one per product.
    Validate(RunArgs),
    /// Validate, then refit on the full history and export forecasts.
    Forecast(RunArgs),
    /// Score exported forecasts against actuals.
    Evaluate {
        /// Directory written by `forecast`.
        #[arg(long)]
        forecasts: PathBuf,
        /// Sales CSV covering the forecast periods.
        #[arg(long)]
        actuals: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Alternative hypothesis of the signed-rank tests.
        #[arg(long, value_enum, default_value = "two-sided")]
        alternative: AlternativeArg,
    },
    /// Generate a synthetic sales CSV.
    Synth {
        /// JSON list of product archetypes.
        #[arg(long)]
        spec: PathBuf,
        /// Output CSV.
        #[arg(long)]
        out: PathBuf,
    },
}

fn load(args: &RunArgs, seed: Option<u64>) -> AppResult<(PipelineConfig, PathBuf, PathBuf)> {
    let mut config = match &args.config {
        Some(path) => parse_config(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = seed {
        config.seed = seed;
    }
    let input = args
        .input
        .clone()
        .or_else(|| config.input.clone())
        .ok_or_else(|| AppError::Input("no input file: pass --input or set 'input'".into()))?;
    let out = args
        .out
        .clone()
        .or_else(|| config.output.clone())
        .ok_or_else(|| AppError::Input("no output directory: pass --out or set 'output'".into()))?;
    Ok((config, input, out))
}

fn report_line(dir: &Path, what: &str) {
    eprintln!("{what} written to {}", dir.display());
}

fn run(cli: Cli) -> AppResult<()> {
    match cli.command {
        Command::Validate(args) => {
            let (config, input, out) = load(&args, cli.seed)?;
            let corpus = csv_io::read_sales(&input, config.frequency)?;
            let report = run_validation(&corpus, &config)?;
            export_validation(&report, &config, &out)?;
            report_line(&out, "validation results");
        }
        Command::Forecast(args) => {
            let (config, input, out) = load(&args, cli.seed)?;
            let corpus = csv_io::read_sales(&input, config.frequency)?;
            let report = run_validation(&corpus, &config)?;
            let bundle = finalize_and_forecast(&corpus, &report, &config)?;
            export_bundle(&bundle, &report, &corpus, &config, &out)?;
            report_line(&out, "forecasts");
        }
        Command::Evaluate { forecasts, actuals, out, alternative } => {
            let alternative = match alternative {
                AlternativeArg::TwoSided => Alternative::TwoSided,
                AlternativeArg::Less => Alternative::Less,
                AlternativeArg::Greater => Alternative::Greater,
            };
            run_evaluation(&forecasts, &actuals, &out, alternative)?;
            report_line(&out, "evaluation");
        }
        Command::Synth { spec, out } => {
            let parsed = read_synth_spec(&spec)?;
            let seed = cli.seed.or(parsed.seed).unwrap_or(0);
            let corpus = generate_corpus(&parsed.products, seed).map_err(|e| AppError::input(&spec, e))?;
            if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).map_err(|e| AppError::Write { path: parent.to_path_buf(), source: e })?;
            }
            csv_io::write_sales(&out, &corpus)?;
            eprintln!("{} products written to {}", corpus.len(), out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(_) => ExitCode::from(2),
    }
}
