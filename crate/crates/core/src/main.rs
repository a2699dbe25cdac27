use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gpbag::cli::{self, EvaluateArgs};
use gpbag::config::ExperimentConfig;

#[derive(Parser)]
#[command(name = "gpbag", version, about = "Class-aware bagging with GP-boosted members for imbalanced binary classification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct ConfigArgs {
    /// Experiment config file (flat key = value text).
    #[arg(long)]
    config: PathBuf,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Cap concurrent workers.
    #[arg(long)]
    jobs: Option<usize>,
    /// Named budget preset (available: quick).
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Train an ensemble and persist it with its manifest and split.
    Train(ConfigArgs),
    /// Evaluate a persisted model on a CSV dataset.
    Evaluate {
        /// Model directory written by `train`.
        #[arg(long)]
        model: PathBuf,
        /// CSV file to evaluate on.
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Label column name or zero-based index (default: from manifest).
        #[arg(long)]
        label_column: Option<String>,
        /// Positive label token (default: from manifest).
        #[arg(long)]
        positive_label: Option<String>,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Run the training-fraction sweep.
    Sweep(ConfigArgs),
    /// Balance a whole dataset and write it with a synthetic marker column.
    Resample(ConfigArgs),
    /// Paired comparison against the plain boosted-stump baseline.
    Compare(ConfigArgs),
}

fn configure_jobs(jobs: Option<usize>) {
    if let Some(k) = jobs {
        // Ignore the error when a pool already exists (e.g. in tests).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
    }
}

fn load_config(args: &ConfigArgs) -> gpbag::Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::from_file(&args.config)?;
    if let Some(preset) = &args.preset {
        cfg.apply_preset(preset)?;
    }
    if let Some(seed) = args.seed {
        cfg.ensemble.seed = seed;
        cfg.seed_defaulted = false;
    }
    if let Some(out) = &args.out {
        cfg.output = out.clone();
    }
    configure_jobs(args.jobs);
    Ok(cfg)
}

fn run(command: Command) -> gpbag::Result<()> {
    match command {
        Command::Train(args) => cli::cmd_train(&load_config(&args)?),
        Command::Evaluate {
            model,
            data,
            out,
            label_column,
            positive_label,
            jobs,
        } => {
            configure_jobs(jobs);
            cli::cmd_evaluate(&EvaluateArgs {
                model_dir: model,
                data_path: data,
                out,
                label_column,
                positive_label,
            })
            .map(|_| ())
        }
        Command::Sweep(args) => cli::cmd_sweep(&load_config(&args)?).map(|_| ()),
        Command::Resample(args) => cli::cmd_resample(&load_config(&args)?),
        Command::Compare(args) => cli::cmd_compare(&load_config(&args)?).map(|_| ()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
