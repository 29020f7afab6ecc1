use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use polarshare::harness::{run, Command, ExperimentConfig, LeakageMode, Overrides};

#[derive(Parser)]
#[command(name = "polarshare", version, about = "Secret sharing experiments from correlated sources")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand, Clone, Copy)]
enum Sub {
    /// Rate regions and the two-participant sweep (CSV)
    Rates,
    /// Build the polar codes and report set sizes
    Construct,
    /// Run sharing trials and report error rates and uniformity
    Share,
    /// Leakage along a block-length ladder
    Leakage,
    /// Two-universality and linearity checks of the hash family
    Hashcheck,
}

#[derive(Args)]
struct Common {
    /// TOML experiment file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// master seed, required without a config that sets one
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// log2 of the block length
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    beta: Option<f64>,
    #[arg(long, global = true)]
    delta: Option<f64>,
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    /// repetitions per secret
    #[arg(long, global = true)]
    t: Option<usize>,
    /// leakage mode: exact or empirical
    #[arg(long, global = true)]
    mode: Option<String>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(report) => {
            print!("{report}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn execute(cli: &Cli) -> polarshare::Result<String> {
    let c = &cli.common;
    let overrides = Overrides {
        seed: c.seed,
        out_dir: c.out_dir.clone(),
        trials: c.trials,
        n: c.n,
        beta: c.beta,
        delta: c.delta,
        epsilon: c.epsilon,
        t: c.t,
        mode: c.mode.as_deref().map(str::parse::<LeakageMode>).transpose()?,
    };
    let config = match &c.config {
        Some(path) => ExperimentConfig::load(path, &overrides)?,
        None => ExperimentConfig::from_toml_with("", &overrides)?,
    };
    let command = match cli.command {
        Sub::Rates => Command::Rates,
        Sub::Construct => Command::Construct,
        Sub::Share => Command::Share,
        Sub::Leakage => Command::Leakage,
        Sub::Hashcheck => Command::Hashcheck,
    };
    Ok(run(command, &config)?.report)
}
