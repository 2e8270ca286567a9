use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fi_linkpred::{
    cmd_evaluate, cmd_predict, cmd_scores, cmd_train, parse_families, parse_formats,
    resolve_seed, CliError, RunConfig,
};
use fi_linkpred_core::MetricParams;

/// Detect likely unwanted feature interactions in a software product line
/// by link prediction over its feature-interaction graph.
#[derive(Parser)]
#[command(name = "fi-linkpred", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Features file: one `name[,mandatory]` record per line
    #[arg(long)]
    features: PathBuf,
    /// Interactions file: one `featureA,featureB,label` record per line
    #[arg(long)]
    interactions: PathBuf,
    /// Output directory (created if missing)
    #[arg(long)]
    out: PathBuf,
    /// Master seed; falls back to FI_LINKPRED_SEED, then 42
    #[arg(long)]
    seed: Option<u64>,
    /// Katz attenuation factor
    #[arg(long, default_value_t = 0.05)]
    katz_beta: f64,
    /// Random-walk restart probability
    #[arg(long, default_value_t = 0.15)]
    rwr_restart: f64,
    /// Cubic-term weight of the local-path index
    #[arg(long, default_value_t = 0.001)]
    lp_epsilon: f64,
}

#[derive(Args)]
struct LearnArgs {
    /// Fraction of pairs assigned to the training partition
    #[arg(long, default_value_t = 0.8)]
    train_fraction: f64,
    /// Cross-validation fold count
    #[arg(long, default_value_t = 10)]
    folds: usize,
    /// Comma-separated model families (default: all six)
    #[arg(long, value_delimiter = ',')]
    families: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the per-pair similarity score table
    Scores {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Tune and persist one model per family
    Train {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        learn: LearnArgs,
    },
    /// Run the full evaluation pipeline and write reports
    Evaluate {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        learn: LearnArgs,
        /// Comma-separated report formats: json, markdown
        #[arg(long, value_delimiter = ',')]
        format: Vec<String>,
    },
    /// Classify candidate feature pairs with a persisted model
    Predict {
        #[command(flatten)]
        common: CommonArgs,
        /// Persisted model file from `train`
        #[arg(long)]
        model: PathBuf,
        /// Candidate pairs file: one `featureA,featureB` per line
        #[arg(long)]
        candidates: PathBuf,
    },
}

fn build_config(
    common: CommonArgs,
    learn: Option<LearnArgs>,
    formats: Vec<String>,
    model: Option<PathBuf>,
    candidates: Option<PathBuf>,
) -> Result<RunConfig, CliError> {
    let params = MetricParams::new(
        common.katz_beta,
        common.rwr_restart,
        common.lp_epsilon,
        1e-10,
        50,
    )?;
    let (train_fraction, k_folds, families) = match learn {
        Some(learn) => (
            learn.train_fraction,
            learn.folds,
            parse_families(&learn.families)?,
        ),
        None => (0.8, 10, parse_families(&[])?),
    };
    Ok(RunConfig {
        features: common.features,
        interactions: common.interactions,
        out: common.out,
        master_seed: resolve_seed(common.seed)?,
        params,
        train_fraction,
        k_folds,
        families,
        formats: parse_formats(&formats)?,
        model,
        candidates,
    })
}

fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    match cli.command {
        Command::Scores { common } => {
            let config = build_config(common, None, Vec::new(), None, None)?;
            let path = cmd_scores(&config)?;
            println!("wrote {}", path.display());
        }
        Command::Train { common, learn } => {
            let config = build_config(common, Some(learn), Vec::new(), None, None)?;
            for path in cmd_train(&config)? {
                println!("wrote {}", path.display());
            }
        }
        Command::Evaluate {
            common,
            learn,
            format,
        } => {
            let config = build_config(common, Some(learn), format, None, None)?;
            for path in cmd_evaluate(&config)? {
                println!("wrote {}", path.display());
            }
        }
        Command::Predict {
            common,
            model,
            candidates,
        } => {
            let config = build_config(common, None, Vec::new(), Some(model), Some(candidates))?;
            let path = cmd_predict(&config)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::init();
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(u8::try_from(err.code).unwrap_or(1))
        }
    }
}
