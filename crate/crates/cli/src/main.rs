mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use presti_core::{Approach, SplitRatios, Target};

#[derive(Debug, Parser)]
#[command(
    name = "presti",
    version,
    about = "Mine SATD commits, measure and predict their repayment effort"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Walk git repositories and write one dataset record per kept commit.
    Mine(MineArgs),
    /// SATD vs non-SATD and per-debt-type comparison tables.
    Stats(StatsArgs),
    /// Train effort models and write a model bundle.
    Train(TrainArgs),
    /// Score a model bundle on the test split and write the report.
    Evaluate(EvaluateArgs),
    /// Low- and high-effort keywords from a trained TextCNN.
    Keywords(KeywordsArgs),
    /// Render an evaluation report as a table.
    Report(ReportArgs),
    /// Train the SATD message classifier on dataset labels.
    TrainSatd(TrainSatdArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct MineArgs {
    /// Repository paths.
    #[arg(required = true)]
    pub repos: Vec<PathBuf>,
    /// Output file; stdout if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Branch to walk instead of HEAD.
    #[arg(long)]
    pub branch: Option<String>,
    /// Stop after this many kept commits per repository.
    #[arg(long)]
    pub max_commits: Option<usize>,
    #[arg(long)]
    pub keep_non_english: bool,
    #[arg(long)]
    pub keep_reverts: bool,
    /// SATD pattern file (`type<TAB>pattern` lines) replacing the bundled one.
    #[arg(long)]
    pub patterns: Option<PathBuf>,
    /// Label messages with a classifier from `train-satd` instead of patterns.
    #[arg(long, conflicts_with = "patterns")]
    pub satd_model: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    pub dataset: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Hyper {
    /// TextCNN embedding width.
    #[arg(long, default_value_t = 300)]
    pub embed_dim: usize,
    /// TextCNN filters per window size.
    #[arg(long, default_value_t = 200)]
    pub filters: usize,
    /// TextCNN window sizes.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
    pub windows: Vec<usize>,
    #[arg(long, default_value_t = 30)]
    pub epochs: usize,
    #[arg(long, default_value_t = 64)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub learning_rate: f64,
    #[arg(long, default_value_t = 0.5)]
    pub dropout: f64,
    /// Random forest size.
    #[arg(long, default_value_t = 100)]
    pub trees: usize,
    /// Ridge penalty.
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    pub dataset: PathBuf,
    /// Model bundle to write.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "80/10/10")]
    pub split: SplitRatios,
    /// Comma-separated targets; all eleven if omitted.
    #[arg(long, value_delimiter = ',')]
    pub targets: Vec<Target>,
    /// Comma-separated approaches; all four if omitted.
    #[arg(long, value_delimiter = ',')]
    pub models: Vec<Approach>,
    #[command(flatten)]
    pub hyper: Hyper,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    pub dataset: PathBuf,
    /// Model bundle from `train`.
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct KeywordsArgs {
    pub dataset: PathBuf,
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, default_value = "la")]
    pub target: Target,
    /// Entries per direction.
    #[arg(long, default_value_t = 10)]
    pub top: usize,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Report JSON from `evaluate`.
    pub report: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainSatdArgs {
    pub dataset: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub hyper: Hyper,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Mine(a) => commands::mine(&a),
        Command::Stats(a) => commands::stats(&a),
        Command::Train(a) => commands::train(&a),
        Command::Evaluate(a) => commands::evaluate(&a),
        Command::Keywords(a) => commands::keywords(&a),
        Command::Report(a) => commands::report(&a),
        Command::TrainSatd(a) => commands::train_satd(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
