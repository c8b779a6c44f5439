//! Command-line driver: ingestion → discretization → outcome → mining →
//! attribution, with CSV/JSON/Markdown reports and SVG attribution charts.

pub mod pipeline;
pub mod prep;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use divminer::miner::{Baseline, SignFilter};

/// Exit code for validation and I/O failures.
pub const EXIT_ERROR: i32 = 1;
/// Exit code when mining aborts on the record cap.
pub const EXIT_RECORD_CAP: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "divminer",
    version,
    about = "Find data subgroups whose outcome statistics diverge from the dataset average"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mine divergent itemsets from a CSV file and write reports
    Run(Box<RunArgs>),
    /// Turn a well-known raw dataset into a mining-ready CSV plus spec
    #[command(subcommand)]
    Prep(PrepCommand),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SignArg {
    Pos,
    Neg,
    Abs,
}

impl From<SignArg> for SignFilter {
    fn from(s: SignArg) -> SignFilter {
        match s {
            SignArg::Pos => SignFilter::Positive,
            SignArg::Neg => SignFilter::Negative,
            SignArg::Abs => SignFilter::Absolute,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
    Md,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CompareArg {
    /// t against the whole dataset
    Global,
    /// t against the rows outside the itemset
    Complement,
}

impl From<CompareArg> for Baseline {
    fn from(c: CompareArg) -> Baseline {
        match c {
            CompareArg::Global => Baseline::Global,
            CompareArg::Complement => Baseline::Complement,
        }
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Input CSV with a header row
    #[arg(long)]
    pub input: PathBuf,

    /// Discretization spec (JSON). Default: every column except the outcome's
    /// sources, numeric ones in 3 quantile bins, the rest categorical
    #[arg(long)]
    pub spec: Option<PathBuf>,

    /// Outcome function: attribute:COL | fpr:TRUTH:PRED | fnr:TRUTH:PRED |
    /// tpr: | tnr: | error: | accuracy: | rank:COL:topk=K | rank:COL:power=A |
    /// rank:SCORECOL:asc|desc:VALUATION
    #[arg(long)]
    pub outcome: String,

    /// Minimum itemset support, in (0, 1]
    #[arg(long, default_value_t = 0.01)]
    pub support: f64,

    /// Itemsets per report table
    #[arg(long, default_value_t = 10)]
    pub top: usize,

    /// Rank by signed or absolute divergence; default shows both extremes
    #[arg(long, value_enum)]
    pub sign: Option<SignArg>,

    /// Attribution targets: "topK" (K itemsets by the report's ranking),
    /// "topK-positive|negative|abs", or an explicit "{item, item}"
    #[arg(long)]
    pub shapley: Option<String>,

    /// Output directory, created if needed
    #[arg(long, default_value = ".")]
    pub out: PathBuf,

    /// Which report files to write
    #[arg(long, value_enum, default_value_t = FormatArg::All)]
    pub format: FormatArg,

    /// Mining worker threads; default uses every core
    #[arg(long)]
    pub threads: Option<usize>,

    /// Abort mining past this many itemsets
    #[arg(long, default_value_t = 5_000_000)]
    pub max_records: usize,

    /// Welch-t baseline
    #[arg(long, value_enum, default_value_t = CompareArg::Global)]
    pub compare: CompareArg,

    /// Keep the outcome's source columns as mining attributes
    #[arg(long)]
    pub allow_outcome_attributes: bool,
}

#[derive(Debug, Subcommand)]
pub enum PrepCommand {
    /// ProPublica COMPAS two-year recidivism extract
    Compas(CompasArgs),
    /// Law school survey extract
    Lawschool(LawschoolArgs),
}

#[derive(Debug, Args)]
pub struct CompasArgs {
    /// Raw compas-scores-two-years.csv
    #[arg(long)]
    pub raw: PathBuf,

    /// Directory for compas.csv and compas.spec.json
    #[arg(long, default_value = ".")]
    pub out: PathBuf,

    /// Decile score at or above which the prediction is positive.
    /// 8 reproduces the published global FPR ≈ 0.09 / FNR ≈ 0.70
    #[arg(long, default_value_t = 8)]
    pub cut: u32,
}

#[derive(Debug, Args)]
pub struct LawschoolArgs {
    /// Raw law_data.csv
    #[arg(long)]
    pub raw: PathBuf,

    /// Directory for lawschool.csv and lawschool.spec.json
    #[arg(long, default_value = ".")]
    pub out: PathBuf,

    /// Numeric code in the raw sex column meaning Female; other codes
    /// become Male
    #[arg(long, default_value_t = 1)]
    pub female_code: u32,
}

/// Parse argv, run, and map errors to exit codes. Clap reports usage errors
/// itself with exit code 2.
pub fn main_impl() -> i32 {
    env_logger::Builder::from_env(
        env_logger::Env::new().filter_or("DIVMINER_LOG", "warn"),
    )
    .format_timestamp(None)
    .init();

    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => pipeline::run(&args),
        Command::Prep(PrepCommand::Compas(args)) => prep::compas(&args),
        Command::Prep(PrepCommand::Lawschool(args)) => prep::lawschool(&args),
    };
    match outcome {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err:#}");
            if matches!(
                err.downcast_ref::<divminer::Error>(),
                Some(divminer::Error::RecordCap { .. })
            ) {
                EXIT_RECORD_CAP
            } else {
                EXIT_ERROR
            }
        }
    }
}
