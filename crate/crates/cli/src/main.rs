//! `cardgauge` command-line interface.
//!
//! Exit statuses: 0 success, 1 gate failure, 2 usage/parse/config error,
//! 3 vacuous modules under the strict gate policy.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

const AFTER_HELP: &str = "\
Exit status:
  0  success, or gate passed
  1  gate failed: a gated module is insufficient
  2  usage, parse or configuration error
  3  gate failed: vacuously sufficient modules under the strict policy

Environment:
  CARDGAUGE_TAXONOMY  default for --taxonomy
  SOURCE_DATE_EPOCH   fixed timestamp for stats files and reports

Any file argument accepts `-` to read from stdin.";

/// Score model cards against a parameter taxonomy and gate releases on
/// documentation sufficiency.
#[derive(Parser, Debug)]
#[command(name = "cardgauge", version, about, long_about = None, after_help = AFTER_HELP)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct GlobalArgs {
    /// Taxonomy file (`-` for stdin). Defaults to the bundled taxonomy.
    #[arg(long, global = true, env = "CARDGAUGE_TAXONOMY", value_name = "PATH")]
    pub taxonomy: Option<PathBuf>,

    /// Accept a taxonomy with a module count other than eight.
    #[arg(long, global = true)]
    pub allow_extra_modules: bool,

    /// Replace the placeholder token list (one token per line).
    #[arg(long, global = true, value_name = "FILE")]
    pub placeholder_tokens: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build corpus statistics from a directory of cards or a manifest.
    Stats {
        /// Corpus directory, or manifest file (`-` for stdin).
        corpus: PathBuf,
        /// Where to write the stats file (`-` for stdout).
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Score a card and render the report.
    Score {
        #[command(flatten)]
        inputs: ScoreInputs,
        #[arg(long, value_enum, default_value_t = ReportFormatArg::Text)]
        format: ReportFormatArg,
        /// Write the report to a file instead of stdout.
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// List this scenario's modules first. Scores are unchanged.
        #[arg(long, value_name = "LABEL")]
        scenario: Option<String>,
    },
    /// Score a card and exit with the gate status (0, 1 or 3).
    Gate {
        #[command(flatten)]
        inputs: ScoreInputs,
        #[arg(long, value_enum, default_value_t = PolicyArg::Strict)]
        policy: PolicyArg,
        /// Gate only these modules (repeatable).
        #[arg(long = "module", value_name = "ID")]
        modules: Vec<String>,
        /// Suppress the one-line summary on stderr.
        #[arg(long, short)]
        quiet: bool,
    },
    /// Print the fill-first plan for one module.
    FillPlan {
        #[command(flatten)]
        inputs: ScoreInputs,
        #[arg(long, value_name = "ID")]
        module: String,
        #[arg(long, value_enum, default_value_t = PlanFormatArg::Text)]
        format: PlanFormatArg,
    },
    /// Task-family by module coverage over a corpus.
    Coverage {
        /// Corpus directory, or manifest file (`-` for stdin).
        corpus: PathBuf,
        #[arg(long, value_enum, default_value_t = MatrixFormatArg::Csv)]
        format: MatrixFormatArg,
        #[arg(long, value_enum, default_value_t = AggregateArg::Union)]
        aggregate: AggregateArg,
        /// Write output to a file instead of stdout.
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// Shorthand for `--format csv --out FILE`.
        #[arg(long, value_name = "FILE", conflicts_with_all = ["format", "out"])]
        csv: Option<PathBuf>,
        /// Also list cells below this coverage on stderr.
        #[arg(long, value_name = "RATIO")]
        gaps: Option<f64>,
    },
    /// Emit a blank card template.
    Template {
        #[arg(long, value_name = "ID")]
        module: Option<String>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Validate the taxonomy.
    Validate,
}

#[derive(Args, Debug)]
pub struct ScoreInputs {
    /// Card file (`-` for stdin).
    pub card: PathBuf,
    /// Corpus statistics file.
    #[arg(long, value_name = "FILE")]
    pub stats: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum ReportFormatArg {
    Text,
    Json,
    Markdown,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum PlanFormatArg {
    Text,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum MatrixFormatArg {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum AggregateArg {
    Union,
    Mean,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolicyArg {
    Strict,
    AllowVacuous,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(commands::EXIT_USAGE)
        }
    }
}
