//! `i3`: score, rank and analyse articles with the Individual Impact Index.
//!
//! Exit codes: 0 on success, 1 for unreadable or invalid input, 2 when a
//! journal or impact factor cannot be resolved against the catalog.

mod commands;
mod format;

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use i3_core::IfMode;

#[derive(Debug, Parser)]
#[command(name = "i3", version, about = "Individual Impact Index scoring engine")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Journal catalog CSV (category,journal,issn,year,impact_factor)
    #[arg(long)]
    pub catalog: Option<PathBuf>,
    /// Articles CSV (article_id,journal,publication_date)
    #[arg(long)]
    pub articles: Option<PathBuf>,
    /// Citations CSV (article_id,citing_journal,citation_date)
    #[arg(long)]
    pub citations: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    /// Impact factors in force at each event, or the latest on record
    #[arg(long, value_enum, default_value_t = IfModeArg::Current)]
    pub if_mode: IfModeArg,
    /// Impact factor for citing journals missing from the catalog (default: error)
    #[arg(long)]
    pub fallback_if: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IfModeArg {
    Historical,
    Current,
}

impl From<IfModeArg> for IfMode {
    fn from(mode: IfModeArg) -> Self {
        match mode {
            IfModeArg::Historical => IfMode::Historical,
            IfModeArg::Current => IfMode::Current,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score articles
    Score {
        /// Article ids to score
        ids: Vec<String>,
        /// Score every article in the ledger
        #[arg(long, conflicts_with = "ids")]
        all: bool,
        /// Only count citations within this many whole years of publication
        #[arg(long)]
        as_of: Option<u32>,
    },
    /// Rank every article by score
    Rank {
        #[arg(long)]
        as_of: Option<u32>,
        /// Append the comparison against raw citation-count ranks
        #[arg(long)]
        matthew: bool,
        /// Print the percentile reference table of a category instead
        #[arg(long, value_name = "CATEGORY", conflicts_with = "matthew")]
        percentiles: Option<String>,
    },
    /// Yearly score series and citation ratios of one article
    Dynamics {
        article_id: String,
        #[arg(long, value_delimiter = ',', default_value = "1,5,10")]
        years: Vec<u32>,
    },
    /// Compute a category coefficient from a target score or a title count
    Calibrate {
        /// Target score in (0, 1) to reach at --fscore
        #[arg(long, requires = "fscore", conflicts_with = "phi")]
        target: Option<f64>,
        /// Reference citation mass for --target
        #[arg(long, requires = "target")]
        fscore: Option<f64>,
        /// Number of titles in the category
        #[arg(long, required_unless_present = "target")]
        phi: Option<u64>,
    },
    /// Emit score curves for plotting
    Curves {
        #[arg(long, value_delimiter = ',', required = true)]
        beta: Vec<f64>,
        #[arg(long = "max-f")]
        max_f: f64,
        #[arg(long, default_value_t = 101)]
        samples: usize,
    },
    /// Write a seeded synthetic catalog, articles and citations
    Gen {
        /// Number of articles to generate
        #[arg(long)]
        articles: usize,
        #[arg(long)]
        categories: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-category title counts, coefficients and mean impact factors
    CatalogStats,
}

/// Failure of a command, carrying its exit status.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Resolution(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Resolution(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Resolution(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let result = commands::run(&cli, &mut out);
    let flushed = out.flush();
    match (result, flushed) {
        (Ok(()), Ok(())) => ExitCode::SUCCESS,
        (Err(e), _) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
        (Ok(()), Err(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        (Ok(()), Err(e)) => {
            eprintln!("error: writing output: {e}");
            ExitCode::from(1)
        }
    }
}
