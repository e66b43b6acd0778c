//! `linext`: exact statistics of uniform linear extensions, inequality
//! sweeps over poset catalogs, named constructions and samplers.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use config::{Config, Overrides};
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "linext", version, about = "Linear extension statistics and balance checks for finite posets")]
struct Cli {
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact statistics, geometry and balance measures of one poset
    Analyze {
        /// Poset file (text or JSON); stdin when absent or `-`
        file: Option<PathBuf>,
    },
    /// Run checks over every isomorphism class up to a size
    Verify {
        /// Largest poset size (at most 8)
        #[arg(long)]
        n: usize,
        /// Smallest poset size
        #[arg(long, default_value_t = 1)]
        min_n: usize,
        /// Comma-separated check names, or all, theorems, conjectures, reports
        #[arg(long, default_value = "all")]
        checks: String,
        /// Write JSON lines here instead of stdout
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Emit a named construction as a poset file
    Family(commands::FamilyArgs),
    /// Draw samples or Monte Carlo estimates for one poset
    Sample {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Sampled::Extension)]
        what: Sampled,
        #[arg(long, default_value_t = 10)]
        samples: u64,
        /// Element for `win` and `position` estimates
        #[arg(long)]
        element: Option<usize>,
    },
    /// Balance measures of a one-parameter family, as CSV
    Trend {
        /// chain, antichain, komlos or bit
        family: String,
        /// Comma-separated parameter values
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<u64>,
    },
    /// One poset per isomorphism class
    Catalog {
        #[arg(long)]
        n: usize,
        /// Include every size from 1 to n
        #[arg(long)]
        upto: bool,
        /// Write one text file per class into this directory
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Sampled {
    /// Uniform linear extensions
    Extension,
    /// Uniform points of the order polytope
    Point,
    /// Order-polytope points pushed to the chain polytope
    ChainPoint,
    /// Estimate of the expected window size of `--element`
    Win,
    /// Estimate of the expected position of `--element`
    Position,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = Config::load(&cli.overrides)?;
    match cli.command {
        Command::Analyze { file } => commands::analyze(&config, file.as_deref()),
        Command::Verify { n, min_n, checks, output } => commands::verify(&config, min_n, n, &checks, output.as_deref()),
        Command::Family(args) => commands::family(&config, &args),
        Command::Sample { file, what, samples, element } => commands::sample(&config, &file, what, samples, element),
        Command::Trend { family, n_list } => commands::trend(&config, &family, &n_list),
        Command::Catalog { n, upto, out } => commands::catalog(&config, n, upto, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("linext: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
