//! `seer-lab`: batch front end.
//!
//! Exit codes: 0 success, 2 usage or input error, 3 verification failure.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use commands::{Family, Kind, Quantity, StateArg, StrategyArg};
use report::{Format, Report};

#[derive(Parser, Debug)]
#[command(
    name = "seer-lab",
    version,
    about = "Classical bounds, quantum values and certificates for contextuality games"
)]
struct Cli {
    /// Emit the JSON report envelope.
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// Emit CSV.
    #[arg(long, global = true)]
    csv: bool,
    /// Include wall-clock time (makes output non-reproducible).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classical bound, quantum value and certificate status.
    Bounds {
        family: Family,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Joint-measurability thresholds of noisy spin observables.
    Povm {
        /// Preset (orthogonal2, orthogonal3, trine2, trine3) or a JSON file
        /// holding an array of unit 3-vectors.
        #[arg(long)]
        axes: String,
        /// Sharpness at which to report a verdict per subset.
        #[arg(long)]
        eta: Option<f64>,
    },
    /// Frustration of a signed graph or contradiction in an implication graph.
    Network {
        file: PathBuf,
        #[arg(long)]
        directed: bool,
        /// Starting node (1-based) for implication chains.
        #[arg(long)]
        start: Option<usize>,
        /// Starting value, 0 or 1.
        #[arg(long)]
        value: Option<u8>,
    },
    /// Seeded Monte Carlo play of a prediction game.
    Game {
        kind: Kind,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value = "quantum")]
        strategy: StrategyArg,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Seer state for seer_ncycle.
        #[arg(long, default_value = "axis")]
        state: StateArg,
    },
    /// Classical bound and quantum value over a parameter range.
    Sweep {
        quantity: Quantity,
        /// A..B, inclusive.
        #[arg(long)]
        range: Option<String>,
        #[arg(long)]
        step: Option<f64>,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    /// Carries the partial report so the failing figures are still shown.
    Verify(String, Box<Report>),
}

impl From<seer_lab::Error> for CliError {
    fn from(e: seer_lab::Error) -> Self {
        if e.is_verification() {
            CliError::Verify(
                e.to_string(),
                Box::new(Report::new("error", Default::default())),
            )
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("SEER_LAB_THREADS") else {
        return Ok(());
    };
    let k: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&k| k >= 1)
        .ok_or_else(|| format!("SEER_LAB_THREADS must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(k)
        .build_global()
        .map_err(|e| e.to_string())
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    match &cli.command {
        Command::Bounds { family, n } => commands::bounds(*family, *n),
        Command::Povm { axes, eta } => commands::povm(axes, *eta),
        Command::Network {
            file,
            directed,
            start,
            value,
        } => commands::network(file, *directed, *start, *value),
        Command::Game {
            kind,
            n,
            strategy,
            trials,
            seed,
            state,
        } => commands::game(*kind, *n, *strategy, *trials, *seed, *state),
        Command::Sweep {
            quantity,
            range,
            step,
        } => commands::sweep(*quantity, range.as_deref(), *step),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    let format = if cli.json {
        Format::Json
    } else if cli.csv {
        Format::Csv
    } else {
        Format::Table
    };
    let started = Instant::now();
    let outcome = run(&cli);
    let elapsed = cli.timing.then(|| started.elapsed().as_secs_f64());
    match outcome {
        Ok(report) => {
            print!("{}", report.render(format, elapsed));
            ExitCode::SUCCESS
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Verify(msg, report)) => {
            if !report.rows.is_empty() {
                print!("{}", report.render(format, elapsed));
            }
            eprintln!("verification failed: {msg}");
            ExitCode::from(3)
        }
    }
}
