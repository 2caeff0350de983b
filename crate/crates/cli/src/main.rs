mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use flexhand_core::Error;

#[derive(Parser, Debug)]
#[command(name = "flexhand", version, about = "Flexible here-and-now design of energy supply systems")]
struct Cli {
    #[command(flatten)]
    run: RunArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// Instance JSON; the bundled instance when omitted.
    #[arg(long, global = true)]
    pub instance: Option<PathBuf>,
    /// Target number of points per Pareto front.
    #[arg(long, global = true, default_value_t = 10)]
    pub points: usize,
    /// `embedded` or `lpfile:<command>`.
    #[arg(long, global = true, default_value = "embedded")]
    pub solver: String,
    /// Comma-separated scenario ids; all scenarios when omitted.
    #[arg(long, global = true, value_delimiter = ',')]
    pub scenarios: Vec<String>,
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub mip_gap: f64,
    #[arg(long, global = true)]
    pub node_limit: Option<usize>,
    /// Seconds per solver call.
    #[arg(long, global = true)]
    pub time_limit: Option<f64>,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Omit the timestamp line from text outputs.
    #[arg(long, global = true)]
    pub no_header: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Ideal Pareto fronts per scenario.
    Ideal,
    /// Flex-hand design for each scenario separately.
    Flexhand,
    /// One robust flex-hand design for all selected scenarios.
    Robust,
    /// Compare closest-to-ideal and TOPSIS picks with the flex-hand design.
    Select {
        /// Comma-separated TOPSIS weights, one per objective.
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<f64>>,
    },
    /// Write scenario models and flex-hand MILPs as LP files.
    ExportLp,
    /// Solve an LP file with the embedded solver and write `<name> <value>` lines.
    #[command(hide = true)]
    SolveLp { model: PathBuf, solution: PathBuf },
}

pub struct CliError {
    pub code: u8,
    pub msg: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Infeasible(_) | Error::InfeasibleDesign(_) | Error::Unbounded(_) => 3,
            Error::LimitReached(_) | Error::ExternalSolver(_) => 4,
            _ => 2,
        };
        CliError { code, msg: e.to_string() }
    }
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError { code: 2, msg: msg.into() }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("FLEXHAND_LOG", "warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.run.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            log::warn!("cannot size thread pool: {e}");
        }
    }
    let res = match cli.command {
        Command::Ideal => commands::ideal(&cli.run),
        Command::Flexhand => commands::flexhand(&cli.run),
        Command::Robust => commands::robust(&cli.run),
        Command::Select { weights } => commands::select(&cli.run, weights.as_deref()),
        Command::ExportLp => commands::export_lp(&cli.run),
        Command::SolveLp { model, solution } => commands::solve_lp(&cli.run, &model, &solution),
    };
    match res {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.msg);
            ExitCode::from(e.code)
        }
    }
}
