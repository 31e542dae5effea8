//! `xlvrp`: generate, validate, solve, score and summarize XL-style CVRP
//! instances.
//!
//! Exit status is 0 on success, 1 when the command ran but the result is a
//! domain failure (infeasible solution, unproven fleet size), and 2 for
//! usage, parse and I/O errors.

mod generate;
mod io;
mod score;
mod solve;
mod stats;
mod validate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "xlvrp", version, about = "XL CVRP benchmark toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate instances from a manifest or a single inline spec.
    Generate(GenerateArgs),
    /// Check a solution against an instance.
    Validate(ValidateArgs),
    /// Run the baseline solver on an instance.
    Solve(SolveArgs),
    /// Replay a submission log and compute lead-time scores.
    Score(ScoreArgs),
    /// Summarize run results against best known solutions.
    Stats(StatsArgs),
}

#[derive(Args)]
pub struct GenerateArgs {
    /// Manifest with `n_total,depot,cust,demand,route_class,seed[,name]` rows.
    #[arg(long, conflicts_with_all = ["n_total", "depot", "customers", "demand", "route"])]
    pub manifest: Option<PathBuf>,
    /// Generate the bundled 100-row XL manifest.
    #[arg(long, conflicts_with = "manifest")]
    pub xl_set: bool,
    /// Total number of points, depot included (inline spec).
    #[arg(long)]
    pub n_total: Option<usize>,
    /// Depot position: R, C or E.
    #[arg(long)]
    pub depot: Option<String>,
    /// Customer positioning: R, C or RC.
    #[arg(long)]
    pub customers: Option<String>,
    /// Demand distribution: U, 1-10, 5-10, 1-100, 50-100, Q or SL.
    #[arg(long)]
    pub demand: Option<String>,
    /// Route size class: US, VS, S, M, L, VL or UL.
    #[arg(long)]
    pub route: Option<String>,
    /// Seed of an inline spec; with a manifest, added to every row seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Seconds allowed to prove the minimum fleet size of each instance.
    #[arg(long, default_value_t = 60.0)]
    pub kmin_budget: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct ValidateArgs {
    pub instance: PathBuf,
    pub solution: PathBuf,
}

#[derive(Args)]
pub struct SolveArgs {
    pub instance: PathBuf,
    /// Wall-clock limit per run, in seconds.
    #[arg(long)]
    pub time: Option<f64>,
    /// Perturbation rounds per run; without --time the run is reproducible.
    #[arg(long)]
    pub iterations: Option<u64>,
    /// Seed of the first run; run i uses seed + i.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub runs: u32,
    /// Method label written to the runs CSV.
    #[arg(long, default_value = "baseline")]
    pub method: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct ScoreArgs {
    /// Lines `day_offset,team,instance,cost_or_solution_path`.
    pub events: PathBuf,
    /// Initial BKS table (`instance,cost[,method]`); defaults to the XL set.
    #[arg(long)]
    pub bks: Option<PathBuf>,
    /// Directory holding `<instance>.vrp` files for solution payloads.
    #[arg(long)]
    pub instances: Option<PathBuf>,
    #[arg(long, default_value_t = 30.0)]
    pub horizon: f64,
    #[arg(long, default_value_t = 5.0)]
    pub bonus: f64,
    /// Directory for `scores.csv` and `totals.csv`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct StatsArgs {
    /// Runs CSV (`instance,method,seed,elapsed_s,cost`).
    pub runs: PathBuf,
    /// BKS table; defaults to the XL set's initial BKS.
    #[arg(long)]
    pub bks: Option<PathBuf>,
    /// Manifest with instance names, for per-attribute averages.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Also average separately below and above this many customers.
    #[arg(long)]
    pub split: Option<usize>,
    /// Print CSV instead of aligned text.
    #[arg(long)]
    pub csv: bool,
}

/// How a command failed.
#[derive(Debug)]
pub enum Failure {
    /// The command ran; the verdict is negative.
    Domain(String),
    /// Bad input, bad usage or an I/O problem.
    Usage(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.into())
    }
}

pub type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => generate::run(a),
        Command::Validate(a) => validate::run(a),
        Command::Solve(a) => solve::run(a),
        Command::Score(a) => score::run(a),
        Command::Stats(a) => stats::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
