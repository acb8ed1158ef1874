mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use config::ExperimentConfig;

/// Exit codes: 0 success, 1 validation error, 2 runtime / numerical / io error.
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Runtime(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Runtime(m) => m,
        }
    }
}

impl From<pricing_core::Error> for CliError {
    fn from(e: pricing_core::Error) -> Self {
        use pricing_core::Error::*;
        match &e {
            InvalidParameter { .. } | OutOfDomain { .. } | EmptyInput(_) => {
                CliError::Validation(e.to_string())
            }
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyName {
    Bellman,
    Cec,
    Olfc,
}

impl PolicyName {
    pub fn as_str(&self) -> &'static str {
        match self {
            PolicyName::Bellman => "bellman",
            PolicyName::Cec => "cec",
            PolicyName::Olfc => "olfc",
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "pricer",
    version,
    about = "Dynamic pricing over a finite horizon: Bellman solver, suboptimal policies, paired Monte Carlo comparisons"
)]
pub struct Cli {
    /// Key-value (TOML) configuration file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Root seed for all random streams.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output CSV path (defaults to <command>.csv in the working directory).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Number of pricing periods.
    #[arg(long = "T", global = true, value_name = "T")]
    horizon: Option<usize>,

    /// Cost per unit of unsold stock.
    #[arg(long = "C", global = true, value_name = "C")]
    unsold_cost: Option<f64>,

    /// Disturbance standard deviation (shifted-Beta model).
    #[arg(long, global = true)]
    gamma: Option<f64>,

    /// Demand level parameter.
    #[arg(long, global = true)]
    q1: Option<f64>,

    /// Demand price-sensitivity parameter.
    #[arg(long, global = true)]
    q2: Option<f64>,

    /// Lower price bound.
    #[arg(long, global = true)]
    a_min: Option<f64>,

    /// Upper price bound.
    #[arg(long, global = true)]
    a_max: Option<f64>,

    /// Stock-grid size for the solver.
    #[arg(long = "K", global = true, value_name = "K")]
    state_points: Option<usize>,

    /// Candidate-price grid size for the solver's inner maximisation.
    #[arg(long = "M", global = true, value_name = "M")]
    price_points: Option<usize>,

    /// Monte Carlo samples per solver expectation.
    #[arg(long, global = true)]
    nexp: Option<usize>,

    /// Golden-section refinement iterations in the solver.
    #[arg(long, global = true)]
    refine_iters: Option<usize>,

    /// Number of simulated paths.
    #[arg(long, global = true)]
    nsim: Option<usize>,

    /// Sample-average size of the OLFC optimisation.
    #[arg(long, global = true)]
    nsaa: Option<usize>,

    /// OLFC optimiser tolerance.
    #[arg(long, global = true)]
    olfc_tol: Option<f64>,

    /// OLFC maximum coordinate sweeps.
    #[arg(long, global = true)]
    olfc_max_iters: Option<usize>,

    /// OLFC multistart count.
    #[arg(long, global = true)]
    multistart: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the Bellman recursion and emit the value/policy table as CSV.
    Solve,
    /// Simulate one policy from full stock and emit per-path prices and profits.
    Simulate {
        /// Policy to simulate.
        #[arg(value_enum, default_value = "bellman")]
        policy: PolicyName,
    },
    /// Simulate two policies on shared disturbance paths and print comparison statistics.
    Compare {
        /// Reference policy (positional).
        #[arg(value_enum)]
        a: Option<PolicyName>,
        /// Alternative policy (positional).
        #[arg(value_enum)]
        b: Option<PolicyName>,
        /// Reference policy (flag form; overrides the positional).
        #[arg(long, value_enum)]
        policy_a: Option<PolicyName>,
        /// Alternative policy (flag form; overrides the positional).
        #[arg(long, value_enum)]
        policy_b: Option<PolicyName>,
    },
    /// Compare the Bellman policy against a suboptimal policy over a (q1, q2) grid
    /// for a list of (C, gamma) pairs, one CSV row per cell.
    Sweep {
        /// Suboptimal policy to compare against.
        #[arg(long, value_enum, default_value = "cec")]
        policy_b: PolicyName,
        /// q1 grid as "min:max:count" or an explicit comma list "v1,v2,...".
        #[arg(long, default_value = "1.0:3.5:6")]
        q1_grid: String,
        /// q2 grid as "min:max:count" or an explicit comma list.
        #[arg(long, default_value = "2.0:5.0:6")]
        q2_grid: String,
        /// (C, gamma) pairs as "C:gamma,C:gamma,...".
        #[arg(long, default_value = "0.5:0.05,0.5:0.1,1.0:0.05,1.0:0.1")]
        pairs: String,
    },
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::Validation(format!("cannot read config {}: {e}", path.display()))
            })?;
            ExperimentConfig::from_toml(&text).map_err(CliError::Validation)?
        }
        None => ExperimentConfig::default(),
    };

    if let Some(v) = cli.seed {
        cfg.seed = v;
    }
    if let Some(v) = cli.horizon {
        cfg.horizon = v;
    }
    if let Some(v) = cli.unsold_cost {
        cfg.unsold_cost = v;
    }
    if let Some(v) = cli.gamma {
        cfg.gamma = v;
    }
    if let Some(v) = cli.q1 {
        cfg.q1 = v;
    }
    if let Some(v) = cli.q2 {
        cfg.q2 = v;
    }
    if let Some(v) = cli.a_min {
        cfg.a_min = v;
    }
    if let Some(v) = cli.a_max {
        cfg.a_max = v;
    }
    if let Some(v) = cli.state_points {
        cfg.state_points = v;
    }
    if let Some(v) = cli.price_points {
        cfg.price_points = v;
    }
    if let Some(v) = cli.nexp {
        cfg.n_exp = v;
    }
    if let Some(v) = cli.refine_iters {
        cfg.refine_iters = v;
    }
    if let Some(v) = cli.nsim {
        cfg.n_sim = v;
    }
    if let Some(v) = cli.nsaa {
        cfg.n_saa = v;
    }
    if let Some(v) = cli.olfc_tol {
        cfg.olfc_tol = v;
    }
    if let Some(v) = cli.olfc_max_iters {
        cfg.olfc_max_iters = v;
    }
    if let Some(v) = cli.multistart {
        cfg.olfc_multistart = v;
    }
    cfg.validate().map_err(CliError::Validation)?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = load_config(&cli)?;
    match &cli.command {
        Command::Solve => {
            let out = cli.out.unwrap_or_else(|| PathBuf::from("solve.csv"));
            commands::solve(&cfg, &out)
        }
        Command::Simulate { policy } => {
            let out = cli.out.unwrap_or_else(|| PathBuf::from("simulate.csv"));
            commands::simulate(&cfg, *policy, &out)
        }
        Command::Compare {
            a,
            b,
            policy_a,
            policy_b,
        } => {
            let out = cli.out.unwrap_or_else(|| PathBuf::from("compare.csv"));
            let first = policy_a.or(*a).unwrap_or(PolicyName::Bellman);
            let second = policy_b.or(*b).unwrap_or(PolicyName::Cec);
            commands::compare(&cfg, first, second, &out)
        }
        Command::Sweep {
            policy_b,
            q1_grid,
            q2_grid,
            pairs,
        } => {
            let out = cli.out.unwrap_or_else(|| PathBuf::from("sweep.csv"));
            let q1s = commands::parse_grid(q1_grid).map_err(CliError::Validation)?;
            let q2s = commands::parse_grid(q2_grid).map_err(CliError::Validation)?;
            let cg = commands::parse_pairs(pairs).map_err(CliError::Validation)?;
            commands::sweep(&cfg, *policy_b, &q1s, &q2s, &cg, cli.nsim, &out)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap's help/version output is not an error
            if e.use_stderr() {
                eprintln!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
