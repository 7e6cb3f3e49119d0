use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod render;

use commands::Outcome;

#[derive(Parser, Debug)]
#[command(name = "ghzbell", version, about = "Three-setting GHZ Bell inequality toolkit")]
struct Cli {
    /// Worker threads for parallel loops; never changes output.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    workers: Option<u32>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Human,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Brute,
    Factorized,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Policy {
    RoundRobin,
    UniformRandom,
}

fn unit_interval(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(format!("{x} is outside [0, 1]"))
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Maximum of S over local deterministic strategies, against the quantum value.
    Bound {
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
        n: u32,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Critical visibilities and efficiencies for N = 2..n_max.
    Thresholds {
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
        n_max: u32,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Monte Carlo run of an imperfect experiment.
    Simulate {
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..=12))]
        n: u32,
        #[arg(long, value_parser = unit_interval)]
        v: f64,
        #[arg(long, value_parser = unit_interval)]
        eta: f64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, env = "GHZBELL_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Policy::RoundRobin)]
        policy: Policy,
        /// Also write every trial as `s_1 … s_N | m_1 … m_N` lines.
        #[arg(long)]
        records: Option<std::path::PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Simulated violation test over a grid of visibilities.
    Sweep {
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..=12))]
        n: u32,
        #[arg(long, value_parser = unit_interval)]
        eta: f64,
        /// Comma-separated visibilities, e.g. `0.45,0.5,0.55`.
        #[arg(long, value_delimiter = ',', required = true, value_parser = unit_interval)]
        v_grid: Vec<f64>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, env = "GHZBELL_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Runs the identity suite; exits 1 if any check fails.
    Verify {
        /// Largest N for the exhaustive strategy search.
        #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u32).range(2..=8))]
        n_max: u32,
        /// Corrupt the named check to exercise the failure path.
        #[arg(long)]
        inject_fault: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let workers = cli.workers.map(|w| w as usize);
    match ghzbell::exec::with_workers(workers, || commands::run(cli.command)) {
        Ok(Outcome { text, success }) => {
            print!("{text}");
            if success {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(commands::CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(commands::CliError::Failure(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
