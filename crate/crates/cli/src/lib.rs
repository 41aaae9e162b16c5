//! `gsvkit` command-line front-end.

pub mod commands;
pub mod error;
pub mod io;
pub mod report;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{cmd_coil, cmd_density, cmd_rank, cmd_solve, GlobalOpts};
pub use error::CliError;
pub use report::RunReport;

#[derive(Debug, Parser)]
#[command(name = "gsvkit", version, about = "Generalized supporting vector toolkit")]
pub struct Cli {
    /// Relative gap under which eigenvalues merge with the maximum.
    #[arg(long, global = true, default_value_t = gsvkit_core::DEFAULT_GAP_RTOL)]
    pub gap_rtol: f64,

    /// Random unit directions for the brute-force lower bound (0 disables it).
    #[arg(long, global = true, default_value_t = 0)]
    pub oracle_samples: usize,

    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,

    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Maximize sum_i ||A_i x||^2 over unit x; writes solution.json.
    Solve {
        /// Headerless CSV matrices sharing a column count.
        #[arg(required = true)]
        matrices: Vec<PathBuf>,
    },
    /// Weighted stream-function solve; writes psi.csv and psi_normalized.csv.
    Coil {
        ex: PathBuf,
        ey: PathBuf,
        ez: PathBuf,
        /// Symmetric positive definite resistance matrix.
        r: PathBuf,
    },
    /// Rank rows of an `id,...` table by supporting-vector score.
    Rank {
        data: PathBuf,
        /// Treat the numeric columns as already standardized.
        #[arg(long)]
        no_standardize: bool,
    },
    /// Norm, trace and positivity of a truncated density operator.
    Density {
        /// Single-column CSV with header `rho`.
        rho: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
    },
}

impl Cli {
    pub fn opts(&self) -> GlobalOpts {
        GlobalOpts {
            gap_rtol: self.gap_rtol,
            oracle_samples: self.oracle_samples,
            seed: self.seed,
            out: self.out.clone(),
        }
    }
}

pub fn run(cli: &Cli) -> Result<RunReport, CliError> {
    let opts = cli.opts();
    match &cli.command {
        Command::Solve { matrices } => cmd_solve(matrices, &opts),
        Command::Coil { ex, ey, ez, r } => cmd_coil(ex, ey, ez, r, &opts),
        Command::Rank { data, no_standardize } => cmd_rank(data, !no_standardize, &opts),
        Command::Density { rho, trials } => cmd_density(rho, *trials, &opts),
    }
}
