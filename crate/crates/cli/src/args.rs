use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "glocal", version, about = "Steady states, channels and entangling power of glocal two-qubit dissipation")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,

    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand. Unset flags fall back to the config file, then to defaults.
#[derive(Debug, Default, Args)]
pub struct CommonArgs {
    /// Weight of the global bath, in [0, 1].
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub gamma: Option<f64>,

    /// Thermal occupation of the global bath.
    #[arg(long = "n-g", global = true, allow_negative_numbers = true)]
    pub n_g: Option<f64>,

    /// Thermal occupation of the local baths.
    #[arg(long = "n-l", global = true, allow_negative_numbers = true)]
    pub n_l: Option<f64>,

    /// Evolution time. For `kraus`, omitting it selects the stationary map.
    #[arg(long = "t", global = true, allow_negative_numbers = true)]
    pub t: Option<f64>,

    #[arg(long, value_enum, global = true)]
    pub mode: Option<Mode>,

    /// Monte Carlo sample count.
    #[arg(long, global = true)]
    pub samples: Option<usize>,

    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// JSON file supplying any of the flags above.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// JSON file holding a 4x4 complex matrix (rows of [re, im] pairs).
    #[arg(long, global = true)]
    pub rho0: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Limit,
    Mc,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Limit => "limit",
            Mode::Mc => "mc",
        })
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Stationary state reached from rho0 (default |gg><gg|).
    Steady,
    /// State at time t evolved from rho0 (default |ee><ee|).
    Evolve,
    /// Kraus operators of the stationary map, or of the map at time t.
    Kraus {
        /// Use the closed-form time-t operators (gamma = 1, n_g = 0 only).
        #[arg(long)]
        analytic: bool,
    },
    /// Choi matrix of the map at time t.
    Choi,
    /// Haar-averaged stationary concurrence.
    Epower,
    /// Entangling power over a one- or two-axis parameter grid, as CSV.
    Scan {
        /// Axis as name:min:max:points[:log], with name one of gamma, n_g, n_l. Repeat for a second axis.
        #[arg(long = "axis")]
        axes: Vec<String>,
    },
    /// Optimal local noise n_l* and the maximal power along a gamma grid, as CSV.
    OptimalCurve {
        /// Comma-separated gamma values, each below 1.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        gammas: Vec<f64>,

        /// Upper end of the n_l search interval.
        #[arg(long)]
        search_max: Option<f64>,
    },
    /// Runs the built-in invariant suite.
    Selftest,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Steady => "steady",
            Command::Evolve => "evolve",
            Command::Kraus { .. } => "kraus",
            Command::Choi => "choi",
            Command::Epower => "epower",
            Command::Scan { .. } => "scan",
            Command::OptimalCurve { .. } => "optimal-curve",
            Command::Selftest => "selftest",
        }
    }
}
