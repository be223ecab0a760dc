use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "gtclab", version, about = "XZZX generalized toric and cyclic codes under biased noise")]
pub struct Cli {
    /// Worker threads (default: available cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// key=value file standing in for long flags; flags on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Write the effective options of this run as key=value lines.
    #[arg(long, global = true, value_name = "FILE")]
    pub save_config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum Command {
    /// Effective distance of one code.
    Distance(DistanceArgs),
    /// Convert between cyclic parameters and GTC lattices.
    Map(MapArgs),
    /// Close-to-optimal code search and frontier.
    Catalog(CatalogArgs),
    /// Monte Carlo logical error rates of one code.
    Simulate(SimulateArgs),
    /// Threshold fit over a family of codes.
    Threshold(ThresholdArgs),
    /// Static flag fault-tolerance check.
    Flagcheck(FlagcheckArgs),
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CodeArgs {
    /// First periodicity vector `a,b`.
    #[arg(long, allow_hyphen_values = true, requires = "l2")]
    pub l1: Option<String>,
    /// Second periodicity vector `c,d`.
    #[arg(long, allow_hyphen_values = true, requires = "l1")]
    pub l2: Option<String>,
    /// Cyclic code `n,a,b`.
    #[arg(long, conflicts_with_all = ["l1", "l2", "code"])]
    pub cyclic: Option<String>,
    /// `a,b,c,d` for a lattice or `n,a,b` for a cyclic code.
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["l1", "l2"])]
    pub code: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Independent,
    Correlated,
    Depolarizing,
    PureZ,
    PureX,
    PureY,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct DistanceArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub code: CodeArgs,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    #[arg(long, value_enum, default_value_t = Model::Independent)]
    pub model: Model,
    /// Cross-check with the exhaustive centralizer search.
    #[arg(long)]
    pub oracle: bool,
    /// Also run the grid approximation with this step.
    #[arg(long)]
    pub grid_eps: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct MapArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub code: CodeArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CatalogArgs {
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    #[arg(long, default_value_t = 10)]
    pub d_max: usize,
    /// Search a single target distance instead of the whole frontier.
    #[arg(long)]
    pub d_target: Option<f64>,
    #[arg(long, default_value_t = gtclab::optimizer::DEFAULT_DELTA)]
    pub delta: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SimulationArgs {
    #[arg(long, value_enum, default_value_t = Model::Independent)]
    pub model: Model,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    /// Grid `from:to:steps` of total error rates.
    #[arg(long, default_value = "0.02:0.08:7")]
    pub p: String,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, value_enum, default_value_t = DecoderChoice::Mwpm)]
    pub decoder: DecoderChoice,
    #[arg(long, env = "GTCLAB_SEED", default_value_t = 1)]
    pub seed: u64,
    /// Noisy syndrome measurements (rate p) over several rounds.
    #[arg(long)]
    pub phenomenological: bool,
    #[arg(long, requires = "phenomenological")]
    pub rounds: Option<usize>,
    /// CSV destination (default stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecoderChoice {
    Mwpm,
    Ml,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub code: CodeArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub sim: SimulationArgs,
    /// Fit `p_L ~ p^r` over `lo:hi`.
    #[arg(long)]
    pub fit: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ThresholdArgs {
    /// Smallest close-to-optimal code reaching each of these distances.
    #[arg(long, value_delimiter = ',', conflicts_with = "codes")]
    pub d_list: Vec<f64>,
    /// Explicit family, `;`-separated entries in the `--code` format.
    #[arg(long, allow_hyphen_values = true)]
    pub codes: Option<String>,
    #[arg(long, default_value_t = gtclab::optimizer::DEFAULT_DELTA)]
    pub delta: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub sim: SimulationArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    Correlated,
    Independent,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct FlagcheckArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub code: CodeArgs,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    #[arg(long, value_enum, default_value_t = Convention::Correlated)]
    pub convention: Convention,
    /// Fault budget (default `(d' - 1)/2`).
    #[arg(long)]
    pub t_prime: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub m_max: usize,
    /// Cap on enumerated fault combinations.
    #[arg(long, default_value_t = gtclab::flagft::FTEC_BUDGET)]
    pub budget: u64,
    /// Drop the flag gates (control experiment).
    #[arg(long)]
    pub no_flags: bool,
    /// Include the fault tables of the circuit pattern.
    #[arg(long)]
    pub tables: bool,
}
