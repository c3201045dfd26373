use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "qcext", version, about = "Quantum-to-classical extractor laboratory")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a complete set of mutually unbiased bases.
    Mub(MubArgs),
    /// Build the affine permutation family of GF(q).
    Perms(PermsArgs),
    /// Check the unitary 2-design moment identity for a family.
    Design(DesignArgs),
    /// Entropies of a bipartite state read from a JSON matrix file.
    Entropy(EntropyArgs),
    /// Evaluate an extractor family on input states against its bound.
    Extract(ExtractArgs),
    /// Evaluate one row of the min-entropy uncertainty table.
    UrTable(UrTableArgs),
    /// Check the von Neumann uncertainty relation on random states.
    UrCheck(UrCheckArgs),
    /// Weak string erasure security parameters.
    WseParams(WseParamsArgs),
    /// Simulate honest runs of weak string erasure.
    WseSimulate(WseSimulateArgs),
}

#[derive(Args, Debug)]
pub struct Output {
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct MubArgs {
    #[arg(long)]
    pub dim: usize,
    /// Report the overlap and design defects.
    #[arg(long)]
    pub verify: bool,
    /// Include the member matrices.
    #[arg(long)]
    pub export: bool,
    #[command(flatten)]
    #[serde(skip)]
    pub output: Output,
}

#[derive(Args, Debug, Serialize)]
pub struct PermsArgs {
    #[arg(long)]
    pub q: usize,
    #[command(flatten)]
    #[serde(skip)]
    pub output: Output,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyArg {
    FullMub,
    MubPerm,
    Bitwise,
    BitwisePerm,
    Clifford,
    Haar,
}

#[derive(Args, Debug, Serialize)]
pub struct DesignArgs {
    #[arg(long, value_enum, default_value = "clifford")]
    pub family: FamilyArg,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Local dimension of the bitwise families.
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long = "dimA2", alias = "dim-a2", default_value_t = 1)]
    pub dim_a2: usize,
    /// Members sampled for the Haar family.
    #[arg(long, default_value_t = 32)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(skip)]
    pub output: Output,
}

#[derive(Args, Debug, Serialize)]
pub struct EntropyArgs {
    /// JSON matrix file.
    #[arg(long)]
    pub state: PathBuf,
    /// Subsystem dimensions as dA,dB.
    #[arg(long)]
    pub split: String,
    #[command(flatten)]
    #[serde(skip)]
    pub output: Output,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Serialize)]
pub struct ExtractArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long = "dimA", alias = "dim-a")]
    pub dim_a: usize,
    #[arg(long = "dimA1", alias = "dim-a1")]
    pub dim_a1: usize,
    #[arg(long = "dimE", alias = "dim-e", default_value_t = 1)]
    pub dim_e: usize,
    /// Named input state (pure0, mixed, maxent); random states otherwise.
    #[arg(long, conflicts_with = "state_file")]
    pub state: Option<String>,
    /// Input state as a JSON matrix on A ⊗ E.
    #[arg(long)]
    pub state_file: Option<PathBuf>,
    /// Number of random input states when no state is given.
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Local dimension of the bitwise families.
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Members of the Haar family.
    #[arg(long, default_value_t = 32)]
    pub count: usize,
    /// Evaluate a uniform subsample of this many members (non-certifying).
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    pub delta_prime: f64,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[command(flatten)]
    #[serde(skip)]
    pub output: Output,
}

#[derive(Args, Debug, Serialize)]
pub struct UrTableArgs {
    /// two-design, full-mub or bitwise.
    #[arg(long)]
    pub scheme: String,
    /// Comma-separated key=value list: k (min-entropy), eps, delta,
    /// delta-prime, dim-a, d, n.
    #[arg(long, default_value = "")]
    pub params: String,
    #[command(flatten)]
    #[serde(skip)]
    pub output: Output,
}

#[derive(Args, Debug, Serialize)]
pub struct UrCheckArgs {
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest side-information dimension; trials cycle through 1..=dimE.
    #[arg(long = "dimE", alias = "dim-e", default_value_t = 4)]
    pub dim_e: usize,
    #[command(flatten)]
    #[serde(skip)]
    pub output: Output,
}

#[derive(Args, Debug, Serialize)]
pub struct WseParamsArgs {
    #[arg(long)]
    pub n: u64,
    /// Storage rate: νn qubits are stored.
    #[arg(long)]
    pub nu: f64,
    #[arg(long)]
    pub eps: f64,
    #[arg(long)]
    pub delta_prime: f64,
    /// Strong-converse parameter of the storage channel at rate 1/ν.
    /// Without it the storage is taken to be noise-free.
    #[arg(long)]
    pub gamma: Option<f64>,
    #[command(flatten)]
    #[serde(skip)]
    pub output: Output,
}

#[derive(Args, Debug, Serialize)]
pub struct WseSimulateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write every transcript to this CSV file.
    #[arg(long)]
    pub transcripts: Option<PathBuf>,
    #[command(flatten)]
    #[serde(skip)]
    pub output: Output,
}
