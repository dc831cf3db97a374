use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use coatom_core::herm::{DEFAULT_GAP_TOL, DEFAULT_NULLSPACE_TOL, DEFAULT_RANK_TOL};
use coatom_core::SdpOptions;
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(
    name = "coatom-forge",
    version,
    about = "Ground-projector lattices, coatom certificates and extreme-point sampling"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Minimize over the spectrahedron in random directions and histogram the optimum ranks.
    Sample(SampleArgs),
    /// Certify whether the ground projector of a matrix (or a support set) is a coatom.
    Certify(CertifyArgs),
    /// List the classical three-bit coatoms as edge tables.
    EnumerateClassical(EnumerateArgs),
    /// Check M-feasibility of a support set and print its cylinder decomposition.
    FactorCheck(FactorArgs),
    /// Certify the rank-three family M(a,t) on a parameter grid.
    VerifyFamily(FamilyArgs),
    /// Sample the Cayley cubic spectrahedron and report its four vertices.
    CayleyDemo(CayleyArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SolverArgs {
    /// Stop when the barrier gap bound d/t falls below this.
    #[arg(long, default_value_t = 1e-9)]
    pub gap_tol: f64,
    /// Barrier parameter growth factor.
    #[arg(long, default_value_t = 4.0)]
    pub mu: f64,
    #[arg(long, default_value_t = 60)]
    pub max_outer: usize,
    #[arg(long, default_value_t = 100)]
    pub max_newton: usize,
}

impl SolverArgs {
    pub fn options(&self) -> SdpOptions {
        SdpOptions {
            gap_tol: self.gap_tol,
            mu: self.mu,
            max_outer: self.max_outer,
            max_newton: self.max_newton,
            ..SdpOptions::default()
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct OutputArgs {
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SampleArgs {
    /// c3-qubit, p3-qubit, c3-bit, p3-bit, c3-realtwo or cayley.
    #[arg(long, default_value = "c3-qubit")]
    pub model: String,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, env = "COATOM_FORGE_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (defaults to all cores); results do not depend on it.
    #[arg(long)]
    #[serde(skip)]
    pub workers: Option<usize>,
    /// Relative eigenvalue cutoff for numerical ranks.
    #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
    pub rank_tol: f64,
    /// Attach a coatom certificate of the kernel projector to every record.
    #[arg(long)]
    pub certify: bool,
    /// Leave per-trial records out of the report.
    #[arg(long)]
    pub omit_records: bool,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CertifyArgs {
    /// Model whose local space U is tested (c3-qubit, ..., or cayley).
    #[arg(long, default_value = "c3-qubit")]
    pub model: String,
    /// Matrix file: {"dim": d, "re": [[..]], "im": [[..]]}.
    #[arg(long, conflicts_with = "support", required_unless_present = "support")]
    pub matrix: Option<PathBuf>,
    /// Support of a diagonal projector: 8-character 0/1 mask or list like 000,111.
    #[arg(long)]
    pub support: Option<String>,
    /// Eigenvalue gap defining the ground space of the matrix.
    #[arg(long, default_value_t = DEFAULT_GAP_TOL)]
    pub gap_tol: f64,
    /// Relative singular value cutoff of the certificate nullspace.
    #[arg(long, default_value_t = DEFAULT_NULLSPACE_TOL)]
    pub tol: f64,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct EnumerateArgs {
    /// c3, c3ff or p3.
    #[arg(long, default_value = "c3")]
    pub model: String,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct FactorArgs {
    /// 8-character 0/1 mask (configurations 000..111 left to right) or list like 000,001.
    #[arg(long)]
    pub support: String,
    /// c3 or p3.
    #[arg(long, default_value = "c3")]
    pub graph: String,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct FamilyArgs {
    /// Comma-separated values of a in [0, 2].
    #[arg(long, default_value = "0.2,0.6,1.0,1.4,1.8")]
    pub a_grid: String,
    /// Comma-separated angles in [0, pi); forms like 3pi/8 are accepted.
    #[arg(long, default_value = "pi/8,pi/4,3pi/8,5pi/8,3pi/4")]
    pub t_grid: String,
    /// Also report the special lines a in {0,2}, t in {0, pi/2}.
    #[arg(long)]
    pub include_special: bool,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CayleyArgs {
    #[arg(long, default_value_t = 20000)]
    pub trials: usize,
    #[arg(long, env = "COATOM_FORGE_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    #[serde(skip)]
    pub workers: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
    pub rank_tol: f64,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}
