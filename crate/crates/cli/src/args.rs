//! Argument grammar. Parsing of grid and list syntax lives in
//! [`crate::table`]; this module is shape only.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "quadgap",
    version,
    about = "Spectral gaps of accretive quadratic differential operators"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analyze one symbol end to end and print the report.
    Analyze(AnalyzeArgs),
    /// Sweep the heat-bath spectral gap over coupling grids (CSV).
    Sweep(SweepArgs),
    /// Check the pipeline against every closed form for a model.
    Verify(VerifyArgs),
    /// Simulate the companion SDE ensemble (CSV + rate estimate).
    Simulate(SimulateArgs),
    /// Compare analytic spectrum against the Hermite Galerkin oracle.
    Oracle(OracleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    /// Kinetic Fokker-Planck operator with potential ½ax².
    Kfp,
    /// Two coupled oscillators between two heat baths.
    Chains,
    /// Generalized Langevin equation with m auxiliary modes.
    Gle,
}

/// Symbol source shared by analyze, verify, simulate and oracle: either
/// a built-in model with named parameters or a symbol file.
#[derive(Debug, Args)]
pub struct InputArgs {
    /// Built-in model family.
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,

    /// Symbol file: JSON with fields n, Q_re, Q_im (row-major 2n x 2n).
    #[arg(long, value_name = "FILE", conflicts_with = "model")]
    pub symbol: Option<PathBuf>,

    /// kfp: potential curvature; chains: first spring constant.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub a: f64,

    /// chains: second spring constant.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub b: f64,

    /// chains: coupling spring constant.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub c: f64,

    /// chains: reference temperature (must exceed max(alpha1, alpha2)/2).
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,

    /// chains: left bath temperature.
    #[arg(long, default_value_t = 1.0)]
    pub alpha1: f64,

    /// chains: right bath temperature.
    #[arg(long, default_value_t = 1.0)]
    pub alpha2: f64,

    /// gle: pinning frequency omega.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub omega: f64,

    /// gle: inverse temperature beta.
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,

    /// gle: number of bath modes (all couplings 1 unless lists given).
    #[arg(long, default_value_t = 1)]
    pub m: usize,

    /// gle: comma-separated friction list, overrides --m.
    #[arg(long, value_name = "LIST")]
    pub alphas: Option<String>,

    /// gle: comma-separated coupling list, overrides --m.
    #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
    pub lambdas: Option<String>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// Relative rank tolerance for the singular-space SVD cuts.
    #[arg(long = "tol-rank", default_value_t = quadgap_core::structure::TOL_RANK_REL)]
    pub tol_rank: f64,

    /// Write the full analysis bundle as JSON.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Pinning frequency omega.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub omega: f64,

    /// Inverse temperature beta.
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,

    /// Friction grid: "v", "lo:hi:count" or "lo:hi:count:log".
    #[arg(long, value_name = "GRID", default_value = "0.1:10:25:log")]
    pub alphas: String,

    /// Coupling grid, same syntax.
    #[arg(long, value_name = "GRID", default_value = "0.1:10:25:log")]
    pub lambdas: String,

    /// Fixed-gamma curve: gamma = lambda^2/alpha held at this value,
    /// alpha derived per lambda; --alphas is ignored.
    #[arg(long, value_name = "GAMMA")]
    pub gamma: Option<f64>,

    /// Write the CSV here instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// Hermite levels per axis for the Galerkin cross-check.
    #[arg(long = "N", value_name = "LEVELS")]
    pub n_basis: Option<usize>,

    /// Relative rank tolerance for the singular-space SVD cuts.
    #[arg(long = "tol-rank", default_value_t = quadgap_core::structure::TOL_RANK_REL)]
    pub tol_rank: f64,

    /// Ensemble size for the simulation checks.
    #[arg(long, default_value_t = 20_000)]
    pub paths: usize,

    /// RNG seed for the simulation checks.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,

    /// Skip the Galerkin and semigroup checks (closed forms only).
    #[arg(long)]
    pub fast: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// Time step (and statistics bin width).
    #[arg(long, default_value_t = 0.05)]
    pub dt: f64,

    /// Final time.
    #[arg(long = "t-final", default_value_t = 20.0)]
    pub t_final: f64,

    /// Number of paths.
    #[arg(long, default_value_t = 10_000)]
    pub paths: usize,

    /// RNG seed (statistics are reproducible per seed).
    #[arg(long, default_value_t = 1)]
    pub seed: u64,

    /// Integration scheme.
    #[arg(long, value_enum, default_value_t = SchemeArg::Em)]
    pub scheme: SchemeArg,

    /// Comma-separated initial point (default: first coordinate 1).
    #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
    pub x0: Option<String>,

    /// Write the CSV here instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    /// Euler-Maruyama.
    Em,
    /// Exact Gaussian transition kernel.
    Exact,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// Hermite levels per axis (default picked from the dimension).
    #[arg(long = "N", value_name = "LEVELS")]
    pub n_basis: Option<usize>,

    /// How many low eigenvalues to compare.
    #[arg(long, default_value_t = 5)]
    pub count: usize,

    /// Time grid "lo:hi:count" for a semigroup decay-rate row.
    #[arg(long, value_name = "GRID")]
    pub times: Option<String>,

    /// Mismatch threshold for the status column.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,

    /// Write the CSV here instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::Parser;

    #[test]
    fn negative_model_parameters_parse() {
        let cli = Cli::parse_from(["quadgap", "analyze", "--model", "kfp", "--a", "-2"]);
        let Command::Analyze(a) = cli.command else { panic!("wrong subcommand") };
        assert_eq!(a.input.a, -2.0);
        assert_eq!(a.input.model, Some(ModelKind::Kfp));
    }

    #[test]
    fn capital_n_flag_and_defaults() {
        let cli = Cli::parse_from(["quadgap", "verify", "--model", "kfp", "--N", "24"]);
        let Command::Verify(v) = cli.command else { panic!("wrong subcommand") };
        assert_eq!(v.n_basis, Some(24));
        assert_eq!(v.seed, 1);
        assert!(!v.fast);
    }

    #[test]
    fn model_conflicts_with_symbol_file() {
        let res = Cli::try_parse_from([
            "quadgap", "analyze", "--model", "kfp", "--symbol", "x.json",
        ]);
        assert!(res.is_err());
    }
}
