//! Command-line surface for the quadratic-operator pipeline.
//!
//! One binary, five subcommands:
//!
//! * `analyze` - full report for one symbol: accretivity, singular
//!   space, spectrum, ground state, consistency flags;
//! * `sweep` - spectral gap τ₀ over (α, λ) grids of the Langevin
//!   heat-bath model, or along a fixed-γ curve;
//! * `verify` - consolidated pass/fail checks of the pipeline against
//!   every closed form known for the chosen model;
//! * `simulate` - SDE ensemble statistics as CSV plus an empirical
//!   decay-rate estimate;
//! * `oracle` - side-by-side table of analytic spectrum vs Hermite
//!   Galerkin eigenvalues.
//!
//! Exit codes are part of the interface: 0 success, 1 failed verify
//! check, 2 parse or domain error, 3 nontrivial singular space,
//! 4 numerical ambiguity.

pub mod args;
pub mod bundle;
pub mod commands;
pub mod input;
pub mod table;
pub mod verify;

pub use args::{Cli, Command};
pub use bundle::{build_bundle, AnalysisBundle, CheckFlags, Provenance};
pub use input::{resolve, ModelDetail, ResolvedInput};

use quadgap_core::structure::SingularSpaceReport;
use thiserror::Error;

/// Errors mapped onto process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad input: unparsable file, invalid parameter, unusable request.
    #[error("{0}")]
    Domain(String),
    /// S ≠ {0}: the spectral stages do not apply. Carries the report so
    /// callers can print the basis.
    #[error("singular space is nontrivial (dim S = {})", .0.dim)]
    Singular(Box<SingularSpaceReport>),
    /// A tolerance-sensitive decision could not be made cleanly.
    #[error("{0}")]
    Ambiguous(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) | CliError::Io(_) => 2,
            CliError::Singular(_) => 3,
            CliError::Ambiguous(_) => 4,
        }
    }
}

/// Run one parsed command, returning the process exit code.
pub fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Analyze(a) => commands::cmd_analyze(&a),
        Command::Sweep(a) => commands::cmd_sweep(&a),
        Command::Verify(a) => verify::cmd_verify(&a),
        Command::Simulate(a) => commands::cmd_simulate(&a),
        Command::Oracle(a) => commands::cmd_oracle(&a),
    }
}
