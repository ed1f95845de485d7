//! Independent spectral oracle for quadratic Weyl operators.
//!
//! Everything in `quadgap-core` reduces spectral questions to finite
//! matrices built from the Hamilton map, which is one algebraic route.
//! This crate takes the other route: represent the operator itself on a
//! truncated Hermite basis and ask the matrix. The two never share an
//! intermediate, so agreement between them is evidence, not tautology.
//!
//! The basis is the tensor product of normalized Hermite functions with
//! `n_basis` levels per axis. Position acts tridiagonally and the
//! derivative acts antisymmetrically on that ladder; a quadratic symbol
//! becomes a sum of symmetrized products of two ladder operators, so the
//! assembled matrix is exact (no quadrature) and sparse with a handful of
//! entries per column.
//!
//! Pipeline: [`hermite_truncation`] fixes the basis, [`quantize`] builds
//! the operator, [`low_eigs`] extracts the low spectrum with a refinement
//! check, [`u0_expansion`] expands a Gaussian ground state in the same
//! basis, and [`semigroup_decay`] propagates an initial state and fits
//! the return-to-equilibrium rate.

mod eigs;
mod hermite;
mod quantize;
mod semigroup;

pub use eigs::{eigs_leftmost, low_eigs, LowEigsReport, SolverChoice, DENSE_EIG_MAX};
pub use hermite::{hermite_truncation, u0_expansion, HermiteTruncation, U0Expansion};
pub use quantize::{quantize, QuantizedOperator};
pub use semigroup::{semigroup_decay, SemigroupDecay};

use thiserror::Error;

/// Failure modes of the Galerkin pipeline.
#[derive(Debug, Error)]
pub enum GalerkinError {
    /// Fewer than four levels per axis cannot represent a quadratic
    /// symbol's action without the truncation edge touching level 0.
    #[error("truncation of {n_basis} levels per axis is too small (minimum 4)")]
    TruncationTooSmall { n_basis: usize },

    /// Basis dimension n_basis^n does not fit the dense workspace.
    #[error("basis dimension {dim} exceeds the supported limit {limit}")]
    TruncationTooLarge { dim: usize, limit: usize },

    /// Symbol and truncation disagree on the number of variables.
    #[error("symbol has {expected} variables but the truncation has {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The dense eigensolver did not converge.
    #[error("eigensolver failed: {0}")]
    EigenFailure(String),

    /// Krylov iteration stopped before the requested Ritz values settled.
    #[error("iterative eigensolver did not stabilize (residual {residual:.3e})")]
    IterationStalled { residual: f64 },

    /// The Gaussian is too wide or too narrow for a convergent Hermite
    /// expansion (spectral radius of the reflection coefficient >= 1).
    #[error("ground-state expansion does not converge (reflection radius {radius:.6})")]
    ExpansionDiverges { radius: f64 },

    /// Re-synthesis of the expanded Gaussian missed the target by more
    /// than the truncation tail can explain, so the coefficients are wrong.
    #[error("ground-state expansion inconsistent: synthesis error {synth_error:.3e} exceeds budget {budget:.3e}")]
    ExpansionInconsistent { synth_error: f64, budget: f64 },

    /// Semigroup propagation left the representable range.
    #[error("semigroup norm overflow ({norm:.3e})")]
    Overflow { norm: f64 },
}
