//! The analysis bundle: everything `analyze` computes for one symbol,
//! serializable as JSON and comparable for lossless round-trip tests.

use crate::input::ResolvedInput;
use crate::CliError;
use quadgap_core::ground_state::{
    ground_state, orthogonality_check, positive_lagrangian, realness_check, GroundState,
    GroundStateError, TOL_POSITIVITY_REL,
};
use quadgap_core::hamilton::hamilton_map;
use quadgap_core::linalg::fro_norm;
use quadgap_core::spectrum::{analyze_spectrum, SpectrumError, SpectrumReport};
use quadgap_core::structure::{
    check_no_real_eigenvalues, singular_space, SingularSpaceReport, StructureError,
};
use quadgap_core::symbol::{AccretiveReport, TOL_PSD_REL};
use serde::{Deserialize, Serialize};

/// Relative floor on |Im λ| below which an eigenvalue of F counts as
/// real for the consistency flag.
pub const NO_REAL_EIG_TOL_REL: f64 = 1e-9;

/// Where the analyzed symbol came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Provenance {
    Model { name: String, params: Vec<(String, f64)> },
    File { path: String },
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Provenance::Model { name, params } => {
                let ps: Vec<String> =
                    params.iter().map(|(k, v)| format!("{k} = {v}")).collect();
                write!(f, "{name} model ({})", ps.join(", "))
            }
            Provenance::File { path } => write!(f, "file {path}"),
        }
    }
}

/// Consistency flags; each is computed, never assumed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckFlags {
    /// Re Q positive semidefinite (with its measured minimum eigenvalue).
    pub accretive: AccretiveReport,
    /// Quantization maps real functions to real functions.
    pub real_coefficients: bool,
    /// Ground state of the adjoint symbol is the conjugate ground state
    /// (the condition behind the rank-one spectral projection).
    pub orthogonality: bool,
    /// No eigenvalue of F on the real axis.
    pub no_real_eigenvalues: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisBundle {
    pub provenance: Provenance,
    pub checks: CheckFlags,
    pub singular: SingularSpaceReport,
    pub spectrum: SpectrumReport,
    pub ground_state: GroundState,
}

fn structure_err(e: StructureError) -> CliError {
    CliError::Ambiguous(e.to_string())
}

fn spectrum_err(e: SpectrumError) -> CliError {
    CliError::Ambiguous(e.to_string())
}

fn gs_err(e: GroundStateError) -> CliError {
    CliError::Ambiguous(e.to_string())
}

/// Run the full pipeline: accretivity gate, singular space, spectrum,
/// ground state, consistency flags.
///
/// A nontrivial singular space aborts with [`CliError::Singular`]
/// carrying the report; the spectral quantities are undefined there.
pub fn build_bundle(input: &ResolvedInput, tol_rank: f64) -> Result<AnalysisBundle, CliError> {
    if !(tol_rank > 0.0 && tol_rank < 1.0) {
        return Err(CliError::Domain(format!(
            "--tol-rank must lie strictly between 0 and 1, got {tol_rank}"
        )));
    }
    let sym = &input.symbol;
    let scale = sym.norm().max(f64::MIN_POSITIVE);
    let accretive = sym.check_accretive(TOL_PSD_REL * scale);
    if !accretive.is_psd {
        return Err(CliError::Domain(format!(
            "Re q is not positive semidefinite (min eigenvalue {:.3e}); only accretive \
             symbols are in scope",
            accretive.min_eig
        )));
    }

    let map = hamilton_map(sym);
    let singular = singular_space(&map, tol_rank).map_err(structure_err)?;
    if singular.dim > 0 {
        return Err(CliError::Singular(Box::new(singular)));
    }

    let fnorm = fro_norm(&map.f).max(f64::MIN_POSITIVE);
    let no_real_eigenvalues = check_no_real_eigenvalues(&map, NO_REAL_EIG_TOL_REL * fnorm);
    let spectrum = analyze_spectrum(&map).map_err(spectrum_err)?;

    let plane = positive_lagrangian(&map, TOL_POSITIVITY_REL).map_err(gs_err)?;
    let ground_state = ground_state(&plane, spectrum.mu0).map_err(gs_err)?;

    let adjoint = hamilton_map(&sym.conj());
    let orthogonality = orthogonality_check(&map, &adjoint).map_err(gs_err)?;
    let real_coefficients = realness_check(sym);

    Ok(AnalysisBundle {
        provenance: input.provenance.clone(),
        checks: CheckFlags {
            accretive,
            real_coefficients,
            orthogonality,
            no_real_eigenvalues,
        },
        singular,
        spectrum,
        ground_state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::input::resolve;
    use clap::Parser;
    use quadgap_core::structure::TOL_RANK_REL;

    fn resolved(argv: &[&str]) -> ResolvedInput {
        let mut full = vec!["quadgap", "analyze"];
        full.extend_from_slice(argv);
        let cli = crate::Cli::parse_from(full);
        let crate::Command::Analyze(a) = cli.command else { panic!() };
        resolve(&a.input).unwrap()
    }

    #[test]
    fn kfp_unit_bundle_reproduces_the_headline_numbers() {
        let input = resolved(&["--model", "kfp", "--a", "1"]);
        let b = build_bundle(&input, TOL_RANK_REL).unwrap();
        assert!((b.spectrum.mu0.re - 0.5).abs() < 1e-9);
        assert!(b.spectrum.mu0.im.abs() < 1e-9);
        assert!((b.spectrum.tau0 - 0.5).abs() < 1e-9);
        assert_eq!(b.singular.k0, Some(1));
        assert_eq!(b.singular.partial_kernels, vec![2, 0]);
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 0.25 } else { 0.0 };
                let z = b.ground_state.a[(i, j)];
                assert!((z.re - want).abs() < 1e-9 && z.im.abs() < 1e-9, "A[{i}{j}] = {z}");
            }
        }
        assert!(b.checks.accretive.is_psd);
        assert!(b.checks.real_coefficients);
        assert!(b.checks.orthogonality);
        assert!(b.checks.no_real_eigenvalues);
    }

    #[test]
    fn bundle_round_trips_losslessly_through_json() {
        let input = resolved(&["--model", "gle", "--m", "2", "--omega", "1.3"]);
        let b = build_bundle(&input, TOL_RANK_REL).unwrap();
        let text = serde_json::to_string_pretty(&b).unwrap();
        let back: AnalysisBundle = serde_json::from_str(&text).unwrap();
        assert_eq!(b, back);
    }

    #[test]
    fn degenerate_chains_aborts_with_the_singular_report() {
        let input = resolved(&["--model", "chains"]);
        let err = build_bundle(&input, TOL_RANK_REL).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        let CliError::Singular(rep) = err else { panic!("expected singular report") };
        assert!(rep.dim >= 1);
        assert_eq!(rep.basis.ncols(), rep.dim);
    }

    #[test]
    fn non_accretive_file_symbols_are_domain_errors() {
        use quadgap_core::symbol::{make_symbol, PhaseDim};
        use quadgap_core::{C64, CMat};
        let mut q = CMat::zeros(2, 2);
        q[(0, 0)] = C64::new(-1.0, 0.0);
        q[(1, 1)] = C64::new(1.0, 0.0);
        let input = ResolvedInput {
            symbol: make_symbol(PhaseDim::new(1), q).unwrap(),
            provenance: Provenance::File { path: "inline".into() },
            sde: None,
            detail: crate::input::ModelDetail::External,
        };
        let err = build_bundle(&input, TOL_RANK_REL).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
