//! The `verify` subcommand: every closed form known for a model,
//! checked against the pipeline and printed as one line per check.

use crate::args::VerifyArgs;
use crate::bundle::{build_bundle, AnalysisBundle};
use crate::commands::{default_levels, excited_decay, galerkin_low, sde_err};
use crate::input::{resolve, ModelDetail, ResolvedInput};
use crate::table::fmt_c;
use crate::CliError;
use quadgap_core::ground_state::exponent_description;
use quadgap_core::linalg::{complex_eigenvalues, complexify, fro_norm, fro_norm_r};
use quadgap_core::models::{
    drift_matches_spectrum, gle_char_poly_m1, gle_ground_state_exponent, gle_tau0_closed_m1,
    hamilton_char_poly, kfp_ground_state_exponent, LinearSDE,
};
use quadgap_core::sde::{simulate, stationary_covariance, Scheme, SimConfig};
use quadgap_core::spectrum::kfp_closed_forms;
use quadgap_core::{C64, RMat};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skip,
    /// The check fails and is expected to: the hypothesis behind it is
    /// absent for these parameters.
    Absent,
    /// Measured value with no closed form to hold it against.
    Info,
}

impl Status {
    fn word(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
            Status::Absent => "ABSENT",
            Status::Info => "INFO",
        }
    }
}

#[derive(Debug)]
pub struct CheckLine {
    pub status: Status,
    pub name: &'static str,
    pub detail: String,
}

pub struct VerifyOutcome {
    pub lines: Vec<CheckLine>,
    pub provenance: String,
}

impl VerifyOutcome {
    pub fn failed(&self) -> usize {
        self.lines.iter().filter(|l| l.status == Status::Fail).count()
    }

    pub fn render(&self) -> String {
        use std::fmt::Write as _;
        let mut s = String::new();
        for l in &self.lines {
            let _ = writeln!(s, "{:<6} {:<24} {}", l.status.word(), l.name, l.detail);
        }
        let count = |st: Status| self.lines.iter().filter(|l| l.status == st).count();
        let _ = writeln!(
            s,
            "verify: {}: {} passed, {} failed, {} skipped, {} expected-absent, {} informational",
            self.provenance,
            count(Status::Pass),
            count(Status::Fail),
            count(Status::Skip),
            count(Status::Absent),
            count(Status::Info),
        );
        s
    }
}

fn passes(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

/// Smallest drift decay rate min |Re σ(B)|; equals τ₀ whenever the SDE
/// matches the operator's spectrum.
fn drift_gap(sde: &LinearSDE) -> f64 {
    complex_eigenvalues(&complexify(&sde.drift))
        .iter()
        .map(|z| z.re.abs())
        .fold(f64::INFINITY, f64::min)
}

/// Sign-relaxed drift check: each σ(B) member matches 2iλ or −2iλ for
/// some cluster eigenvalue λ.
fn drift_in_pm_spectrum(
    sde: &LinearSDE,
    clusters: &[quadgap_core::spectrum::EigenCluster],
    tol: f64,
) -> bool {
    let mut candidates: Vec<C64> = Vec::new();
    for c in clusters {
        let v = C64::new(0.0, 2.0) * c.lambda;
        for _ in 0..c.r {
            candidates.push(v);
            candidates.push(-v);
        }
    }
    for b in complex_eigenvalues(&complexify(&sde.drift)) {
        let Some(pos) = candidates.iter().position(|c| (c - b).norm() <= tol) else {
            return false;
        };
        candidates.swap_remove(pos);
    }
    true
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<i32, CliError> {
    let input = resolve(&args.input)?;
    let outcome = run_verify(&input, args)?;
    print!("{}", outcome.render());
    Ok(if outcome.failed() == 0 { 0 } else { 1 })
}

pub fn run_verify(input: &ResolvedInput, args: &VerifyArgs) -> Result<VerifyOutcome, CliError> {
    let provenance = input.provenance.to_string();
    let mut lines: Vec<CheckLine> = Vec::new();
    let mut push = |status: Status, name: &'static str, detail: String| {
        lines.push(CheckLine { status, name, detail });
    };

    let bundle = match build_bundle(input, args.tol_rank) {
        Ok(b) => b,
        Err(CliError::Singular(rep)) => {
            // The degenerate chains branch is the one place a nontrivial
            // S is the expected answer rather than an abort.
            let expected = matches!(input.detail, ModelDetail::Chains { m_c } if m_c == 0.0);
            let status = passes(expected);
            push(
                status,
                "singular-space",
                format!(
                    "dim S = {} (partial kernel dims {:?}){}",
                    rep.dim,
                    rep.partial_kernels,
                    if expected { ", nontrivial as expected for m_c = 0" } else { "" }
                ),
            );
            return Ok(VerifyOutcome { lines, provenance });
        }
        Err(e) => return Err(e),
    };

    push(
        passes(bundle.checks.accretive.is_psd),
        "accretive",
        format!("min eig Re Q = {}", bundle.checks.accretive.min_eig),
    );

    match &input.detail {
        ModelDetail::Kfp { a } => verify_kfp(*a, input, &bundle, args, &mut push)?,
        ModelDetail::Chains { m_c } => verify_chains(*m_c, &bundle, &mut push),
        ModelDetail::Gle { omega, beta, alphas, lambdas } => {
            verify_gle(*omega, *beta, alphas, lambdas, input, &bundle, args, &mut push)?
        }
        ModelDetail::External => verify_external(input, &bundle, args, &mut push)?,
    }

    Ok(VerifyOutcome { lines, provenance })
}

fn singular_line(
    bundle: &AnalysisBundle,
    expect_k0: usize,
    expect_partial: Option<&[usize]>,
    push: &mut impl FnMut(Status, &'static str, String),
) {
    let k0_ok = bundle.singular.k0 == Some(expect_k0);
    let partial_ok = expect_partial.is_none_or(|want| bundle.singular.partial_kernels == want);
    push(
        passes(k0_ok && partial_ok),
        "singular-space",
        format!(
            "S = {{0}}, k0 = {:?} (expected {}), partial kernel dims {:?}{}",
            bundle.singular.k0,
            expect_k0,
            bundle.singular.partial_kernels,
            expect_partial.map_or(String::new(), |w| format!(" (expected {w:?})")),
        ),
    );
}

fn no_real_line(bundle: &AnalysisBundle, push: &mut impl FnMut(Status, &'static str, String)) {
    push(
        passes(bundle.checks.no_real_eigenvalues),
        "no-real-eigenvalues",
        "every Hamilton eigenvalue is off the real axis".into(),
    );
}

fn orthogonality_line(
    bundle: &AnalysisBundle,
    expected: Option<bool>,
    context: &str,
    push: &mut impl FnMut(Status, &'static str, String),
) {
    let measured = bundle.checks.orthogonality;
    match expected {
        Some(true) => push(
            passes(measured),
            "orthogonality",
            format!("adjoint ground state is the conjugate ground state{context}"),
        ),
        Some(false) => {
            if measured {
                push(
                    Status::Fail,
                    "orthogonality",
                    format!("holds but was expected absent{context}"),
                );
            } else {
                push(
                    Status::Absent,
                    "orthogonality",
                    format!("failed by design (expected absent){context}"),
                );
            }
        }
        None => push(
            Status::Info,
            "orthogonality",
            format!("measured: {}", if measured { "holds" } else { "does not hold" }),
        ),
    }
}

fn galerkin_line(
    input: &ResolvedInput,
    bundle: &AnalysisBundle,
    args: &VerifyArgs,
    tol: f64,
    push: &mut impl FnMut(Status, &'static str, String),
) -> Result<(), CliError> {
    if args.fast {
        push(Status::Skip, "galerkin-lowest", "--fast".into());
        return Ok(());
    }
    let n = input.symbol.dim().n();
    let n_basis = match args.n_basis {
        Some(nb) => nb,
        None => match default_levels(n) {
            Ok(nb) => nb,
            Err(_) => {
                push(
                    Status::Skip,
                    "galerkin-lowest",
                    format!("{n} position axes exceed the default basis budget; pass --N"),
                );
                return Ok(());
            }
        },
    };
    let (_, report) = galerkin_low(&input.symbol, n_basis, 3)?;
    let lowest = report.eigenvalues[0];
    let err = (lowest - bundle.spectrum.mu0).norm();
    push(
        passes(err <= tol && report.converged[0]),
        "galerkin-lowest",
        format!(
            "N = {n_basis}: lowest eigenvalue {} vs mu0 {}, |err| = {err:.3e}{}",
            fmt_c(lowest),
            fmt_c(bundle.spectrum.mu0),
            if report.converged[0] { "" } else { " (refinement did not settle)" },
        ),
    );
    Ok(())
}

fn semigroup_line(
    input: &ResolvedInput,
    bundle: &AnalysisBundle,
    n_basis: usize,
    push: &mut impl FnMut(Status, &'static str, String),
) -> Result<(), CliError> {
    let op = crate::commands::build_operator(&input.symbol, n_basis)?;
    let t_grid: Vec<f64> = (0..40).map(|i| 2.0 + 10.0 * i as f64 / 39.0).collect();
    let decay = excited_decay(&op, &bundle.ground_state, &t_grid)?;
    let tau0 = bundle.spectrum.tau0;
    let rel = (decay.fitted_rate - tau0).abs() / tau0;
    push(
        passes(rel <= 0.05),
        "semigroup-rate",
        format!(
            "first excited state decays at {} vs tau0 = {tau0} ({:.2}% off, window {:?}, R^2 = {:.4})",
            decay.fitted_rate,
            100.0 * rel,
            decay.window,
            decay.r2
        ),
    );
    Ok(())
}

/// Stationarity identity, equilibrium-vs-ground-state consistency, and
/// the sampled mean-decay rate; `hurwitz_reason` explains a skip.
#[allow(clippy::too_many_arguments)]
fn sde_lines(
    sde: Option<&LinearSDE>,
    bundle: &AnalysisBundle,
    args: &VerifyArgs,
    stable: bool,
    unstable_reason: &str,
    push: &mut impl FnMut(Status, &'static str, String),
) -> Result<(), CliError> {
    let Some(sde) = sde else {
        push(Status::Skip, "sde-stationarity", "model has no companion SDE".into());
        return Ok(());
    };
    if !stable {
        push(Status::Skip, "sde-stationarity", unstable_reason.into());
        push(Status::Skip, "sde-mean-decay", unstable_reason.into());
        return Ok(());
    }

    let sig = &sde.noise * sde.noise.transpose();
    match stationary_covariance(sde) {
        Some(c) => {
            let resid = &sde.drift * &c + &c * sde.drift.transpose() + &sig;
            let rel = fro_norm_r(&resid) / fro_norm_r(&sig).max(f64::MIN_POSITIVE);
            push(
                passes(rel <= 1e-10),
                "sde-stationarity",
                format!("Lyapunov residual {rel:.3e} (tolerance 1e-10)"),
            );

            // The stationary density should be u0^2 = e^{-2 x^T A x},
            // i.e. C_inf = (4 Re A)^{-1}, tying the SDE back to the
            // spectral ground state.
            let a_re = RMat::from_fn(bundle.ground_state.a.nrows(), bundle.ground_state.a.ncols(), |i, j| {
                bundle.ground_state.a[(i, j)].re
            });
            match (a_re * 4.0).try_inverse() {
                Some(cov_gs) => {
                    let rel = fro_norm_r(&(&c - &cov_gs)) / fro_norm_r(&cov_gs);
                    push(
                        passes(rel <= 1e-9),
                        "equilibrium-density",
                        format!("C_inf vs (4A)^-1 from the ground state: rel err {rel:.3e}"),
                    );
                }
                None => push(
                    Status::Fail,
                    "equilibrium-density",
                    "ground-state exponent is singular".into(),
                ),
            }
        }
        None => push(
            Status::Fail,
            "sde-stationarity",
            "Lyapunov equation unsolvable despite a Hurwitz drift".into(),
        ),
    }

    if args.fast {
        push(Status::Skip, "sde-mean-decay", "--fast".into());
        return Ok(());
    }
    let tau0 = bundle.spectrum.tau0;
    let gap = drift_gap(sde);
    let t_final = (10.0 / tau0).max(20.0).ceil();
    let d = sde.drift.nrows();
    let mut x0 = vec![0.0; d];
    x0[0] = 2.0;
    let cfg = SimConfig {
        dt: 0.25,
        t_final,
        n_paths: args.paths,
        seed: args.seed,
        scheme: Scheme::ExactGaussian,
        x0,
    };
    let stats = simulate(sde, &cfg).map_err(sde_err)?;
    match quadgap_core::sde::empirical_gap(&stats, tau0) {
        Ok(est) => {
            let rel = (est.mean.rate - gap).abs() / gap;
            push(
                passes(rel <= 0.10),
                "sde-mean-decay",
                format!(
                    "mean decays at {} (95% CI {}..{}) vs drift gap {gap} ({:.2}% off, \
                     {} paths)",
                    est.mean.rate, est.mean_ci.0, est.mean_ci.1,
                    100.0 * rel,
                    args.paths
                ),
            );
        }
        Err(e) => push(Status::Fail, "sde-mean-decay", format!("rate fit failed: {e}")),
    }
    Ok(())
}

fn verify_kfp(
    a: f64,
    input: &ResolvedInput,
    bundle: &AnalysisBundle,
    args: &VerifyArgs,
    push: &mut impl FnMut(Status, &'static str, String),
) -> Result<(), CliError> {
    singular_line(bundle, 1, Some(&[2, 0]), push);
    no_real_line(bundle, push);

    let (mu0_c, tau0_c) =
        kfp_closed_forms(a).map_err(|e| CliError::Domain(e.to_string()))?;
    let mu0_err = (bundle.spectrum.mu0 - C64::new(mu0_c, 0.0)).norm();
    push(
        passes(mu0_err <= 1e-9),
        "mu0-closed-form",
        format!("{} vs {mu0_c}, |err| = {mu0_err:.3e}", fmt_c(bundle.spectrum.mu0)),
    );
    let tau0_err = (bundle.spectrum.tau0 - tau0_c).abs();
    push(
        passes(tau0_err <= 1e-9),
        "tau0-closed-form",
        format!("{} vs {tau0_c}, |err| = {tau0_err:.3e}", bundle.spectrum.tau0),
    );

    let want = kfp_ground_state_exponent(a).map_err(|e| CliError::Domain(e.to_string()))?;
    let diff = fro_norm(&(&bundle.ground_state.a - complexify(&want)));
    push(
        passes(diff <= 1e-8),
        "ground-state-exponent",
        format!("|A - closed form| = {diff:.3e}"),
    );

    orthogonality_line(
        bundle,
        Some(a > 0.0),
        if a > 0.0 { "" } else { ": the rank-one projection needs a > 0" },
        push,
    );

    let sde = input.sde.as_ref().expect("kfp carries an SDE");
    let map = quadgap_core::hamilton::hamilton_map(&input.symbol);
    let tol = 1e-8 * fro_norm(&map.f).max(1.0);
    if a > 0.0 {
        push(
            passes(drift_matches_spectrum(sde, &bundle.spectrum.clusters, tol)),
            "drift-spectrum",
            "drift eigenvalues equal {2i lambda} with multiplicity".into(),
        );
    } else {
        // The unstable drift takes one eigenvalue from each ±λ pair on
        // the wrong side, so only the sign-relaxed identity can hold.
        push(
            passes(drift_in_pm_spectrum(sde, &bundle.spectrum.clusters, tol)),
            "drift-spectrum",
            "each drift eigenvalue is ±2i lambda for a Hamilton eigenvalue lambda".into(),
        );
    }

    galerkin_line(input, bundle, args, 1e-6, push)?;

    if args.fast {
        push(Status::Skip, "semigroup-rate", "--fast".into());
    } else if a > 0.0 {
        semigroup_line(input, bundle, args.n_basis.unwrap_or(24), push)?;
    } else {
        push(
            Status::Skip,
            "semigroup-rate",
            "the projection constant is undefined without orthogonality (a < 0)".into(),
        );
    }

    sde_lines(
        input.sde.as_ref(),
        bundle,
        args,
        a > 0.0,
        "drift is not Hurwitz for a < 0 (no stationary state)",
        push,
    )
}

fn verify_chains(
    m_c: f64,
    bundle: &AnalysisBundle,
    push: &mut impl FnMut(Status, &'static str, String),
) {
    // Reaching this point means S = {0}, so m_c must be nonzero.
    singular_line(bundle, 2, Some(&[8, 4, 0]), push);
    no_real_line(bundle, push);
    push(
        Status::Info,
        "spectrum",
        format!(
            "m_c = {m_c}: mu0 = {}, tau0 = {} (no closed form for chains)",
            fmt_c(bundle.spectrum.mu0),
            bundle.spectrum.tau0
        ),
    );
    push(Status::Info, "ground-state", exponent_description(&bundle.ground_state));
    orthogonality_line(bundle, None, "", push);
    push(
        Status::Skip,
        "galerkin-lowest",
        "6 position axes exceed the default basis budget".into(),
    );
    push(Status::Skip, "sde-stationarity", "model has no companion SDE".into());
}

#[allow(clippy::too_many_arguments)]
fn verify_gle(
    omega: f64,
    beta: f64,
    alphas: &[f64],
    lambdas: &[f64],
    input: &ResolvedInput,
    bundle: &AnalysisBundle,
    args: &VerifyArgs,
    push: &mut impl FnMut(Status, &'static str, String),
) -> Result<(), CliError> {
    let m = alphas.len();
    singular_line(bundle, 2, Some(&[4, 2, 0]), push);
    no_real_line(bundle, push);

    let mu0_c = 0.5 * alphas.iter().sum::<f64>();
    let mu0_err = (bundle.spectrum.mu0 - C64::new(mu0_c, 0.0)).norm();
    push(
        passes(mu0_err <= 1e-9),
        "mu0-closed-form",
        format!(
            "{} vs half the friction sum {mu0_c}, |err| = {mu0_err:.3e}",
            fmt_c(bundle.spectrum.mu0)
        ),
    );

    if m == 1 {
        let tau0_c = gle_tau0_closed_m1(omega, alphas[0], lambdas[0])
            .map_err(|e| CliError::Domain(e.to_string()))?;
        let err = (bundle.spectrum.tau0 - tau0_c).abs();
        push(
            passes(err <= 1e-9),
            "tau0-closed-form",
            format!("{} vs cubic root {tau0_c}, |err| = {err:.3e}", bundle.spectrum.tau0),
        );

        let poly = hamilton_char_poly(&input.symbol);
        let [c0, c2, c4] = gle_char_poly_m1(omega, alphas[0], lambdas[0]);
        let scale = 1.0f64.max(c0.abs()).max(c2.abs()).max(c4.abs());
        let mut worst = 0.0f64;
        for (k, want) in [(0usize, c0), (2, c2), (4, c4), (6, 1.0)] {
            worst = worst.max((poly[k] - C64::new(want, 0.0)).norm());
        }
        for k in [1usize, 3, 5] {
            worst = worst.max(poly[k].norm());
        }
        push(
            passes(worst <= 1e-10 * scale),
            "char-poly",
            format!("det(X - F) matches the even quartic-in-X^2 form, worst dev {worst:.3e}"),
        );
    } else {
        push(
            Status::Info,
            "tau0-closed-form",
            format!("tau0 = {} (cubic oracle covers m = 1 only)", bundle.spectrum.tau0),
        );
    }

    let want = gle_ground_state_exponent(omega, beta, m);
    let diff = fro_norm(&(&bundle.ground_state.a - complexify(&want)));
    push(
        passes(diff <= 1e-8),
        "ground-state-exponent",
        format!("|A - (beta/4) diag(omega^2, 1, ..., 1)| = {diff:.3e}"),
    );

    orthogonality_line(bundle, Some(true), "", push);

    let sde = input.sde.as_ref().expect("gle carries an SDE");
    let map = quadgap_core::hamilton::hamilton_map(&input.symbol);
    let tol = 1e-8 * fro_norm(&map.f).max(1.0);
    push(
        passes(drift_matches_spectrum(sde, &bundle.spectrum.clusters, tol)),
        "drift-spectrum",
        "drift eigenvalues equal {2i lambda} with multiplicity".into(),
    );

    galerkin_line(input, bundle, args, 1e-6, push)?;
    push(
        Status::Skip,
        "semigroup-rate",
        "dense propagator beyond the verify budget for 3+ position axes".into(),
    );

    sde_lines(input.sde.as_ref(), bundle, args, true, "", push)
}

fn verify_external(
    input: &ResolvedInput,
    bundle: &AnalysisBundle,
    args: &VerifyArgs,
    push: &mut impl FnMut(Status, &'static str, String),
) -> Result<(), CliError> {
    push(
        Status::Pass,
        "singular-space",
        format!(
            "S = {{0}}, k0 = {:?}, partial kernel dims {:?}",
            bundle.singular.k0, bundle.singular.partial_kernels
        ),
    );
    no_real_line(bundle, push);
    push(
        Status::Info,
        "spectrum",
        format!("mu0 = {}, tau0 = {}", fmt_c(bundle.spectrum.mu0), bundle.spectrum.tau0),
    );
    push(Status::Info, "ground-state", exponent_description(&bundle.ground_state));
    orthogonality_line(bundle, None, "", push);
    // No closed form for an arbitrary file: the Galerkin route is the
    // one independent cross-check available, so give it a looser gate.
    let tol = 1e-4 * bundle.spectrum.mu0.norm().max(1.0);
    galerkin_line(input, bundle, args, tol, push)?;
    push(Status::Skip, "sde-stationarity", "file symbols carry no companion SDE".into());
    Ok(())
}
