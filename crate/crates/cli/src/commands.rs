//! The analyze, sweep, simulate and oracle subcommands. The verify
//! battery lives in [`crate::verify`].

use crate::args::{AnalyzeArgs, OracleArgs, SchemeArg, SimulateArgs, SweepArgs};
use crate::bundle::{build_bundle, AnalysisBundle};
use crate::input::resolve;
use crate::table::{emit, fmt_c, fmt_opt, parse_grid, parse_list};
use crate::CliError;
use quadgap_core::ground_state::exponent_description;
use quadgap_core::models::{gle_gap_sweep, GapSweepCell};
use quadgap_core::sde::{
    binned_rows, empirical_gap, simulate, Scheme, SdeError, SimConfig,
};
use quadgap_core::spectrum::SpectrumReport;
use quadgap_core::structure::{SingularSpaceReport, TOL_RANK_REL};
use quadgap_core::symbol::QuadraticSymbol;
use quadgap_core::{C64, CVec};
use quadgap_galerkin::{
    hermite_truncation, low_eigs, quantize, semigroup_decay, u0_expansion, GalerkinError,
    LowEigsReport, QuantizedOperator, SemigroupDecay,
};
use std::fmt::Write as _;

pub(crate) fn galerkin_err(e: GalerkinError) -> CliError {
    match e {
        GalerkinError::TruncationTooSmall { .. }
        | GalerkinError::TruncationTooLarge { .. }
        | GalerkinError::DimensionMismatch { .. } => CliError::Domain(e.to_string()),
        _ => CliError::Ambiguous(e.to_string()),
    }
}

pub(crate) fn sde_err(e: SdeError) -> CliError {
    match e {
        SdeError::LyapunovFailure => CliError::Ambiguous(e.to_string()),
        _ => CliError::Domain(e.to_string()),
    }
}

/// Default Hermite levels per axis: enough for tight low eigenvalues in
/// one or two variables, scaled back as the tensor basis grows.
pub(crate) fn default_levels(n: usize) -> Result<usize, CliError> {
    match n {
        1 | 2 => Ok(24),
        3 => Ok(10),
        4 => Ok(6),
        _ => Err(CliError::Domain(format!(
            "no default basis for {n} position variables; pass --N explicitly"
        ))),
    }
}

pub(crate) fn build_operator(
    sym: &QuadraticSymbol,
    n_basis: usize,
) -> Result<QuantizedOperator, CliError> {
    let trunc = hermite_truncation(sym.dim().n(), n_basis).map_err(galerkin_err)?;
    quantize(sym, &trunc).map_err(galerkin_err)
}

pub(crate) fn galerkin_low(
    sym: &QuadraticSymbol,
    n_basis: usize,
    count: usize,
) -> Result<(QuantizedOperator, LowEigsReport), CliError> {
    let op = build_operator(sym, n_basis)?;
    let count = count.clamp(1, op.dim());
    let report = low_eigs(&op, count).map_err(galerkin_err)?;
    Ok((op, report))
}

/// Propagate the first excited Hermite level and fit its decay rate.
pub(crate) fn excited_decay(
    op: &QuantizedOperator,
    gs: &quadgap_core::ground_state::GroundState,
    t_grid: &[f64],
) -> Result<SemigroupDecay, CliError> {
    let mut idx = vec![0usize; op.truncation().n()];
    idx[0] = 1;
    let mut u_init = CVec::zeros(op.dim());
    u_init[op.truncation().encode(&idx)] = C64::new(1.0, 0.0);
    semigroup_decay(op, gs, &u_init, t_grid).map_err(galerkin_err)
}

// ---------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------

/// Human-readable analysis report.
pub fn analyze_report(bundle: &AnalysisBundle) -> String {
    let mut s = String::new();
    let yes = |b: bool| if b { "yes" } else { "no" };
    let n = bundle.ground_state.a.nrows();
    let _ = writeln!(s, "input: {}", bundle.provenance);
    let _ = writeln!(s, "phase space: n = {n} ({} variables)", 2 * n);
    let _ = writeln!(
        s,
        "accretive: {} (min eig Re Q = {})",
        yes(bundle.checks.accretive.is_psd),
        bundle.checks.accretive.min_eig
    );
    let _ = writeln!(
        s,
        "real-to-real quantization: {}",
        yes(bundle.checks.real_coefficients)
    );
    let sing = &bundle.singular;
    let _ = writeln!(
        s,
        "singular space: S = {{0}}; k0 = {}; delta = {}; partial kernel dims {:?}",
        sing.k0.map_or("-".into(), |k| k.to_string()),
        sing.delta.map_or("-".into(), |d| d.to_string()),
        sing.partial_kernels
    );
    let _ = writeln!(
        s,
        "no real Hamilton eigenvalues: {}",
        yes(bundle.checks.no_real_eigenvalues)
    );
    let _ = writeln!(s, "eigenvalue clusters (Im > 0):");
    for c in &bundle.spectrum.clusters {
        let _ = writeln!(s, "  lambda = {}  (r = {})", fmt_c(c.lambda), c.r);
    }
    let _ = writeln!(s, "mu0 = {}", fmt_c(bundle.spectrum.mu0));
    let _ = writeln!(s, "tau0 = {}", bundle.spectrum.tau0);
    let shown = bundle.spectrum.low_lying.len().min(8);
    let _ = writeln!(
        s,
        "low-lying spectrum (showing {shown} of {}):",
        bundle.spectrum.low_lying.len()
    );
    for p in bundle.spectrum.low_lying.iter().take(shown) {
        let _ = writeln!(s, "  {}  k = {:?}", fmt_c(p.value), p.index);
    }
    let _ = writeln!(s, "ground state: {}", exponent_description(&bundle.ground_state));
    let _ = writeln!(s, "ground state norm^2 = {}", bundle.ground_state.norm_sq);
    let _ = writeln!(
        s,
        "adjoint orthogonality (rank-one projection): {}",
        yes(bundle.checks.orthogonality)
    );
    s
}

/// Report for the S ≠ {0} abort path: the spectral stages do not apply,
/// so print what the structure stage established and the basis itself.
pub fn singular_report(provenance: &crate::bundle::Provenance, rep: &SingularSpaceReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "input: {provenance}");
    let _ = writeln!(
        s,
        "singular space is nontrivial: dim S = {} (of {})",
        rep.dim,
        rep.basis.nrows()
    );
    let _ = writeln!(s, "partial kernel dims: {:?}", rep.partial_kernels);
    let _ = writeln!(s, "S basis vectors:");
    for j in 0..rep.basis.ncols() {
        let comps: Vec<String> = (0..rep.basis.nrows())
            .map(|i| rep.basis[(i, j)].to_string())
            .collect();
        let _ = writeln!(s, "  s{} = [{}]", j + 1, comps.join(", "));
    }
    let _ = writeln!(
        s,
        "spectrum and ground-state stages skipped: no spectral gap exists transverse to S"
    );
    s
}

pub fn cmd_analyze(args: &AnalyzeArgs) -> Result<i32, CliError> {
    let input = resolve(&args.input)?;
    match build_bundle(&input, args.tol_rank) {
        Ok(bundle) => {
            print!("{}", analyze_report(&bundle));
            if let Some(path) = &args.out {
                let json = serde_json::to_string_pretty(&bundle)
                    .map_err(|e| CliError::Domain(format!("serializing bundle: {e}")))?;
                std::fs::write(path, json)?;
            }
            Ok(0)
        }
        Err(CliError::Singular(rep)) => {
            print!("{}", singular_report(&input.provenance, &rep));
            Ok(3)
        }
        Err(e) => Err(e),
    }
}

// ---------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------

/// Sweep cells for either mode: full (α, λ) product grid, or the
/// fixed-γ curve α = λ²/γ.
pub fn sweep_cells(
    omega: f64,
    beta: f64,
    alpha_grid: &[f64],
    lambda_grid: &[f64],
    gamma: Option<f64>,
) -> Result<Vec<GapSweepCell>, CliError> {
    match gamma {
        None => Ok(gle_gap_sweep(omega, beta, alpha_grid, lambda_grid)),
        Some(g) => {
            if !(g > 0.0) {
                return Err(CliError::Domain(format!("--gamma must be positive, got {g}")));
            }
            let mut cells = Vec::with_capacity(lambda_grid.len());
            for &l in lambda_grid {
                let alpha = l * l / g;
                cells.extend(gle_gap_sweep(omega, beta, &[alpha], &[l]));
            }
            Ok(cells)
        }
    }
}

pub fn sweep_csv(cells: &[GapSweepCell]) -> String {
    let mut s = String::from("alpha,lambda,tau0,tau0_closed_form,status\n");
    for c in cells {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            c.alpha,
            c.lambda,
            fmt_opt(c.tau0),
            fmt_opt(c.tau0_closed_form),
            c.status
        );
    }
    s
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<i32, CliError> {
    let alpha_grid = parse_grid(&args.alphas)?;
    let lambda_grid = parse_grid(&args.lambdas)?;
    let cells = sweep_cells(args.omega, args.beta, &alpha_grid, &lambda_grid, args.gamma)?;
    let failed = cells.iter().filter(|c| c.status != "ok").count();
    if failed == cells.len() {
        return Err(CliError::Ambiguous(format!(
            "all {} sweep cells failed; first: {}",
            cells.len(),
            cells.first().map_or("(empty grid)".into(), |c| c.status.clone())
        )));
    }
    emit(&sweep_csv(&cells), args.out.as_deref())?;
    if failed > 0 {
        eprintln!("note: {failed} of {} cells failed; see the status column", cells.len());
    }
    Ok(0)
}

// ---------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------

pub fn sim_csv(rows: &[quadgap_core::sde::BinnedRow]) -> String {
    let mut s = String::from("t,mean_norm,cov_err,ci_lo,ci_hi\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{},{},{}", r.t, r.mean_norm, r.cov_err, r.ci_lo, r.ci_hi);
    }
    s
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<i32, CliError> {
    let input = resolve(&args.input)?;
    let Some(sde) = input.sde.clone() else {
        return Err(CliError::Domain(
            "this input has no companion SDE; simulate supports --model kfp and --model gle"
                .into(),
        ));
    };
    let d = sde.drift.nrows();
    let x0 = match &args.x0 {
        Some(list) => {
            let v = parse_list(list)?;
            if v.len() != d {
                return Err(CliError::Domain(format!(
                    "--x0 has {} entries but the state dimension is {d}",
                    v.len()
                )));
            }
            v
        }
        None => {
            let mut v = vec![0.0; d];
            v[0] = 1.0;
            v
        }
    };
    let scheme = match args.scheme {
        SchemeArg::Em => Scheme::EulerMaruyama,
        SchemeArg::Exact => Scheme::ExactGaussian,
    };
    let cfg = SimConfig {
        dt: args.dt,
        t_final: args.t_final,
        n_paths: args.paths,
        seed: args.seed,
        scheme,
        x0,
    };
    let stats = simulate(&sde, &cfg).map_err(sde_err)?;
    emit(&sim_csv(&binned_rows(&stats)), args.out.as_deref())?;

    // Rate summary on stderr so stdout stays machine-readable.
    let bundle = build_bundle(&input, TOL_RANK_REL)?;
    let tau0 = bundle.spectrum.tau0;
    match empirical_gap(&stats, tau0) {
        Ok(est) => {
            eprintln!(
                "mean-decay rate {} (95% CI {}..{}), cov-decay rate {} (95% CI {}..{}), \
                 spectral tau0 = {tau0}",
                est.mean.rate, est.mean_ci.0, est.mean_ci.1, est.cov.rate, est.cov_ci.0,
                est.cov_ci.1
            );
        }
        Err(e) => eprintln!("rate fit skipped: {e}"),
    }
    Ok(0)
}

// ---------------------------------------------------------------------
// oracle
// ---------------------------------------------------------------------

/// Greedy nearest-point matching of Galerkin eigenvalues to lattice
/// points, each lattice point used at most once. Index-wise comparison
/// would misreport agreement whenever floating-point noise permutes a
/// degenerate shell of equal real parts.
pub fn match_lattice(galerkin: &[C64], spectrum: &SpectrumReport) -> Vec<(C64, f64)> {
    let mut used = vec![false; spectrum.low_lying.len()];
    galerkin
        .iter()
        .map(|g| {
            let mut best: Option<(usize, f64)> = None;
            for (i, p) in spectrum.low_lying.iter().enumerate() {
                if used[i] {
                    continue;
                }
                let d = (g - p.value).norm();
                if best.map_or(true, |(_, bd)| d < bd) {
                    best = Some((i, d));
                }
            }
            match best {
                Some((i, d)) => {
                    used[i] = true;
                    (spectrum.low_lying[i].value, d)
                }
                // More eigenvalues requested than enumerated lattice
                // points: report against NaN rather than inventing one.
                None => (C64::new(f64::NAN, f64::NAN), f64::NAN),
            }
        })
        .collect()
}

/// Relative deviation allowed before a decay-rate row is marked
/// mismatched: the fit carries discretization and windowing error, so
/// it gets a percentage rather than the eigenvalue tolerance.
pub const ORACLE_RATE_RTOL: f64 = 0.05;

pub fn cmd_oracle(args: &OracleArgs) -> Result<i32, CliError> {
    let input = resolve(&args.input)?;
    let bundle = build_bundle(&input, TOL_RANK_REL)?;
    if args.count == 0 {
        return Err(CliError::Domain("--count must be at least 1".into()));
    }
    let n = input.symbol.dim().n();
    let n_basis = match args.n_basis {
        Some(nb) => nb,
        None => default_levels(n)?,
    };
    let (op, report) = galerkin_low(&input.symbol, n_basis, args.count)?;
    let matched = match_lattice(&report.eigenvalues, &bundle.spectrum);

    let mut s = String::from(
        "quantity,analytic_re,analytic_im,galerkin_re,galerkin_im,abs_error,status\n",
    );
    for (k, (ev, (lat, dist))) in report.eigenvalues.iter().zip(&matched).enumerate() {
        let status = if !report.converged[k] {
            "unconverged"
        } else if *dist <= args.tol {
            "ok"
        } else {
            "mismatch"
        };
        let _ = writeln!(
            s,
            "eigenvalue_{k},{},{},{},{},{},{status}",
            lat.re, lat.im, ev.re, ev.im, dist
        );
    }

    // Ground-state residual ||(M - mu0) u0|| / ||u0|| on the same basis.
    let u0 = u0_expansion(&bundle.ground_state.a, op.truncation())
        .map_err(galerkin_err)?
        .coeffs;
    let mu0 = bundle.spectrum.mu0;
    let resid = {
        let mv = op.matvec(&u0);
        let num = (0..u0.len())
            .map(|i| (mv[i] - mu0 * u0[i]).norm_sqr())
            .sum::<f64>()
            .sqrt();
        num / u0.norm().max(f64::MIN_POSITIVE)
    };
    let status = if resid <= args.tol { "ok" } else { "mismatch" };
    let _ = writeln!(s, "ground_state_residual,0,0,{resid},0,{resid},{status}");

    if let Some(spec) = &args.times {
        let t_grid = parse_grid(spec)?;
        if t_grid.len() < 5 {
            return Err(CliError::Domain("--times needs at least 5 points".into()));
        }
        let decay = excited_decay(&op, &bundle.ground_state, &t_grid)?;
        let tau0 = bundle.spectrum.tau0;
        let err = (decay.fitted_rate - tau0).abs();
        let status = if err <= ORACLE_RATE_RTOL * tau0 { "ok" } else { "mismatch" };
        let _ = writeln!(s, "decay_rate,{tau0},0,{},0,{err},{status}", decay.fitted_rate);
    }

    emit(&s, args.out.as_deref())?;
    Ok(0)
}
