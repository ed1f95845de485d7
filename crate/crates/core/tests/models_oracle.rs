//! Closed-form oracles for the bundled models, checked end to end
//! through the analysis pipeline.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use quadgap_core::ground_state::{
    ground_state, orthogonality_check, positive_lagrangian, realness_check, TOL_POSITIVITY_REL,
};
use quadgap_core::hamilton::hamilton_map;
use quadgap_core::linalg::{complex_eigenvalues, complexify, fro_norm, fro_norm_r};
use quadgap_core::models::{
    chains_model, drift_matches_spectrum, gle_char_poly_m1, gle_gap_sweep,
    gle_ground_state_exponent, gle_model, gle_tau0_closed_m1, hamilton_char_poly,
    kfp_ground_state_exponent, kfp_model,
};
use quadgap_core::spectrum::{analyze_spectrum, kfp_closed_forms};
use quadgap_core::structure::{partial_ellipticity_on_s, singular_space, TOL_RANK_REL};
use quadgap_core::{C64, CMat, RMat};

const KFP_SWEEP: [f64; 9] = [-2.0, -1.0, -0.1, 0.1, 0.1875, 0.25, 0.3, 1.0, 5.0];

#[test]
fn kfp_spectrum_matches_closed_forms_across_both_branches() {
    for a in KFP_SWEEP {
        let m = kfp_model(a).unwrap();
        let map = hamilton_map(&m.symbol);
        let report = analyze_spectrum(&map).unwrap_or_else(|e| panic!("a = {a}: {e}"));
        let (mu0, tau0) = kfp_closed_forms(a).unwrap();
        assert!(
            (report.mu0.re - mu0).abs() <= 1e-9 && report.mu0.im.abs() <= 1e-9,
            "a = {a}: mu0 {} vs closed form {mu0}",
            report.mu0
        );
        assert!(
            (report.tau0 - tau0).abs() <= 1e-9,
            "a = {a}: tau0 {} vs closed form {tau0}",
            report.tau0
        );
    }
}

#[test]
fn kfp_singular_space_collapses_in_one_step() {
    for a in KFP_SWEEP {
        let m = kfp_model(a).unwrap();
        let map = hamilton_map(&m.symbol);
        let r = singular_space(&map, TOL_RANK_REL).unwrap();
        assert_eq!(r.partial_kernels, vec![2, 0], "a = {a}");
        assert_eq!(r.k0, Some(1));
        assert_eq!(r.dim, 0);
        assert!((r.delta.unwrap() - 2.0 / 3.0).abs() <= 1e-15);
        assert!(realness_check(&m.symbol));
    }
}

#[test]
fn kfp_ground_state_exponent_matches_closed_form() {
    for a in KFP_SWEEP {
        let m = kfp_model(a).unwrap();
        let map = hamilton_map(&m.symbol);
        let report = analyze_spectrum(&map).unwrap();
        let plane = positive_lagrangian(&map, TOL_POSITIVITY_REL).unwrap();
        let gs = ground_state(&plane, report.mu0).unwrap();
        let want = kfp_ground_state_exponent(a).unwrap();
        let scale = fro_norm_r(&want);
        for i in 0..2 {
            for j in 0..2 {
                let got = gs.a[(i, j)];
                assert!(
                    (got.re - want[(i, j)]).abs() <= 1e-8 * scale && got.im.abs() <= 1e-8 * scale,
                    "a = {a}: A[{i},{j}] = {got} vs {}",
                    want[(i, j)]
                );
            }
        }
        assert!(gs.norm_sq.is_finite() && gs.norm_sq > 0.0);
    }
}

/// The rank-one projection onto the ground state requires the adjoint
/// ground state to be the conjugate of the direct one. That holds for
/// confining potentials and fails for the inverted ones.
#[test]
fn kfp_orthogonality_only_for_confining_potential() {
    for (a, want) in [(0.1, true), (1.0, true), (5.0, true), (-1.0, false), (-2.0, false)] {
        let m = kfp_model(a).unwrap();
        let map = hamilton_map(&m.symbol);
        let adj = hamilton_map(&m.symbol.conj());
        assert_eq!(orthogonality_check(&map, &adj).unwrap(), want, "a = {a}");
    }
}

#[test]
fn kfp_drift_spectrum_correspondence_on_stable_branch() {
    for a in [0.1, 0.25, 1.0, 5.0] {
        let m = kfp_model(a).unwrap();
        let map = hamilton_map(&m.symbol);
        let report = analyze_spectrum(&map).unwrap();
        let tol = 1e-8 * fro_norm(&map.f).max(1.0);
        assert!(drift_matches_spectrum(&m.sde, &report.clusters, tol), "a = {a}");
    }
}

#[test]
fn chains_kernel_cascade_and_morse_criterion() {
    // Generic couplings, equal and unequal temperatures: S = {0} in two
    // steps, dims 8 -> 4 -> 0.
    for (a1, a2) in [(1.0, 1.0), (1.0, 1.5)] {
        let m = chains_model(2.0, 3.0, 1.0, 2.0, a1, a2).unwrap();
        assert!(m.m_c != 0.0);
        let map = hamilton_map(&m.symbol);
        let r = singular_space(&map, TOL_RANK_REL).unwrap();
        assert_eq!(r.partial_kernels, vec![8, 4, 0], "temps ({a1}, {a2})");
        assert_eq!(r.k0, Some(2));
        assert!((r.delta.unwrap() - 0.8).abs() <= 1e-15);
        assert!(realness_check(&m.symbol));
    }

    // Degenerate pinning (a + c − 1)(b + c − 1) = c²: the cascade stalls
    // on a nontrivial singular space.
    let degenerate = chains_model(1.0, 3.0, 0.0, 2.0, 1.0, 1.0).unwrap();
    assert_eq!(degenerate.m_c, 0.0);
    let map = hamilton_map(&degenerate.symbol);
    let r = singular_space(&map, TOL_RANK_REL).unwrap();
    assert!(r.dim > 0);
    assert_eq!(r.k0, None);
    assert_eq!(r.delta, None);
}

#[test]
fn gle_bottom_eigenvalue_is_half_the_friction_sum() {
    let m = gle_model(1.3, 0.7, &[0.9, 1.7], &[0.8, 1.1]).unwrap();
    assert!((m.mu0 - 1.3).abs() <= 1e-15);
    let map = hamilton_map(&m.symbol);
    let report = analyze_spectrum(&map).unwrap();
    assert!(
        (report.mu0.re - m.mu0).abs() <= 1e-9 && report.mu0.im.abs() <= 1e-9,
        "mu0 {} vs {}",
        report.mu0,
        m.mu0
    );

    let r = singular_space(&map, TOL_RANK_REL).unwrap();
    assert_eq!(r.dim, 0);
    assert!(r.k0.is_some());
    assert!(realness_check(&m.symbol));
}

#[test]
fn gle_single_mode_kernel_cascade() {
    let m = gle_model(1.0, 1.0, &[1.0], &[1.0]).unwrap();
    let map = hamilton_map(&m.symbol);
    let r = singular_space(&map, TOL_RANK_REL).unwrap();
    assert_eq!(r.partial_kernels, vec![4, 2, 0]);
    assert_eq!(r.k0, Some(2));
    assert!((r.delta.unwrap() - 0.8).abs() <= 1e-15);

    // S = {0} plainly implies partial ellipticity on S.
    assert!(partial_ellipticity_on_s(&m.symbol, &r).unwrap());
}

/// The 6×6 Hamilton map of the single-mode GLE has the even
/// characteristic polynomial X⁶ + c₄X⁴ + c₂X² + c₀ with coefficients
/// independent of β. Twenty random parameter draws against the closed
/// form, with β drawn separately from everything else.
#[test]
fn gle_char_poly_matches_closed_form_on_random_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for trial in 0..20 {
        let omega = rng.gen_range(0.5..2.0);
        let alpha = rng.gen_range(0.3..2.5);
        let lambda = rng.gen_range(0.3..2.0);
        let beta = rng.gen_range(0.4..3.0);
        let m = gle_model(omega, beta, &[alpha], &[lambda]).unwrap();
        let poly = hamilton_char_poly(&m.symbol);
        assert_eq!(poly.len(), 7);
        let [c0, c2, c4] = gle_char_poly_m1(omega, alpha, lambda);
        let scale = 1.0f64.max(c0.abs()).max(c2.abs()).max(c4.abs());
        for (k, want) in [(0, c0), (2, c2), (4, c4), (6, 1.0)] {
            assert!(
                (poly[k].re - want).abs() <= 1e-10 * scale && poly[k].im.abs() <= 1e-10 * scale,
                "trial {trial}: coeff {k} = {} vs {want}",
                poly[k]
            );
        }
        for k in [1, 3, 5] {
            assert!(poly[k].norm() <= 1e-10 * scale, "trial {trial}: odd coeff {k}");
        }
    }
}

#[test]
fn gle_gap_agrees_with_cubic_oracle() {
    for (alpha, lambda) in [(1.0, 1.0), (0.5, 1.2), (2.0, 0.7)] {
        let m = gle_model(1.0, 1.0, &[alpha], &[lambda]).unwrap();
        let map = hamilton_map(&m.symbol);
        let report = analyze_spectrum(&map).unwrap();
        let oracle = gle_tau0_closed_m1(1.0, alpha, lambda).unwrap();
        assert!(
            (report.tau0 - oracle).abs() <= 1e-9,
            "(α, λ) = ({alpha}, {lambda}): {} vs {oracle}",
            report.tau0
        );
        // τ₀ is also the slowest drift decay rate.
        let drift_min: f64 = complex_eigenvalues(&complexify(&m.sde.drift))
            .iter()
            .map(|mu| mu.re.abs())
            .fold(f64::INFINITY, f64::min);
        assert!((report.tau0 - drift_min).abs() <= 1e-9);

        let tol = 1e-8 * fro_norm(&map.f).max(1.0);
        assert!(drift_matches_spectrum(&m.sde, &report.clusters, tol));
    }
    // Unit parameters: cubic μ³ + μ² + 2μ + 1 has its complex pair at
    // Re μ ≈ −0.21508.
    let t = gle_tau0_closed_m1(1.0, 1.0, 1.0).unwrap();
    assert!((t - 0.21508).abs() <= 1e-4, "τ₀ = {t}");
}

#[test]
fn gle_sweep_grid_is_alpha_major_and_self_consistent() {
    let cells = gle_gap_sweep(1.0, 1.0, &[0.5, 1.0, 2.0], &[0.5, 1.0]);
    assert_eq!(cells.len(), 6);
    assert_eq!((cells[0].alpha, cells[0].lambda), (0.5, 0.5));
    assert_eq!((cells[1].alpha, cells[1].lambda), (0.5, 1.0));
    assert_eq!((cells[5].alpha, cells[5].lambda), (2.0, 1.0));
    for cell in &cells {
        assert_eq!(cell.status, "ok");
        let (t, o) = (cell.tau0.unwrap(), cell.tau0_closed_form.unwrap());
        assert!((t - o).abs() <= 1e-9, "cell ({}, {}): {t} vs {o}", cell.alpha, cell.lambda);
    }
}

#[test]
fn gle_ground_state_exponent_is_diagonal_closed_form() {
    let (omega, beta) = (1.4, 0.6);
    let m = gle_model(omega, beta, &[1.1], &[0.9]).unwrap();
    let map = hamilton_map(&m.symbol);
    let report = analyze_spectrum(&map).unwrap();
    let plane = positive_lagrangian(&map, TOL_POSITIVITY_REL).unwrap();
    let gs = ground_state(&plane, report.mu0).unwrap();
    let want = gle_ground_state_exponent(omega, beta, 1);
    let scale = fro_norm_r(&want);
    for i in 0..3 {
        for j in 0..3 {
            let got = gs.a[(i, j)];
            assert!(
                (got.re - want[(i, j)]).abs() <= 1e-8 * scale && got.im.abs() <= 1e-8 * scale,
                "A[{i},{j}] = {got} vs {}",
                want[(i, j)]
            );
        }
    }

    let adj = hamilton_map(&m.symbol.conj());
    assert!(orthogonality_check(&map, &adj).unwrap());
}

/// The stationary covariance solved from the Lyapunov equation must
/// invert the closed-form density exponent: C∞ = (2E)⁻¹.
#[test]
fn stationary_covariance_inverts_density_exponent() {
    let kfp = kfp_model(2.5).unwrap();
    let gle = gle_model(1.3, 0.8, &[1.0, 0.6], &[0.9, 1.2]).unwrap();
    for (label, sde) in [("kfp", &kfp.sde), ("gle", &gle.sde)] {
        let cov = quadgap_core::sde::stationary_covariance(sde).unwrap();
        let e = sde.equilibrium_density_exponent.as_ref().unwrap();
        let want = (e * 2.0).try_inverse().unwrap();
        assert!(
            fro_norm_r(&(&cov - &want)) <= 1e-12 * fro_norm_r(&want),
            "{label}: {cov} vs {want}"
        );
    }
}

#[test]
fn reports_round_trip_through_json() {
    let m = kfp_model(1.0).unwrap();
    let map = hamilton_map(&m.symbol);
    let report = analyze_spectrum(&map).unwrap();
    let json = serde_json::to_string(&report).unwrap();
    let back: quadgap_core::spectrum::SpectrumReport = serde_json::from_str(&json).unwrap();
    assert_eq!(report, back);

    let r = singular_space(&map, TOL_RANK_REL).unwrap();
    let json = serde_json::to_string(&r).unwrap();
    let back: quadgap_core::structure::SingularSpaceReport = serde_json::from_str(&json).unwrap();
    assert_eq!(r, back);

    let plane = positive_lagrangian(&map, TOL_POSITIVITY_REL).unwrap();
    let gs = ground_state(&plane, report.mu0).unwrap();
    let json = serde_json::to_string(&gs).unwrap();
    let back: quadgap_core::ground_state::GroundState = serde_json::from_str(&json).unwrap();
    assert_eq!(gs, back);
}

// --- SDE integration: scheme accuracy and empirical rates ---

use quadgap_core::models::LinearSDE;
use quadgap_core::sde::{simulate, Scheme, SimConfig};

fn silent(drift: RMat) -> LinearSDE {
    let d = drift.nrows();
    LinearSDE { drift, noise: RMat::zeros(d, 1), equilibrium_density_exponent: None }
}

/// Euler–Maruyama converges to the exact propagator at weak order one:
/// halving dt halves the endpoint error, measured on the noise-free
/// deterministic flow.
#[test]
fn euler_weak_order_one_against_exact_scheme() {
    let sde = silent(kfp_model(1.0).unwrap().sde.drift);
    let mut errs = Vec::new();
    for dt in [1e-2, 5e-3, 2.5e-3] {
        let run = |scheme| {
            let cfg = SimConfig {
                dt,
                t_final: 1.0,
                n_paths: 1,
                seed: 7,
                scheme,
                x0: vec![1.0, 0.5],
            };
            simulate(&sde, &cfg).unwrap()
        };
        let em = run(Scheme::EulerMaruyama);
        let exact = run(Scheme::ExactGaussian);
        let diff = em.means.last().unwrap() - exact.means.last().unwrap();
        errs.push(diff.norm());
    }
    for window in errs.windows(2) {
        let slope = (window[0] / window[1]).log2();
        assert!((0.85..=1.15).contains(&slope), "errors {errs:?}");
    }
}

/// Noise-free GLE relaxation recovers the spectral gap: start on the
/// slow complex eigenplane of the drift and fit the envelope of the
/// oscillating x coordinate.
#[test]
fn gle_zero_noise_relaxation_rate_matches_gap() {
    let model = gle_model(1.0, 1.0, &[1.0], &[1.0]).unwrap();
    let b = complexify(&model.sde.drift);
    let eigs = complex_eigenvalues(&b);
    let slow = eigs
        .iter()
        .filter(|mu| mu.im > 1e-9)
        .min_by(|x, y| x.re.abs().total_cmp(&y.re.abs()))
        .copied()
        .unwrap();

    // Eigenvector from the adjugate: any nonzero column of adj(B − μI)
    // spans the kernel.
    let m = &b - CMat::identity(3, 3) * slow;
    let cof = |i: usize, j: usize| {
        let (r, s) = match i {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let (p, q) = match j {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let det = m[(r, p)] * m[(s, q)] - m[(r, q)] * m[(s, p)];
        if (i + j) % 2 == 0 { det } else { -det }
    };
    let adj = CMat::from_fn(3, 3, |i, j| cof(j, i));
    let col = (0..3)
        .map(|j| adj.column(j).into_owned())
        .max_by(|x, y| x.norm().total_cmp(&y.norm()))
        .unwrap();
    assert!(col.norm() > 1e-8, "defective slow mode");
    let resid = (&b * &col - &col * slow).norm() / col.norm();
    assert!(resid <= 1e-10, "eigenvector residual {resid}");

    let x0: Vec<f64> = (0..3).map(|i| 2.0 * (col[i] / col.norm()).re).collect();
    let cfg = SimConfig {
        dt: 0.005,
        t_final: 80.0,
        n_paths: 1,
        seed: 11,
        scheme: Scheme::ExactGaussian,
        x0,
    };
    let stats = simulate(&silent(model.sde.drift.clone()), &cfg).unwrap();
    let xs: Vec<f64> = stats.means.iter().map(|mv| mv[0].abs()).collect();
    let fit = quadgap_core::sde::fit_decay_rate(&stats.times, &xs).unwrap();
    let want = slow.re.abs();
    assert!(
        (fit.rate - want).abs() <= 1e-6,
        "fit {} vs gap {want} (method {:?})",
        fit.rate,
        fit.method
    );

    // The same number through the operator pipeline.
    let report = analyze_spectrum(&hamilton_map(&model.symbol)).unwrap();
    assert!((report.tau0 - want).abs() <= 1e-9);
}
