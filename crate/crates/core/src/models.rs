//! The three application models: kinetic Fokker–Planck with quadratic
//! potential, a chain of oscillators coupled to two heat baths, and the
//! Markovian approximation of the generalized Langevin equation.
//!
//! Variable orderings are frozen here and used everywhere else:
//! KFP (x, v, ξ, η); chains (x₁,x₂,y₁,y₂,z₁,z₂) with duals
//! (ξ₁,ξ₂,η₁,η₂,ζ₁,ζ₂); GLE (x, y, z₁..z_m) with duals (ξ, η, ζ₁..ζ_m).

use serde::{Deserialize, Serialize};

use crate::linalg::{char_poly, complex_eigenvalues, complexify};
use crate::spectrum::{analyze_spectrum, EigenCluster};
use crate::symbol::{make_symbol, PhaseDim, QuadraticSymbol};
use crate::{C64, CMat, RMat};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("parameter a = 0 is outside the model domain")]
    ZeroParameter,
    #[error("temperature domain violated: need alpha > max(alpha1, alpha2)/2, got alpha = {alpha} vs {max_half}")]
    TemperatureDomain { alpha: f64, max_half: f64 },
    #[error("parameter domain violated: {0}")]
    ParameterDomain(String),
}

/// dX = B·X dt + Σ dW with constant matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSDE {
    pub drift: RMat,
    pub noise: RMat,
    /// E with stationary density ∝ e^{−XᵀEX}, when known in closed form.
    pub equilibrium_density_exponent: Option<RMat>,
}

fn add_term(m: &mut CMat, i: usize, j: usize, coeff: C64) {
    if i == j {
        m[(i, i)] += coeff;
    } else {
        let half = coeff * C64::new(0.5, 0.0);
        m[(i, j)] += half;
        m[(j, i)] += half;
    }
}

// ---------------------------------------------------------------------
// Kinetic Fokker–Planck, V(x) = ½ax²
// ---------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KfpModel {
    pub a: f64,
    pub symbol: QuadraticSymbol,
    /// Langevin companion on (x, v): dx = v dt, dv = (−ax − v)dt + √2 dW.
    /// Unstable (no stationary density) for a < 0.
    pub sde: LinearSDE,
}

/// q(x,v,ξ,η) = η² + ¼v² + i(vξ − axη).
pub fn kfp_model(a: f64) -> Result<KfpModel, ModelError> {
    if a == 0.0 {
        return Err(ModelError::ZeroParameter);
    }
    let mut m = CMat::zeros(4, 4);
    add_term(&mut m, 3, 3, C64::new(1.0, 0.0));
    add_term(&mut m, 1, 1, C64::new(0.25, 0.0));
    add_term(&mut m, 1, 2, C64::new(0.0, 1.0));
    add_term(&mut m, 0, 3, C64::new(0.0, -a));
    let symbol = make_symbol(PhaseDim::new(2), m).expect("square 4x4 entries");

    let drift = RMat::from_row_slice(2, 2, &[0.0, 1.0, -a, -1.0]);
    let noise = RMat::from_row_slice(2, 1, &[0.0, 2f64.sqrt()]);
    // Stationary density ∝ e^{−(ax² + v²)/2} = u₀², pinning the γ = β = 1
    // normalization; only meaningful for a > 0.
    let exponent = (a > 0.0).then(|| RMat::from_row_slice(2, 2, &[a / 2.0, 0.0, 0.0, 0.5]));
    let sde = LinearSDE { drift, noise, equilibrium_density_exponent: exponent };
    Ok(KfpModel { a, symbol, sde })
}

/// Closed-form exponent A of the ground state u₀ = e^{−XᵀAX} on (x, v).
pub fn kfp_ground_state_exponent(a: f64) -> Result<RMat, ModelError> {
    if a == 0.0 {
        return Err(ModelError::ZeroParameter);
    }
    if a > 0.0 {
        Ok(RMat::from_row_slice(2, 2, &[a / 4.0, 0.0, 0.0, 0.25]))
    } else {
        let s = (1.0 - 4.0 * a).sqrt();
        Ok(RMat::from_row_slice(
            2,
            2,
            &[-(a / 4.0) * s, a / 2.0, a / 2.0, s / 4.0],
        ))
    }
}

// ---------------------------------------------------------------------
// Chain of two oscillators between two heat baths
// ---------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainsModel {
    pub symbol: QuadraticSymbol,
    /// Morse quantity (a+c−1)(b+c−1) − c²; S = {0} iff nonzero.
    pub m_c: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub delta1: f64,
    pub delta2: f64,
}

/// Chain symbol with pinning potential couplings a, b, c and bath
/// temperatures α₁, α₂ around the reference α; normalization h = 1,
/// γ = 2, d = 1.
pub fn chains_model(
    a: f64,
    b: f64,
    c: f64,
    alpha: f64,
    alpha1: f64,
    alpha2: f64,
) -> Result<ChainsModel, ModelError> {
    if alpha1 <= 0.0 || alpha2 <= 0.0 {
        return Err(ModelError::ParameterDomain(format!(
            "bath temperatures must be positive, got alpha1 = {alpha1}, alpha2 = {alpha2}"
        )));
    }
    let max_half = 0.5 * alpha1.max(alpha2);
    if alpha <= max_half {
        return Err(ModelError::TemperatureDomain { alpha, max_half });
    }
    let beta_of = |aj: f64| (aj / alpha) * (2.0 / aj - 1.0 / alpha);
    let delta_of = |aj: f64| aj / alpha - 1.0;
    let (beta1, beta2) = (beta_of(alpha1), beta_of(alpha2));
    let (delta1, delta2) = (delta_of(alpha1), delta_of(alpha2));
    let m_c = (a + c - 1.0) * (b + c - 1.0) - c * c;

    // Indices: x₁=0, x₂=1, y₁=2, y₂=3, z₁=4, z₂=5, then duals +6.
    let (x1, x2, y1, y2, z1, z2) = (0, 1, 2, 3, 4, 5);
    let (xi1, xi2, eta1, eta2, zeta1, zeta2) = (6, 7, 8, 9, 10, 11);
    let re = |v: f64| C64::new(v, 0.0);
    let im = |v: f64| C64::new(0.0, v);
    let mut m = CMat::zeros(12, 12);
    add_term(&mut m, zeta1, zeta1, re(alpha1));
    add_term(&mut m, zeta2, zeta2, re(alpha2));
    // βⱼ(zⱼ − xⱼ)²
    add_term(&mut m, z1, z1, re(beta1));
    add_term(&mut m, x1, x1, re(beta1));
    add_term(&mut m, x1, z1, re(-2.0 * beta1));
    add_term(&mut m, z2, z2, re(beta2));
    add_term(&mut m, x2, x2, re(beta2));
    add_term(&mut m, x2, z2, re(-2.0 * beta2));
    // i·2δⱼζⱼ(zⱼ − xⱼ)
    add_term(&mut m, zeta1, z1, im(2.0 * delta1));
    add_term(&mut m, zeta1, x1, im(-2.0 * delta1));
    add_term(&mut m, zeta2, z2, im(2.0 * delta2));
    add_term(&mut m, zeta2, x2, im(-2.0 * delta2));
    // i(y₁ξ₁ + y₂ξ₂)
    add_term(&mut m, y1, xi1, im(1.0));
    add_term(&mut m, y2, xi2, im(1.0));
    // −iη₁((a+c)x₁ − cx₂ − z₁)
    add_term(&mut m, eta1, x1, im(-(a + c)));
    add_term(&mut m, eta1, x2, im(c));
    add_term(&mut m, eta1, z1, im(1.0));
    // −iη₂(−cx₁ + (b+c)x₂ − z₂)
    add_term(&mut m, eta2, x1, im(c));
    add_term(&mut m, eta2, x2, im(-(b + c)));
    add_term(&mut m, eta2, z2, im(1.0));
    let symbol = make_symbol(PhaseDim::new(6), m).expect("square 12x12 entries");
    Ok(ChainsModel { symbol, m_c, beta1, beta2, delta1, delta2 })
}

// ---------------------------------------------------------------------
// Generalized Langevin equation, Markovian approximation with m bath
// modes
// ---------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GleModel {
    pub omega: f64,
    pub beta: f64,
    pub alphas: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub symbol: QuadraticSymbol,
    /// dx = y dt, dy = (−ω²x + Σλⱼzⱼ)dt, dzⱼ = −(λⱼy + αⱼzⱼ)dt + √(2αⱼ/β)dWⱼ.
    pub sde: LinearSDE,
    /// Bottom eigenvalue ½Σαⱼ in closed form.
    pub mu0: f64,
}

/// q(x,y,z,ξ,η,ζ) = i(yξ − ω²xη) + iΣλⱼ(zⱼη − yζⱼ) + Σαⱼ(β⁻¹ζⱼ² + βzⱼ²/4).
pub fn gle_model(
    omega: f64,
    beta: f64,
    alphas: &[f64],
    lambdas: &[f64],
) -> Result<GleModel, ModelError> {
    if omega == 0.0 {
        return Err(ModelError::ParameterDomain("omega must be nonzero".into()));
    }
    if beta <= 0.0 {
        return Err(ModelError::ParameterDomain(format!("beta must be positive, got {beta}")));
    }
    if alphas.is_empty() || alphas.len() != lambdas.len() {
        return Err(ModelError::ParameterDomain(format!(
            "need m ≥ 1 bath modes with matching parameter lists, got {} alphas and {} lambdas",
            alphas.len(),
            lambdas.len()
        )));
    }
    if alphas.iter().any(|&a| a <= 0.0) {
        return Err(ModelError::ParameterDomain("every alpha_j must be positive".into()));
    }
    if lambdas.iter().any(|&l| l == 0.0) {
        return Err(ModelError::ParameterDomain("every lambda_j must be nonzero".into()));
    }

    let m_modes = alphas.len();
    let n = m_modes + 2;
    let (x, y) = (0, 1);
    let (xi, eta) = (n, n + 1);
    let z = |j: usize| 2 + j;
    let zeta = |j: usize| n + 2 + j;
    let im = |v: f64| C64::new(0.0, v);
    let re = |v: f64| C64::new(v, 0.0);
    let mut m = CMat::zeros(2 * n, 2 * n);
    add_term(&mut m, y, xi, im(1.0));
    add_term(&mut m, x, eta, im(-omega * omega));
    for j in 0..m_modes {
        add_term(&mut m, z(j), eta, im(lambdas[j]));
        add_term(&mut m, y, zeta(j), im(-lambdas[j]));
        add_term(&mut m, zeta(j), zeta(j), re(alphas[j] / beta));
        add_term(&mut m, z(j), z(j), re(alphas[j] * beta / 4.0));
    }
    let symbol = make_symbol(PhaseDim::new(n), m).expect("square entries");

    let d = m_modes + 2;
    let mut drift = RMat::zeros(d, d);
    drift[(0, 1)] = 1.0;
    drift[(1, 0)] = -omega * omega;
    for j in 0..m_modes {
        drift[(1, 2 + j)] = lambdas[j];
        drift[(2 + j, 1)] = -lambdas[j];
        drift[(2 + j, 2 + j)] = -alphas[j];
    }
    let mut noise = RMat::zeros(d, m_modes);
    for j in 0..m_modes {
        noise[(2 + j, j)] = (2.0 * alphas[j] / beta).sqrt();
    }
    // Density ∝ u₀² = e^{−(β/2)(ω²x² + y² + |z|²)}.
    let mut exponent = RMat::identity(d, d) * (beta / 2.0);
    exponent[(0, 0)] = beta * omega * omega / 2.0;
    let sde = LinearSDE { drift, noise, equilibrium_density_exponent: Some(exponent) };

    let mu0 = 0.5 * alphas.iter().sum::<f64>();
    Ok(GleModel {
        omega,
        beta,
        alphas: alphas.to_vec(),
        lambdas: lambdas.to_vec(),
        symbol,
        sde,
        mu0,
    })
}

/// Closed-form ground-state exponent (β/4)·diag(ω², 1, ..., 1) on (x,y,z).
pub fn gle_ground_state_exponent(omega: f64, beta: f64, m_modes: usize) -> RMat {
    let n = m_modes + 2;
    let mut a = RMat::identity(n, n) * (beta / 4.0);
    a[(0, 0)] = beta * omega * omega / 4.0;
    a
}

/// Coefficients [c₀, c₂, c₄] of the even characteristic polynomial
/// P(X) = X⁶ + c₄X⁴ + c₂X² + c₀ of the GLE Hamilton map for m = 1
/// (β-independent; the odd coefficients vanish).
pub fn gle_char_poly_m1(omega: f64, alpha: f64, lambda: f64) -> [f64; 3] {
    let (w2, a2, l2) = (omega * omega, alpha * alpha, lambda * lambda);
    let c4 = 0.25 * (a2 - 2.0 * l2 - 2.0 * w2);
    let c2 = ((l2 + w2).powi(2) - 2.0 * w2 * a2) / 16.0;
    let c0 = w2 * w2 * a2 / 64.0;
    [c0, c2, c4]
}

/// Roots of y³ + py² + qy + r over C by Cardano's method.
fn cubic_roots(p: C64, q: C64, r: C64) -> [C64; 3] {
    let third = C64::new(1.0 / 3.0, 0.0);
    // Depress: y = t − p/3.
    let pp = q - p * p * third;
    let qq = p * p * p * C64::new(2.0 / 27.0, 0.0) - p * q * third + r;
    let disc = (qq * qq * C64::new(0.25, 0.0) + pp * pp * pp / C64::new(27.0, 0.0)).sqrt();
    // Pick the branch with the larger magnitude to dodge cancellation.
    let plus = -qq * C64::new(0.5, 0.0) + disc;
    let minus = -qq * C64::new(0.5, 0.0) - disc;
    let u3 = if plus.norm() >= minus.norm() { plus } else { minus };
    let omega = C64::new(-0.5, 3f64.sqrt() / 2.0);
    if u3.norm() < 1e-300 {
        // p = q = 0: triple root.
        let t = (-qq).cbrt();
        return [t - p * third, t * omega - p * third, t * omega * omega - p * third];
    }
    let u = u3.cbrt();
    let mut roots = [C64::new(0.0, 0.0); 3];
    let mut w = C64::new(1.0, 0.0);
    for root in &mut roots {
        let uk = u * w;
        let vk = -pp / (uk * C64::new(3.0, 0.0));
        *root = uk + vk - p * third;
        w *= omega;
    }
    roots
}

/// Independent τ₀ for GLE m = 1: solve P(X) as a cubic in Y = X²,
/// recover the six eigenvalues X = ±√Y, and take 2·min{Im X > 0}.
pub fn gle_tau0_closed_m1(omega: f64, alpha: f64, lambda: f64) -> Result<f64, ModelError> {
    let [c0, c2, c4] = gle_char_poly_m1(omega, alpha, lambda);
    let ys = cubic_roots(C64::new(c4, 0.0), C64::new(c2, 0.0), C64::new(c0, 0.0));
    let mut min_im = f64::INFINITY;
    for y in ys {
        let x = y.sqrt();
        for cand in [x, -x] {
            if cand.im > 1e-12 {
                min_im = min_im.min(cand.im);
            }
        }
    }
    if !min_im.is_finite() {
        return Err(ModelError::ParameterDomain(
            "no eigenvalue with positive imaginary part".into(),
        ));
    }
    Ok(2.0 * min_im)
}

/// One cell of the τ₀(α, λ) sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapSweepCell {
    pub alpha: f64,
    pub lambda: f64,
    pub tau0: Option<f64>,
    pub tau0_closed_form: Option<f64>,
    pub status: String,
}

/// τ₀ over an (α, λ) grid for GLE m = 1, via the spectrum pipeline and
/// independently via the cubic closed form. Errors mark the cell and
/// never abort the sweep.
pub fn gle_gap_sweep(
    omega: f64,
    beta: f64,
    alpha_grid: &[f64],
    lambda_grid: &[f64],
) -> Vec<GapSweepCell> {
    let mut cells = Vec::with_capacity(alpha_grid.len() * lambda_grid.len());
    for &alpha in alpha_grid {
        for &lambda in lambda_grid {
            let cell = match gle_model(omega, beta, &[alpha], &[lambda]) {
                Ok(model) => {
                    let map = crate::hamilton::hamilton_map(&model.symbol);
                    let spectral = analyze_spectrum(&map);
                    let closed = gle_tau0_closed_m1(omega, alpha, lambda);
                    let status = match (&spectral, &closed) {
                        (Ok(_), Ok(_)) => "ok".to_string(),
                        (Err(e), _) => format!("spectrum: {e}"),
                        (_, Err(e)) => format!("closed form: {e}"),
                    };
                    GapSweepCell {
                        alpha,
                        lambda,
                        tau0: spectral.ok().map(|r| r.tau0),
                        tau0_closed_form: closed.ok(),
                        status,
                    }
                }
                Err(e) => GapSweepCell {
                    alpha,
                    lambda,
                    tau0: None,
                    tau0_closed_form: None,
                    status: format!("model: {e}"),
                },
            };
            cells.push(cell);
        }
    }
    cells
}

/// Multiset comparison between the SDE drift spectrum and the cluster
/// set: σ(B) must equal {2iλ : λ cluster, counted with multiplicity r}.
pub fn drift_matches_spectrum(sde: &LinearSDE, clusters: &[EigenCluster], tol: f64) -> bool {
    let mut expected: Vec<C64> = Vec::new();
    for c in clusters {
        for _ in 0..c.r {
            expected.push(C64::new(0.0, 2.0) * c.lambda);
        }
    }
    let mut actual = complex_eigenvalues(&complexify(&sde.drift));
    if actual.len() != expected.len() {
        return false;
    }
    for e in expected {
        let Some(pos) = actual.iter().position(|a| (a - e).norm() <= tol) else {
            return false;
        };
        actual.swap_remove(pos);
    }
    true
}

/// Characteristic polynomial of the Hamilton map, for closed-form checks.
pub fn hamilton_char_poly(sym: &QuadraticSymbol) -> Vec<C64> {
    char_poly(&crate::hamilton::hamilton_map(sym).f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::PhasePoint;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn kfp_symbol_values() {
        let m = kfp_model(1.0).unwrap();
        let p = PhasePoint::from_real(&[1.0, 2.0, 3.0, 4.0]);
        // η² + ¼v² + i(vξ − xη) = 16 + 1 + i(6 − 4).
        assert!((m.symbol.evaluate(&p).unwrap() - c(17.0, 2.0)).norm() < 1e-12);
        let m = kfp_model(1.5).unwrap();
        assert!((m.symbol.evaluate(&p).unwrap() - c(17.0, 0.0)).norm() < 1e-12);
        assert_eq!(kfp_model(0.0).unwrap_err(), ModelError::ZeroParameter);
    }

    #[test]
    fn kfp_hamilton_map_matches_display() {
        // For a = 1 the Hamilton map is the displayed 4×4 matrix.
        let m = kfp_model(1.0).unwrap();
        let f = crate::hamilton::hamilton_map(&m.symbol).f;
        let want = [
            [c(0.0, 0.0), c(0.0, 0.5), c(0.0, 0.0), c(0.0, 0.0)],
            [c(0.0, -0.5), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
            [c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.5)],
            [c(0.0, 0.0), c(-0.25, 0.0), c(0.0, -0.5), c(0.0, 0.0)],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert!((f[(i, j)] - want[i][j]).norm() < 1e-14, "entry ({i},{j}) = {}", f[(i, j)]);
            }
        }
    }

    #[test]
    fn kfp_sde_stationarity_pins_normalization() {
        let m = kfp_model(2.5).unwrap();
        let e = m.sde.equilibrium_density_exponent.unwrap();
        // C∞ = (2E)⁻¹ must solve B·C + C·Bᵀ + ΣΣᵀ = 0.
        let cov = (&e * 2.0).try_inverse().unwrap();
        let resid =
            &m.sde.drift * &cov + &cov * m.sde.drift.transpose() + &m.sde.noise * m.sde.noise.transpose();
        assert!(crate::linalg::fro_norm_r(&resid) < 1e-12);
        // a < 0: no stationary density.
        assert!(kfp_model(-1.0).unwrap().sde.equilibrium_density_exponent.is_none());
    }

    #[test]
    fn chains_symbol_values_and_constants() {
        // Equal temperatures: β₁ = β₂ = 1, δ₁ = δ₂ = 0.
        let m = chains_model(2.0, 3.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        assert!((m.beta1 - 1.0).abs() < 1e-15 && (m.beta2 - 1.0).abs() < 1e-15);
        assert!(m.delta1.abs() < 1e-15 && m.delta2.abs() < 1e-15);
        let p = PhasePoint::from_real(&[
            1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0, 11.0, 12.0,
        ]);
        assert!((m.symbol.evaluate(&p).unwrap() - c(297.0, 79.0)).norm() < 1e-10);

        // Unequal temperature: β₁ = 3/4, δ₁ = −1/2 at α = 2, α₁ = 1.
        let m = chains_model(1.0, 1.0, 0.0, 2.0, 1.0, 1.0).unwrap();
        assert!((m.beta1 - 0.75).abs() < 1e-15);
        assert!((m.delta1 + 0.5).abs() < 1e-15);
        let mut coords = vec![0.0; 12];
        coords[0] = 1.0; // x₁
        coords[4] = 3.0; // z₁
        coords[10] = 2.0; // ζ₁
        let p = PhasePoint::from_real(&coords);
        assert!((m.symbol.evaluate(&p).unwrap() - c(7.0, -4.0)).norm() < 1e-12);
    }

    #[test]
    fn chains_morse_quantity_and_domain() {
        assert!((chains_model(1.0, 1.0, 1.0, 1.0, 1.0, 1.0).unwrap().m_c).abs() < 1e-15);
        assert!((chains_model(2.0, 2.0, 1.0, 1.0, 1.0, 1.0).unwrap().m_c - 3.0).abs() < 1e-15);
        assert!(matches!(
            chains_model(1.0, 1.0, 1.0, 0.4, 1.0, 0.2),
            Err(ModelError::TemperatureDomain { .. })
        ));
        assert!(matches!(
            chains_model(1.0, 1.0, 1.0, 1.0, -1.0, 1.0),
            Err(ModelError::ParameterDomain(_))
        ));
    }

    #[test]
    fn gle_symbol_values() {
        let m = gle_model(1.0, 1.0, &[1.0], &[1.0]).unwrap();
        let p = PhasePoint::from_real(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        // i(yξ − ω²xη) + iλ(zη − yζ) + α(ζ² + z²/4) = 38.25 + 6i.
        assert!((m.symbol.evaluate(&p).unwrap() - c(38.25, 6.0)).norm() < 1e-12);
        assert!((m.mu0 - 0.5).abs() < 1e-15);

        assert!(gle_model(0.0, 1.0, &[1.0], &[1.0]).is_err());
        assert!(gle_model(1.0, 0.0, &[1.0], &[1.0]).is_err());
        assert!(gle_model(1.0, 1.0, &[], &[]).is_err());
        assert!(gle_model(1.0, 1.0, &[1.0], &[1.0, 2.0]).is_err());
        assert!(gle_model(1.0, 1.0, &[-1.0], &[1.0]).is_err());
        assert!(gle_model(1.0, 1.0, &[1.0], &[0.0]).is_err());
    }

    #[test]
    fn gle_sde_stationarity() {
        let m = gle_model(1.3, 2.0, &[0.8, 1.7], &[0.9, -1.2]).unwrap();
        let e = m.sde.equilibrium_density_exponent.clone().unwrap();
        let cov = (&e * 2.0).try_inverse().unwrap();
        let resid = &m.sde.drift * &cov
            + &cov * m.sde.drift.transpose()
            + &m.sde.noise * m.sde.noise.transpose();
        assert!(crate::linalg::fro_norm_r(&resid) < 1e-12);
        // Drift is Hurwitz.
        let eigs = complex_eigenvalues(&complexify(&m.sde.drift));
        assert!(eigs.iter().all(|l| l.re < -1e-8), "{eigs:?}");
    }

    #[test]
    fn gle_char_poly_m1_at_unit_parameters() {
        // X⁶ − ¾X⁴ + ⅛X² + 1/64.
        let [c0, c2, c4] = gle_char_poly_m1(1.0, 1.0, 1.0);
        assert!((c4 + 0.75).abs() < 1e-15);
        assert!((c2 - 0.125).abs() < 1e-15);
        assert!((c0 - 1.0 / 64.0).abs() < 1e-15);
    }

    #[test]
    fn cubic_roots_reconstruct_polynomial() {
        let (p, q, r) = (c(1.0, -2.0), c(-3.0, 0.5), c(2.0, 2.0));
        for y in cubic_roots(p, q, r) {
            let v = y * y * y + p * y * y + q * y + r;
            assert!(v.norm() < 1e-10, "residual {v}");
        }
        // Triple root at −1: (y+1)³ = y³ + 3y² + 3y + 1.
        for y in cubic_roots(c(3.0, 0.0), c(3.0, 0.0), c(1.0, 0.0)) {
            assert!((y + c(1.0, 0.0)).norm() < 1e-4);
        }
    }

    #[test]
    fn gap_sweep_single_cell_consistency() {
        let cells = gle_gap_sweep(1.0, 1.0, &[1.0], &[1.0]);
        assert_eq!(cells.len(), 1);
        let cell = &cells[0];
        assert_eq!(cell.status, "ok");
        let (t, tc) = (cell.tau0.unwrap(), cell.tau0_closed_form.unwrap());
        assert!((t - tc).abs() < 1e-9, "spectral {t} vs closed {tc}");
    }

    #[test]
    fn all_models_are_accretive() {
        for sym in [
            kfp_model(1.0).unwrap().symbol,
            kfp_model(-2.0).unwrap().symbol,
            chains_model(2.0, 2.0, 1.0, 1.0, 0.8, 1.3).unwrap().symbol,
            gle_model(1.0, 1.0, &[1.0, 2.0], &[1.0, -0.5]).unwrap().symbol,
        ] {
            let rep = sym.check_accretive(1e-10);
            assert!(rep.is_psd, "min_eig = {}", rep.min_eig);
            assert!(rep.min_eig >= -1e-12);
        }
    }

    #[test]
    fn models_are_real_operators() {
        assert!(crate::ground_state::realness_check(&kfp_model(-0.7).unwrap().symbol));
        assert!(crate::ground_state::realness_check(
            &chains_model(2.0, 2.0, 1.0, 1.0, 0.8, 1.3).unwrap().symbol
        ));
        assert!(crate::ground_state::realness_check(
            &gle_model(2.0, 0.5, &[1.0], &[3.0]).unwrap().symbol
        ));
    }
}
