//! Gaussian ground state u₀(x) = e^{−xᵀAx} from the positive Lagrangian
//! plane V⁺ = ⊕_{Im λ>0} V_λ of the Hamilton map.
//!
//! V⁺ is a graph {(x, B⁺x)} with B⁺ symmetric and Im B⁺ ≻ 0, and
//! A = −(i/2)B⁺ then has Re A ≻ 0.

use serde::{Deserialize, Serialize};

use crate::hamilton::{symplectic_j, HamiltonMap};
use crate::linalg::{cond_1, fro_norm, fro_norm_r, im_mat, re_mat, sym_min_eig, SignError};
use crate::symbol::QuadraticSymbol;
use crate::{C64, CMat, CVec};

/// Relative positivity tolerance for Im B⁺ and the plane probes.
pub const TOL_POSITIVITY_REL: f64 = 1e-10;

const COND_CAP: f64 = 1e12;
const SYM_TOL_REL: f64 = 1e-6;
const LAGRANGIAN_TOL_REL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GroundStateError {
    #[error("invariant-subspace extraction failed: {0}")]
    SubspaceExtraction(#[from] SignError),
    #[error("top block X of the V⁺ basis is numerically singular (cond ≈ {cond:.3e}); the plane is not a graph over x")]
    BlockSingular { cond: f64 },
    #[error("B⁺ asymmetry {asym:.3e} exceeds {SYM_TOL_REL:.0e} relative")]
    AsymmetryTooLarge { asym: f64 },
    #[error("Im B⁺ is not positive definite (min eigenvalue {min_eig:.3e})")]
    PositivityFailure { min_eig: f64 },
    #[error("σ does not vanish on the computed plane (residual {resid:.3e} relative)")]
    NotLagrangian { resid: f64 },
    #[error("Re A is not positive definite (min eigenvalue {min_eig:.3e})")]
    NotPositiveDefinite { min_eig: f64 },
    #[error("coefficient vectors have mismatched lengths {expected} and {got}")]
    BasisMismatch { expected: usize, got: usize },
}

/// The positive Lagrangian plane: orthonormal basis of V⁺ plus the graph
/// matrix B⁺ with V⁺ = {(x, B⁺x)}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagrangianPlane {
    pub basis: CMat,
    pub bplus: CMat,
}

/// Ground-state data: exponent matrix A (u₀ = e^{−xᵀAx}), its eigenvalue
/// μ₀, and ‖u₀‖²_{L²}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundState {
    pub a: CMat,
    pub mu0: C64,
    pub norm_sq: f64,
}

/// Extract V⁺ as the invariant subspace of F for eigenvalues with
/// Im λ > 0, i.e. the plus-invariant subspace of −iF.
///
/// Precondition: S = {0}; then dim V⁺ = n and the plane is a graph over
/// the x block. `tol` is the relative positivity floor.
pub fn positive_lagrangian(
    map: &HamiltonMap,
    tol: f64,
) -> Result<LagrangianPlane, GroundStateError> {
    let n = map.n();
    let g = &map.f * C64::new(0.0, -1.0);
    let basis = crate::linalg::plus_invariant_basis(&g, n)?;

    let x_block = basis.rows(0, n).into_owned();
    let xi_block = basis.rows(n, n).into_owned();
    let cond = cond_1(&x_block).unwrap_or(f64::INFINITY);
    if cond > COND_CAP {
        return Err(GroundStateError::BlockSingular { cond });
    }
    let x_inv = x_block.clone().try_inverse().expect("condition number already checked");
    let raw = &xi_block * &x_inv;
    let scale = fro_norm(&raw).max(f64::MIN_POSITIVE);
    let asym = fro_norm(&(&raw - raw.transpose())) / scale;
    if asym > SYM_TOL_REL {
        return Err(GroundStateError::AsymmetryTooLarge { asym });
    }
    let bplus = (&raw + raw.transpose()) * C64::new(0.5, 0.0);

    // σ vanishes on V⁺ (plain transpose, not conjugate).
    let j = crate::linalg::complexify(&symplectic_j(n));
    let resid = fro_norm(&(basis.transpose() * &j * &basis));
    let basis_sq = fro_norm(&basis).powi(2);
    if resid > LAGRANGIAN_TOL_REL * basis_sq {
        return Err(GroundStateError::NotLagrangian { resid: resid / basis_sq });
    }

    // Positivity: Im B⁺ ≻ 0, and −iσ(X, X̄) > 0 on a probe set.
    let min_eig = sym_min_eig(&im_mat(&bplus));
    if min_eig <= tol * scale {
        return Err(GroundStateError::PositivityFailure { min_eig });
    }
    let mut probes: Vec<CVec> = (0..n).map(|k| basis.column(k).into_owned()).collect();
    for k in 1..n {
        probes.push(basis.column(0).into_owned() + basis.column(k) * C64::new(1.0, 0.0));
        probes.push(basis.column(0).into_owned() + basis.column(k) * C64::new(0.0, 1.0));
    }
    for u in &probes {
        let s: C64 = (u.transpose() * &j * u.map(|z| z.conj()))[(0, 0)];
        let val = (C64::new(0.0, -1.0) * s).re;
        if val <= tol * u.norm_squared() {
            return Err(GroundStateError::PositivityFailure { min_eig: val });
        }
    }

    Ok(LagrangianPlane { basis, bplus })
}

/// a(x) = −½i b⁺(x): A = −(i/2)B⁺, with Re A ≻ 0 and the closed-form
/// Gaussian norm ‖u₀‖² = π^{n/2}/√(det 2·Re A).
pub fn ground_state(plane: &LagrangianPlane, mu0: C64) -> Result<GroundState, GroundStateError> {
    let a = &plane.bplus * C64::new(0.0, -0.5);
    let re_a = re_mat(&a);
    let min_eig = sym_min_eig(&re_a);
    if min_eig <= 0.0 {
        return Err(GroundStateError::NotPositiveDefinite { min_eig });
    }
    let n = a.nrows();
    let det = (re_a * 2.0).determinant();
    let norm_sq = std::f64::consts::PI.powf(n as f64 / 2.0) / det.sqrt();
    Ok(GroundState { a, mu0, norm_sq })
}

/// Spectral-projection coefficient c_u = (u, u₀)/‖u₀‖² in a shared
/// orthonormal expansion basis, so Π₀u = c_u·u₀.
pub fn projection_coefficient(u: &CVec, u0: &CVec) -> Result<C64, GroundStateError> {
    if u.len() != u0.len() {
        return Err(GroundStateError::BasisMismatch { expected: u0.len(), got: u.len() });
    }
    let inner: C64 = u.iter().zip(u0.iter()).map(|(a, b)| a * b.conj()).sum();
    let nsq: f64 = u0.iter().map(|b| b.norm_sqr()).sum();
    Ok(inner / nsq)
}

/// Does q^w map real functions to real functions?
///
/// A monomial x^α D^β quantizes real-to-real iff its coefficient c obeys
/// conj(c)(−1)^{|β|} = c, so the x-x and ξ-ξ blocks of Q must be real
/// and the x-ξ block purely imaginary.
pub fn realness_check(sym: &QuadraticSymbol) -> bool {
    let n = sym.dim().n();
    let scale = sym.norm().max(f64::MIN_POSITIVE);
    let tol = 1e-12 * scale;
    let q = sym.q();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max(q[(i, j)].im.abs()); // x-x block real
            worst = worst.max(q[(n + i, n + j)].im.abs()); // ξ-ξ block real
            worst = worst.max(q[(i, n + j)].re.abs()); // x-ξ block imaginary
        }
    }
    worst <= tol
}

/// Orthogonality condition behind the rank-one projection theorem:
/// the ground state of the adjoint symbol conj(q) must be the complex
/// conjugate of the ground state of q. Checked, never assumed.
pub fn orthogonality_check(
    map: &HamiltonMap,
    adjoint_map: &HamiltonMap,
) -> Result<bool, GroundStateError> {
    let plane = positive_lagrangian(map, TOL_POSITIVITY_REL)?;
    let adj_plane = positive_lagrangian(adjoint_map, TOL_POSITIVITY_REL)?;
    let gs = ground_state(&plane, C64::new(0.0, 0.0))?;
    let adj = ground_state(&adj_plane, C64::new(0.0, 0.0))?;
    let diff = fro_norm(&(&adj.a - gs.a.map(|z| z.conj())));
    Ok(diff <= 1e-8 * fro_norm(&gs.a).max(f64::MIN_POSITIVE))
}

/// Pretty form of the exponent for display: entries of A rounded.
pub fn exponent_description(gs: &GroundState) -> String {
    let a = &gs.a;
    let mut rows = Vec::new();
    for i in 0..a.nrows() {
        let cols: Vec<String> = (0..a.ncols())
            .map(|j| {
                let z = a[(i, j)];
                if z.im.abs() < 1e-12 * fro_norm_r(&re_mat(a)).max(1.0) {
                    format!("{:+.6}", z.re)
                } else {
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                }
            })
            .collect();
        rows.push(format!("[{}]", cols.join(", ")));
    }
    format!("u0 = exp(-x^T A x), A = {}", rows.join(" "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamilton::hamilton_map;
    use crate::symbol::{make_symbol, PhaseDim};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn harmonic_oscillator() -> QuadraticSymbol {
        make_symbol(PhaseDim::new(1), CMat::identity(2, 2)).unwrap()
    }

    #[test]
    fn harmonic_oscillator_ground_state() {
        let map = hamilton_map(&harmonic_oscillator());
        let plane = positive_lagrangian(&map, TOL_POSITIVITY_REL).unwrap();
        // V⁺ spanned by (1, i): B⁺ = i.
        assert!((plane.bplus[(0, 0)] - c(0.0, 1.0)).norm() < 1e-12);
        let gs = ground_state(&plane, c(1.0, 0.0)).unwrap();
        assert!((gs.a[(0, 0)] - c(0.5, 0.0)).norm() < 1e-12);
        assert!((gs.norm_sq - std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn two_dim_elliptic_ground_state_norm() {
        // q = |x|² + |ξ|² on n=2: A = ½I, ‖u₀‖² = ∫e^{−|x|²} = π.
        let sym = make_symbol(PhaseDim::new(2), CMat::identity(4, 4)).unwrap();
        let map = hamilton_map(&sym);
        let plane = positive_lagrangian(&map, TOL_POSITIVITY_REL).unwrap();
        let gs = ground_state(&plane, c(2.0, 0.0)).unwrap();
        assert!(fro_norm(&(&gs.a - CMat::identity(2, 2) * c(0.5, 0.0))) < 1e-12);
        assert!((gs.norm_sq - std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn anisotropic_oscillator_exponent() {
        // q = ω²x² + ξ² has u₀ = e^{−ωx²/2}: A = ω/2.
        let omega = 3.0;
        let mut e = CMat::zeros(2, 2);
        e[(0, 0)] = c(omega * omega, 0.0);
        e[(1, 1)] = c(1.0, 0.0);
        let sym = make_symbol(PhaseDim::new(1), e).unwrap();
        let plane = positive_lagrangian(&hamilton_map(&sym), TOL_POSITIVITY_REL).unwrap();
        let gs = ground_state(&plane, c(omega, 0.0)).unwrap();
        assert!((gs.a[(0, 0)] - c(omega / 2.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn projection_coefficient_linearity() {
        let u0 = CVec::from_vec(vec![c(1.0, 0.0), c(0.5, 0.0), c(0.25, 0.0)]);
        assert!((projection_coefficient(&u0, &u0).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        let doubled = &u0 * c(2.0, 0.0);
        assert!((projection_coefficient(&doubled, &u0).unwrap() - c(2.0, 0.0)).norm() < 1e-15);
        let orth = CVec::from_vec(vec![c(0.5, 0.0), c(-1.0, 0.0), c(0.0, 0.0)]);
        assert!(projection_coefficient(&orth, &u0).unwrap().norm() < 1e-15);
        let short = CVec::from_vec(vec![c(1.0, 0.0)]);
        assert!(matches!(
            projection_coefficient(&short, &u0),
            Err(GroundStateError::BasisMismatch { expected: 3, got: 1 })
        ));
    }

    #[test]
    fn realness_criterion() {
        assert!(realness_check(&harmonic_oscillator()));
        // q = i(x² + ξ²) maps real to imaginary.
        let sym = make_symbol(PhaseDim::new(1), CMat::identity(2, 2) * c(0.0, 1.0)).unwrap();
        assert!(!realness_check(&sym));
        // q = i·xξ quantizes to the real operator (x∂ + ∂x)/2.
        let mut e = CMat::zeros(2, 2);
        e[(0, 1)] = c(0.0, 0.5);
        e[(1, 0)] = c(0.0, 0.5);
        assert!(realness_check(&make_symbol(PhaseDim::new(1), e).unwrap()));
    }

    #[test]
    fn orthogonality_holds_for_selfadjoint_symbol() {
        // Real q: conj(q) = q, ground states identical and real.
        let sym = harmonic_oscillator();
        let map = hamilton_map(&sym);
        let adj = hamilton_map(&sym.conj());
        assert_eq!(orthogonality_check(&map, &adj), Ok(true));
    }
}
