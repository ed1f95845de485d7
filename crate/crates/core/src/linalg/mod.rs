//! Self-contained numerical kernels.
//!
//! These are written against small dense matrices (phase dimension 2n is
//! rarely larger than 16 here); clarity and verified invariants win over
//! blocked performance. Each kernel is exercised by its own unit tests
//! and again indirectly by the model-level oracles.

mod char_poly;
mod eig;
mod expm;
mod lyapunov;
mod quadrature;
mod sign;

pub use char_poly::char_poly;
pub use eig::complex_eigenvalues;
pub use expm::expm;
pub use lyapunov::lyapunov_solve;
pub use quadrature::gauss_legendre;
pub use sign::{matrix_sign, plus_invariant_basis, SignError};

use crate::{C64, CMat, RMat};

/// Frobenius norm of a complex matrix.
pub fn fro_norm(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Frobenius norm of a real matrix.
pub fn fro_norm_r(m: &RMat) -> f64 {
    m.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Maximum absolute entry of a complex matrix.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// 1-norm (maximum column sum) of a complex matrix.
pub fn one_norm(m: &CMat) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Smallest eigenvalue of a real symmetric matrix.
pub fn sym_min_eig(m: &RMat) -> f64 {
    debug_assert_eq!(m.nrows(), m.ncols());
    let sym = (m + m.transpose()) * 0.5;
    sym.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

/// Smallest eigenvalue of the Hermitian part of a complex matrix.
pub fn herm_min_eig(m: &CMat) -> f64 {
    let herm = (m + m.adjoint()) * C64::new(0.5, 0.0);
    herm.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

/// Real part of a complex matrix.
pub fn re_mat(m: &CMat) -> RMat {
    RMat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].re)
}

/// Imaginary part of a complex matrix.
pub fn im_mat(m: &CMat) -> RMat {
    RMat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].im)
}

/// Lift a real matrix to a complex one.
pub fn complexify(m: &RMat) -> CMat {
    CMat::from_fn(m.nrows(), m.ncols(), |i, j| C64::new(m[(i, j)], 0.0))
}

/// 1-norm condition number estimate via explicit inverse; `None` if the
/// matrix is numerically singular.
pub fn cond_1(m: &CMat) -> Option<f64> {
    let inv = m.clone().try_inverse()?;
    Some(one_norm(m) * one_norm(&inv))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norms_agree_on_identity() {
        let id = CMat::identity(4, 4);
        assert_eq!(fro_norm(&id), 2.0);
        assert_eq!(one_norm(&id), 1.0);
        assert_eq!(max_abs(&id), 1.0);
    }

    #[test]
    fn sym_min_eig_diag() {
        let m = RMat::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, -2.0, 7.0]));
        assert!((sym_min_eig(&m) + 2.0).abs() < 1e-12);
    }

    #[test]
    fn cond_of_identity_is_one() {
        let id = CMat::identity(3, 3);
        assert!((cond_1(&id).unwrap() - 1.0).abs() < 1e-14);
    }
}
