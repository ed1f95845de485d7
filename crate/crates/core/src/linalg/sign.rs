//! Invariant-subspace extraction via the matrix sign function.
//!
//! For a matrix G with no eigenvalue on the imaginary axis, the Newton
//! iteration Z ← (μZ + (μZ)⁻¹)/2 (with determinant scaling μ) converges
//! quadratically to sign(G); P₊ = (I + sign(G))/2 is then the spectral
//! projector onto the invariant subspace of eigenvalues with Re > 0.

use crate::{C64, CMat};

use super::{fro_norm, one_norm};

/// Errors from the subspace extraction.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SignError {
    #[error("sign iteration did not converge (eigenvalue too close to the imaginary axis?)")]
    NotConverged,
    #[error("matrix is numerically singular during the sign iteration")]
    Singular,
    #[error("projector rank is ambiguous: expected {expected}, pivot gap {gap:.3e}")]
    RankDeficient { expected: usize, gap: f64 },
}

/// Orthonormal basis (as matrix columns) of the invariant subspace of `g`
/// associated with eigenvalues of positive real part, which must have
/// dimension `dim`.
pub fn plus_invariant_basis(g: &CMat, dim: usize) -> Result<CMat, SignError> {
    let n = g.nrows();
    assert_eq!(n, g.ncols());
    assert!(dim <= n);
    let sign = matrix_sign(g)?;
    let projector = (sign + CMat::identity(n, n)) * C64::new(0.5, 0.0);
    // Column-pivoted QR of the rank-`dim` projector: the leading `dim`
    // columns of Q span its range; the pivot magnitudes certify the rank.
    let qr = projector.clone().col_piv_qr();
    let q = qr.q();
    let r = qr.r();
    let r0 = r[(0, 0)].norm().max(f64::MIN_POSITIVE);
    let r_last_kept = r[(dim - 1, dim - 1)].norm() / r0;
    let r_first_dropped = if dim < n { r[(dim, dim)].norm() / r0 } else { 0.0 };
    if r_last_kept < 1e-6 || r_first_dropped > 1e-6 {
        return Err(SignError::RankDeficient {
            expected: dim,
            gap: r_first_dropped / r_last_kept.max(f64::MIN_POSITIVE),
        });
    }
    Ok(q.columns(0, dim).into_owned())
}

/// Matrix sign function by scaled Newton iteration.
pub fn matrix_sign(g: &CMat) -> Result<CMat, SignError> {
    let n = g.nrows();
    let mut z = g.clone();
    let mut last_diff = f64::INFINITY;
    for _ in 0..100 {
        let lu = z.clone().lu();
        let det = lu.determinant();
        if !det.is_finite() || det.norm() == 0.0 {
            return Err(SignError::Singular);
        }
        let zinv = lu.try_inverse().ok_or(SignError::Singular)?;
        // Determinant scaling: μ = |det Z|^{−1/n} pulls eigenvalues toward
        // the unit circle and cuts the iteration count roughly in half.
        let mu = det.norm().powf(-1.0 / n as f64);
        let znew = (&z * C64::new(mu * 0.5, 0.0)) + (&zinv * C64::new(0.5 / mu, 0.0));
        let diff = fro_norm(&(&znew - &z));
        z = znew;
        if diff <= 1e-13 * fro_norm(&z) {
            // Converged; verify Z² ≈ I before trusting it.
            let resid = one_norm(&(&z * &z - CMat::identity(n, n)));
            if resid <= 1e-8 * one_norm(&z).max(1.0) {
                return Ok(z);
            }
        }
        // Divergence guard: the difference must eventually shrink.
        if diff > 1e8 && diff > last_diff {
            return Err(SignError::NotConverged);
        }
        last_diff = diff;
    }
    Err(SignError::NotConverged)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_of_definite_diagonal() {
        let d = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::new(2.0, 3.0),
            C64::new(0.5, -1.0),
        ]));
        let s = matrix_sign(&d).unwrap();
        assert!((s[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-10);
        assert!((s[(1, 1)] - C64::new(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn projector_splits_mixed_diagonal() {
        let d = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::new(1.0, 5.0),
            C64::new(-2.0, 1.0),
            C64::new(3.0, -4.0),
            C64::new(-0.7, 0.0),
        ]));
        let basis = plus_invariant_basis(&d, 2).unwrap();
        // Basis must be supported on coordinates 0 and 2 only.
        for row in [1usize, 3] {
            for c in 0..2 {
                assert!(basis[(row, c)].norm() < 1e-10);
            }
        }
        // Orthonormality.
        let gram = basis.adjoint() * &basis;
        assert!(fro_norm(&(&gram - CMat::identity(2, 2))) < 1e-10);
    }

    #[test]
    fn coupled_block_invariant_subspace() {
        // G = [[1, 4],[0, -1]]: eigenvalues ±1; the +1 eigenvector is e₁.
        let g = CMat::from_row_slice(
            2,
            2,
            &[
                C64::new(1.0, 0.0),
                C64::new(4.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(-1.0, 0.0),
            ],
        );
        let basis = plus_invariant_basis(&g, 1).unwrap();
        assert!(basis[(0, 0)].norm() > 0.99);
        assert!(basis[(1, 0)].norm() < 1e-9);
    }

    #[test]
    fn imaginary_axis_eigenvalue_is_rejected() {
        let d = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::new(0.0, 1.0),
            C64::new(1.0, 0.0),
        ]));
        assert!(matrix_sign(&d).is_err());
    }
}
