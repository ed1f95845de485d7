//! Continuous Lyapunov equation B X + X Bᵀ + C = 0 by Kronecker
//! vectorization: the drift matrices here are at most ~10×10, so the
//! d²×d² dense solve is the simplest correct tool.

use crate::RMat;

/// Solve B X + X Bᵀ + C = 0 for symmetric C; returns the (symmetrized)
/// solution, or `None` when the Kronecker system is singular (eigenvalue
/// pair λᵢ + λⱼ = 0, e.g. a drift that is not Hurwitz).
pub fn lyapunov_solve(b: &RMat, c: &RMat) -> Option<RMat> {
    let d = b.nrows();
    assert_eq!(d, b.ncols());
    assert_eq!(d, c.nrows());
    assert_eq!(d, c.ncols());
    // vec(BX + XBᵀ) = (I⊗B + B⊗I) vec(X) with column-major vec.
    let mut k = RMat::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            for l in 0..d {
                // (I⊗B): block-diagonal copies of B.
                k[(j * d + i, j * d + l)] += b[(i, l)];
                // (B⊗I): B entries scaling identity blocks.
                k[(j * d + i, l * d + i)] += b[(j, l)];
            }
        }
    }
    let rhs = nalgebra::DVector::from_fn(d * d, |idx, _| -c[(idx % d, idx / d)]);
    let x = k.lu().solve(&rhs)?;
    let xm = RMat::from_fn(d, d, |i, j| x[j * d + i]);
    Some((&xm + xm.transpose()) * 0.5)
}
