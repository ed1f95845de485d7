//! Characteristic polynomial coefficients via the Faddeev–LeVerrier
//! recurrence (exact in rational arithmetic; here double precision).

use crate::{C64, CMat};

/// Coefficients `c` of det(λI − A) = Σ c[k] λᵏ, monic (c[n] = 1),
/// listed from the constant term upward.
pub fn char_poly(a: &CMat) -> Vec<C64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    let mut coeffs = vec![C64::new(0.0, 0.0); n + 1];
    coeffs[n] = C64::new(1.0, 0.0);
    let mut m = CMat::identity(n, n);
    for k in 1..=n {
        let am = a * &m;
        let trace: C64 = (0..n).map(|i| am[(i, i)]).sum();
        let c = -trace / (k as f64);
        coeffs[n - k] = c;
        m = am + CMat::identity(n, n) * c;
    }
    coeffs
}
