//! Dense complex eigenvalues: Householder reduction to upper Hessenberg
//! form followed by explicitly shifted QR iteration with complex Givens
//! rotations and Wilkinson shifts.
//!
//! The matrices this crate feeds in are tiny (2n ≤ 16 for the bundled
//! models), so the unblocked O(n³) path is more than enough; the point of
//! owning this kernel is that downstream oracles can cross-check it
//! against an unrelated eigensolver.

use crate::{C64, CMat};

/// All eigenvalues of a square complex matrix, in no particular order.
///
/// Panics if the QR iteration fails to deflate within a very generous
/// iteration budget: not observed for any finite input in the test
/// corpus; NaN/∞ entries are rejected up front.
pub fn complex_eigenvalues(a: &CMat) -> Vec<C64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "eigenvalues need a square matrix");
    assert!(
        a.iter().all(|z| z.re.is_finite() && z.im.is_finite()),
        "matrix entries must be finite"
    );
    if n == 0 {
        return vec![];
    }
    if n == 1 {
        return vec![a[(0, 0)]];
    }
    let mut h = a.clone();
    hessenberg_in_place(&mut h);
    qr_eigenvalues(h)
}

/// In-place Householder reduction to upper Hessenberg form (the unitary
/// factor is discarded; only eigenvalues are needed).
fn hessenberg_in_place(h: &mut CMat) {
    let n = h.nrows();
    for k in 0..n.saturating_sub(2) {
        // Build the reflector annihilating column k below the subdiagonal.
        let mut norm2 = 0.0;
        for i in (k + 1)..n {
            norm2 += h[(i, k)].norm_sqr();
        }
        let x0 = h[(k + 1, k)];
        let tail2 = norm2 - x0.norm_sqr();
        if tail2 <= f64::EPSILON * f64::EPSILON * norm2 || norm2 == 0.0 {
            continue; // already in Hessenberg form in this column
        }
        let norm = norm2.sqrt();
        let phase = if x0.norm() == 0.0 { C64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        // v = x − α e₁, normalized.
        let mut v = vec![C64::new(0.0, 0.0); n - k - 1];
        v[0] = x0 - alpha;
        for i in (k + 2)..n {
            v[i - k - 1] = h[(i, k)];
        }
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // H ← (I − 2vvᴴ) H on rows k+1.., then H ← H (I − 2vvᴴ) on columns k+1...
        for j in k..n {
            let mut dot = C64::new(0.0, 0.0);
            for i in (k + 1)..n {
                dot += v[i - k - 1].conj() * h[(i, j)];
            }
            let dot2 = dot * 2.0;
            for i in (k + 1)..n {
                let sub = v[i - k - 1] * dot2;
                h[(i, j)] -= sub;
            }
        }
        for i in 0..n {
            let mut dot = C64::new(0.0, 0.0);
            for j in (k + 1)..n {
                dot += h[(i, j)] * v[j - k - 1];
            }
            let dot2 = dot * 2.0;
            for j in (k + 1)..n {
                let sub = dot2 * v[j - k - 1].conj();
                h[(i, j)] -= sub;
            }
        }
        // Enforce the exact zeros the reflector was built to create.
        h[(k + 1, k)] = alpha;
        for i in (k + 2)..n {
            h[(i, k)] = C64::new(0.0, 0.0);
        }
    }
}

/// Eigenvalues of an upper Hessenberg matrix by shifted QR with deflation.
fn qr_eigenvalues(mut h: CMat) -> Vec<C64> {
    let n = h.nrows();
    let mut eigs = Vec::with_capacity(n);
    let mut hi = n - 1;
    let mut stalled = 0usize;
    let mut budget = 500 * n;
    loop {
        // Deflate any negligible subdiagonal in the active window.
        let mut k = hi;
        while k > 0 {
            let small = f64::EPSILON * (h[(k - 1, k - 1)].norm() + h[(k, k)].norm()).max(f64::MIN_POSITIVE);
            if h[(k, k - 1)].norm() <= small {
                h[(k, k - 1)] = C64::new(0.0, 0.0);
                break;
            }
            k -= 1;
        }
        let lo = k;
        if lo == hi {
            eigs.push(h[(hi, hi)]);
            if hi == 0 {
                break;
            }
            hi -= 1;
            stalled = 0;
            continue;
        }
        if hi - lo == 1 {
            let (l1, l2) = eig2(h[(lo, lo)], h[(lo, hi)], h[(hi, lo)], h[(hi, hi)]);
            eigs.push(l1);
            eigs.push(l2);
            if lo == 0 {
                break;
            }
            hi = lo - 1;
            stalled = 0;
            continue;
        }
        assert!(budget > 0, "QR iteration failed to converge");
        budget -= 1;
        stalled += 1;
        // Wilkinson shift from the trailing 2×2; exceptional shift on stall.
        let sigma = if stalled % 12 == 0 {
            h[(hi, hi)] + C64::new(1.5 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            let (l1, l2) = eig2(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            );
            if (l1 - h[(hi, hi)]).norm() <= (l2 - h[(hi, hi)]).norm() {
                l1
            } else {
                l2
            }
        };
        qr_step(&mut h, lo, hi, sigma);
    }
    eigs
}

/// Eigenvalues of [[a, b],[c, d]] via the numerically careful quadratic.
fn eig2(a: C64, b: C64, c: C64, d: C64) -> (C64, C64) {
    let half_tr = (a + d) * 0.5;
    let det = a * d - b * c;
    let disc = (half_tr * half_tr - det).sqrt();
    // Pick the sign that avoids cancellation in the dominant root.
    let l1 = if (half_tr + disc).norm() >= (half_tr - disc).norm() {
        half_tr + disc
    } else {
        half_tr - disc
    };
    let l2 = if l1.norm() > 0.0 { det / l1 } else { half_tr - disc };
    (l1, l2)
}

/// One explicit shifted QR sweep on the window [lo, hi]:
/// H − σI = QR, then H ← RQ + σI, via complex Givens rotations.
fn qr_step(h: &mut CMat, lo: usize, hi: usize, sigma: C64) {
    let m = hi - lo + 1;
    let n = h.ncols();
    for i in lo..=hi {
        h[(i, i)] -= sigma;
    }
    // Left sweep: rotations G_i zero the subdiagonal of the window.
    let mut rots = Vec::with_capacity(m - 1);
    for i in lo..hi {
        let f = h[(i, i)];
        let g = h[(i + 1, i)];
        let (c, s) = givens(f, g);
        rots.push((c, s));
        for j in i..n {
            let a = h[(i, j)];
            let b = h[(i + 1, j)];
            h[(i, j)] = a * c + b * s;
            h[(i + 1, j)] = -a * s.conj() + b * c;
        }
        h[(i + 1, i)] = C64::new(0.0, 0.0);
    }
    // Right sweep: H ← R Qᴴ... Q = (G_{hi−1}···G_{lo})ᴴ, so multiply by
    // each Gᵢᴴ acting on columns (i, i+1).
    for (idx, &(c, s)) in rots.iter().enumerate() {
        let i = lo + idx;
        let top = (i + 2).min(hi + 1); // rows at or above the diagonal band
        for r in 0..top {
            let a = h[(r, i)];
            let b = h[(r, i + 1)];
            h[(r, i)] = a * c + b * s.conj();
            h[(r, i + 1)] = -a * s + b * c;
        }
    }
    for i in lo..=hi {
        h[(i, i)] += sigma;
    }
}

/// Complex Givens rotation: c real, s complex, c² + |s|² = 1, such that
/// [[c, s],[−s̄, c]]·(f, g)ᵀ = (r, 0)ᵀ.
fn givens(f: C64, g: C64) -> (f64, C64) {
    let fn2 = f.norm_sqr();
    let gn2 = g.norm_sqr();
    if gn2 == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    if fn2 == 0.0 {
        return (0.0, g.conj() / gn2.sqrt());
    }
    let rho = (fn2 + gn2).sqrt();
    let c = fn2.sqrt() / rho;
    let s = (f / fn2.sqrt()) * g.conj() / rho;
    (c, s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sort_key(z: &C64) -> (i64, i64) {
        ((z.re * 1e9) as i64, (z.im * 1e9) as i64)
    }

    fn assert_spectrum(m: &CMat, want: &[C64], tol: f64) {
        let mut got = complex_eigenvalues(m);
        let mut want = want.to_vec();
        got.sort_by_key(sort_key);
        want.sort_by_key(sort_key);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).norm() < tol, "got {g}, want {w} (all: {got:?})");
        }
    }

    #[test]
    fn diagonal_matrix() {
        let want = [C64::new(1.0, 2.0), C64::new(-0.5, 0.0), C64::new(0.0, -3.0)];
        let m = CMat::from_diagonal(&nalgebra::DVector::from_vec(want.to_vec()));
        assert_spectrum(&m, &want, 1e-14);
    }

    #[test]
    fn similarity_transform_preserves_spectrum() {
        let want = [
            C64::new(2.0, 1.0),
            C64::new(-1.0, 0.5),
            C64::new(0.3, -0.7),
            C64::new(0.0, 0.1),
        ];
        let d = CMat::from_diagonal(&nalgebra::DVector::from_vec(want.to_vec()));
        // Fixed, well-conditioned similarity.
        let p = CMat::from_fn(4, 4, |i, j| {
            C64::new(
                if i == j { 2.0 } else { 0.3 * ((i + 2 * j) % 3) as f64 },
                0.1 * ((i * j) % 4) as f64,
            )
        });
        let pinv = p.clone().try_inverse().unwrap();
        let m = &p * d * &pinv;
        assert_spectrum(&m, &want, 1e-10);
    }

    #[test]
    fn companion_matrix_of_known_cubic() {
        // p(λ) = λ³ − 6λ² + 11λ − 6 = (λ−1)(λ−2)(λ−3).
        let m = CMat::from_row_slice(
            3,
            3,
            &[
                C64::new(6.0, 0.0),
                C64::new(-11.0, 0.0),
                C64::new(6.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
            ],
        );
        let want = [C64::new(1.0, 0.0), C64::new(2.0, 0.0), C64::new(3.0, 0.0)];
        assert_spectrum(&m, &want, 1e-11);
    }

    #[test]
    fn rotation_block_has_conjugate_pair() {
        let m = CMat::from_row_slice(
            2,
            2,
            &[
                C64::new(0.0, 0.0),
                C64::new(-1.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
            ],
        );
        assert_spectrum(&m, &[C64::new(0.0, 1.0), C64::new(0.0, -1.0)], 1e-14);
    }

    #[test]
    fn trace_and_determinant_consistency_random() {
        // Deterministic pseudo-random fill; checks Σλ = tr and Πλ = det.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
        };
        for trial in 0..20 {
            let n = 2 + trial % 7;
            let m = CMat::from_fn(n, n, |_, _| C64::new(next(), next()));
            let eigs = complex_eigenvalues(&m);
            let sum: C64 = eigs.iter().sum();
            let tr: C64 = (0..n).map(|i| m[(i, i)]).sum();
            assert!((sum - tr).norm() < 1e-10 * (1.0 + tr.norm()), "trial {trial}");
            let prod: C64 = eigs.iter().product();
            let det = m.determinant();
            assert!(
                (prod - det).norm() < 1e-8 * (1.0 + det.norm()),
                "trial {trial}: Πλ={prod}, det={det}"
            );
        }
    }

    #[test]
    fn jordan_block_eigenvalues_cluster_at_the_eigenvalue() {
        // 3×3 Jordan block at 2+i: computed eigenvalues agree to ~ε^(1/3).
        let l = C64::new(2.0, 1.0);
        let mut m = CMat::identity(3, 3) * l;
        m[(0, 1)] = C64::new(1.0, 0.0);
        m[(1, 2)] = C64::new(1.0, 0.0);
        for e in complex_eigenvalues(&m) {
            assert!((e - l).norm() < 1e-4, "Jordan cluster too loose: {e}");
        }
        let sum: C64 = complex_eigenvalues(&m).iter().sum();
        assert!((sum - l * 3.0).norm() < 1e-12, "trace must be exact-ish");
    }

    #[test]
    fn hessenberg_reduction_preserves_spectrum_marker() {
        // Block diag(2×2 rotation generator, 5): spectrum {±2i, 5}.
        let mut m = CMat::zeros(3, 3);
        m[(0, 1)] = C64::new(-2.0, 0.0);
        m[(1, 0)] = C64::new(2.0, 0.0);
        m[(2, 2)] = C64::new(5.0, 0.0);
        let want = [C64::new(0.0, 2.0), C64::new(0.0, -2.0), C64::new(5.0, 0.0)];
        assert_spectrum(&m, &want, 1e-12);
    }
}
