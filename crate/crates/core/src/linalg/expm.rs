//! Matrix exponential by scaling and squaring with diagonal Padé
//! approximants (orders 3/5/7/9/13 selected by the 1-norm, θ thresholds
//! from Higham's 2005 analysis).

use crate::{C64, CMat};

use super::one_norm;

const THETA_3: f64 = 1.495585217958292e-2;
const THETA_5: f64 = 2.539398330063230e-1;
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068e0;
const THETA_13: f64 = 5.371920351148152e0;

/// exp(A) for a square complex matrix.
pub fn expm(a: &CMat) -> CMat {
    assert_eq!(a.nrows(), a.ncols(), "expm needs a square matrix");
    let norm = one_norm(a);
    if norm <= THETA_3 {
        return pade(a, &PADE_3);
    }
    if norm <= THETA_5 {
        return pade(a, &PADE_5);
    }
    if norm <= THETA_7 {
        return pade(a, &PADE_7);
    }
    if norm <= THETA_9 {
        return pade(a, &PADE_9);
    }
    // Scale so the norm falls under θ₁₃, apply Padé-13, square back.
    let s = ((norm / THETA_13).log2().ceil()).max(0.0) as u32;
    let scaled = a * C64::new((0.5f64).powi(s as i32), 0.0);
    let mut e = pade(&scaled, &PADE_13);
    for _ in 0..s {
        e = &e * &e;
    }
    e
}

const PADE_3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE_5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE_7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const PADE_9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE_13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Diagonal Padé approximant: solve (−U + V) X = (U + V) where U collects
/// odd powers and V even powers of A.
fn pade(a: &CMat, b: &[f64]) -> CMat {
    let cr = |x: f64| C64::new(x, 0.0);
    let n = a.nrows();
    let id = CMat::identity(n, n);
    let a2 = a * a;
    let (u, v) = if b.len() == 14 {
        // Higham's factored form for order 13 keeps the power chain short.
        let a4 = &a2 * &a2;
        let a6 = &a2 * &a4;
        let u_inner = &a6 * (&a6 * cr(b[13]) + &a4 * cr(b[11]) + &a2 * cr(b[9]))
            + &a6 * cr(b[7])
            + &a4 * cr(b[5])
            + &a2 * cr(b[3])
            + &id * cr(b[1]);
        let u = a * &u_inner;
        let v = &a6 * (&a6 * cr(b[12]) + &a4 * cr(b[10]) + &a2 * cr(b[8]))
            + &a6 * cr(b[6])
            + &a4 * cr(b[4])
            + &a2 * cr(b[2])
            + &id * cr(b[0]);
        (u, v)
    } else {
        // Generic Horner walk over even powers.
        let mut even = id.clone(); // A^0
        let mut u_sum = &even * cr(b[1]);
        let mut v_sum = &even * cr(b[0]);
        let mut k = 2;
        while k < b.len() {
            even = &even * &a2;
            v_sum += &even * cr(b[k]);
            if k + 1 < b.len() {
                u_sum += &even * cr(b[k + 1]);
            }
            k += 2;
        }
        (a * &u_sum, v_sum)
    };
    let lhs = &v - &u;
    let rhs = &v + &u;
    lhs.lu().solve(&rhs).expect("Padé denominator must be invertible")
}
