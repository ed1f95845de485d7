//! Assembly of the Weyl quantization on the truncated Hermite basis.
//!
//! Each phase-space coordinate acts on a single axis of the tensor basis
//! by a two-term ladder rule, so a product of two coordinates moves a
//! multi-index by at most one step per factor. Matrix entries are the
//! exact values <h_row, op h_col> on the infinite ladder: intermediate
//! levels are left unclipped and only the final row is required to lie in
//! the box. Clipping intermediates instead would pollute the last two
//! levels (the harmonic oscillator would lose its exact diagonal).

use quadgap_core::symbol::QuadraticSymbol;
use quadgap_core::{C64, CMat, CVec};

use crate::hermite::HermiteTruncation;
use crate::GalerkinError;

/// A quadratic symbol realized as a sparse matrix on a Hermite box.
///
/// Keeps the symbol and truncation so refinement runs can re-assemble at
/// a larger box without the caller re-plumbing them.
#[derive(Debug, Clone)]
pub struct QuantizedOperator {
    sym: QuadraticSymbol,
    trunc: HermiteTruncation,
    /// Column-compressed storage: entries of column c are
    /// rows[col_ptr[c]..col_ptr[c+1]] with matching values.
    col_ptr: Vec<usize>,
    rows: Vec<u32>,
    vals: Vec<C64>,
}

/// One ladder step: the action of a single coordinate on one axis level,
/// as (new_level_or_none_below_zero, m, phase) with the actual
/// coefficient phase * sqrt(m/2). Keeping the magnitude under a deferred
/// square root lets a composed pair multiply as sqrt(m1*m2)/2, which is
/// exact whenever m1 = m2; that is what keeps the oscillator's diagonal
/// free of roundoff.
fn axis_action(is_position: bool, k: usize) -> [(Option<usize>, f64, C64); 2] {
    let up = (k + 1) as f64;
    let down = k as f64;
    let lower = if k > 0 { Some(k - 1) } else { None };
    if is_position {
        [
            (Some(k + 1), up, C64::new(1.0, 0.0)),
            (lower, down, C64::new(1.0, 0.0)),
        ]
    } else {
        // D = -i d/dx raises with +i and lowers with -i
        [
            (Some(k + 1), up, C64::new(0.0, 1.0)),
            (lower, down, C64::new(0.0, -1.0)),
        ]
    }
}

/// Build the Galerkin matrix of q^w on the given truncation.
///
/// M = sum_{j,k} Q_jk . weyl(coord_j, coord_k) with
/// weyl(A, B) = (AB + BA)/2; for the symmetric Q of a polarized symbol
/// this is the Weyl-symmetrized operator.
pub fn quantize(
    sym: &QuadraticSymbol,
    trunc: &HermiteTruncation,
) -> Result<QuantizedOperator, GalerkinError> {
    let n = sym.dim().n();
    if n != trunc.n() {
        return Err(GalerkinError::DimensionMismatch { expected: n, got: trunc.n() });
    }
    if trunc.n_basis() < 4 {
        return Err(GalerkinError::TruncationTooSmall { n_basis: trunc.n_basis() });
    }
    let dim = trunc.dim();
    let nb = trunc.n_basis();
    let q = sym.q();
    let full = 2 * n;

    // coordinate index -> (axis, is_position)
    let coord = |c: usize| -> (usize, bool) { if c < n { (c, true) } else { (c - n, false) } };

    let mut triplets: Vec<(u32, u32, C64)> = Vec::new();
    let mut beta = vec![0usize; n];
    for col in 0..dim {
        for a in 0..full {
            for b in 0..full {
                let w = q[(a, b)];
                if w == C64::new(0.0, 0.0) {
                    continue;
                }
                let half = w * C64::new(0.5, 0.0);
                // weyl(A_a, A_b) contributes both composition orders
                for &(first, second) in &[(b, a), (a, b)] {
                    let (ax_f, pos_f) = coord(first);
                    let (ax_s, pos_s) = coord(second);
                    for (mid, mf, pf) in axis_action(pos_f, beta[ax_f]) {
                        let Some(mid) = mid else { continue };
                        let start_s = if ax_s == ax_f { mid } else { beta[ax_s] };
                        for (fin, ms, ps) in axis_action(pos_s, start_s) {
                            let Some(fin) = fin else { continue };
                            let mut out = beta.clone();
                            out[ax_f] = mid;
                            out[ax_s] = fin;
                            // the intermediate level is allowed to leave the
                            // box when the second factor brings it back
                            if out.iter().any(|&v| v >= nb) {
                                continue;
                            }
                            let mag = C64::new((mf * ms).sqrt() / 2.0, 0.0);
                            triplets.push((
                                trunc.encode(&out) as u32,
                                col as u32,
                                half * pf * ps * mag,
                            ));
                        }
                    }
                }
            }
        }
        // odometer
        let mut l = 0;
        while l < n {
            beta[l] += 1;
            if beta[l] < nb {
                break;
            }
            beta[l] = 0;
            l += 1;
        }
    }

    triplets.sort_by_key(|&(r, c, _)| (c, r));
    let mut col_ptr = vec![0usize; dim + 1];
    let mut rows: Vec<u32> = Vec::with_capacity(triplets.len());
    let mut vals: Vec<C64> = Vec::with_capacity(triplets.len());
    let mut i = 0;
    while i < triplets.len() {
        let (r, c, mut v) = triplets[i];
        let mut j = i + 1;
        while j < triplets.len() && triplets[j].0 == r && triplets[j].1 == c {
            v += triplets[j].2;
            j += 1;
        }
        // exact cancellations (the oscillator's off-diagonal) are dropped
        if v != C64::new(0.0, 0.0) {
            rows.push(r);
            vals.push(v);
            col_ptr[c as usize + 1] += 1;
        }
        i = j;
    }
    for c in 0..dim {
        col_ptr[c + 1] += col_ptr[c];
    }

    Ok(QuantizedOperator { sym: sym.clone(), trunc: trunc.clone(), col_ptr, rows, vals })
}

impl QuantizedOperator {
    pub fn dim(&self) -> usize {
        self.trunc.dim()
    }

    pub fn truncation(&self) -> &HermiteTruncation {
        &self.trunc
    }

    pub fn symbol(&self) -> &QuadraticSymbol {
        &self.sym
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Dense copy of the matrix.
    pub fn dense(&self) -> CMat {
        let dim = self.dim();
        let mut m = CMat::zeros(dim, dim);
        for c in 0..dim {
            for k in self.col_ptr[c]..self.col_ptr[c + 1] {
                m[(self.rows[k] as usize, c)] += self.vals[k];
            }
        }
        m
    }

    /// Raw compressed-column storage, for solvers that factorize shifts
    /// of the operator.
    pub(crate) fn csc_parts(&self) -> (&[usize], &[u32], &[C64]) {
        (&self.col_ptr, &self.rows, &self.vals)
    }

    /// Sparse matrix-vector product.
    pub fn matvec(&self, x: &CVec) -> CVec {
        assert_eq!(x.len(), self.dim());
        let mut y = CVec::zeros(self.dim());
        for c in 0..self.dim() {
            let xc = x[c];
            if xc == C64::new(0.0, 0.0) {
                continue;
            }
            for k in self.col_ptr[c]..self.col_ptr[c + 1] {
                y[self.rows[k] as usize] += self.vals[k] * xc;
            }
        }
        y
    }
}
