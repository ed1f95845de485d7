//! The singular space S, the hypoellipticity index k₀, and the
//! subelliptic loss δ = 2k₀/(2k₀+1).
//!
//! S = (∩_{j=0}^{2n−1} Ker[Re F (Im F)^j]) ∩ R^{2n}. Working on the real
//! matrices F_re, F_im keeps the real intersection automatic; the kernel
//! intersection is computed by stacking the factor matrices and taking
//! one SVD per stack, which is numerically stabler than pairwise kernel
//! intersections.

use serde::{Deserialize, Serialize};

use crate::hamilton::HamiltonMap;
use crate::linalg::{complex_eigenvalues, fro_norm_r, sym_min_eig};
use crate::symbol::QuadraticSymbol;
use crate::RMat;

/// Default relative rank tolerance for the kernel SVDs.
pub const TOL_RANK_REL: f64 = 1e-9;

/// Errors from singular-space analysis.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StructureError {
    #[error(
        "rank decision ambiguous: singular value {sigma:.6e} lies within a decade of the \
         threshold {threshold:.6e}; pick tol_rank explicitly"
    )]
    RankAmbiguous { sigma: f64, threshold: f64 },
    #[error("partial-ellipticity test inconclusive: no definite rotation and no certified zero")]
    Inconclusive,
}

/// Singular space report: orthonormal basis of S, its dimension, the
/// index k₀ (defined only when S = {0}), the loss δ, and the dimensions
/// of the partial intersections K_j (up to the first trivial one).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularSpaceReport {
    pub basis: RMat,
    pub dim: usize,
    pub k0: Option<usize>,
    pub delta: Option<f64>,
    pub partial_kernels: Vec<usize>,
}

/// Compute S by incremental kernel stacking.
///
/// Each block Re F (Im F)^j is normalized to unit Frobenius norm before
/// stacking (kernels are scale-free, and unnormalized blocks of wildly
/// different magnitude would corrupt one global SVD threshold);
/// numerically vanishing blocks constrain nothing and are skipped.
pub fn singular_space(
    map: &HamiltonMap,
    tol_rank: f64,
) -> Result<SingularSpaceReport, StructureError> {
    let d = map.full_dim();
    let f_re = &map.f_re;
    let f_im = &map.f_im;
    let re_scale = fro_norm_r(f_re).max(f64::MIN_POSITIVE);
    let im_scale = fro_norm_r(f_im);

    let mut stack_rows: Vec<RMat> = Vec::new();
    let mut power = RMat::identity(d, d); // (Im F)^j
    let mut partial_kernels = Vec::new();
    let mut kernel = RMat::identity(d, d); // K_{−1} = R^{2n}
    let mut dim = d;
    let mut k0 = None;

    for j in 0..d {
        if j > 0 {
            power = &power * f_im;
        }
        let block = f_re * &power;
        let block_scale = fro_norm_r(&block);
        // A block that vanishes at the level of accumulated roundoff has
        // full kernel and adds no constraint. The floor is the product of
        // norms (0⁰ = 1 covers j = 0 with a nilpotent or zero Im F); no
        // absolute term, so the decision is invariant under q ↦ c·q.
        let vanish = re_scale * im_scale.powi(j as i32) * (d as f64) * 1e-14;
        if block_scale > vanish {
            stack_rows.push(block / block_scale);
            let stacked = stack_matrices(&stack_rows, d);
            let (kdim, kbasis) = kernel_of(&stacked, tol_rank)?;
            dim = kdim;
            kernel = kbasis;
        }
        partial_kernels.push(dim);
        if dim == 0 {
            k0 = Some(j);
            break;
        }
    }

    let basis = if dim == 0 { RMat::zeros(d, 0) } else { kernel.columns(0, dim).into_owned() };
    let delta = k0.map(|k| 2.0 * k as f64 / (2.0 * k as f64 + 1.0));
    Ok(SingularSpaceReport { basis, dim, k0, delta, partial_kernels })
}

fn stack_matrices(blocks: &[RMat], d: usize) -> RMat {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = RMat::zeros(rows, d);
    let mut r = 0;
    for b in blocks {
        out.rows_mut(r, b.nrows()).copy_from(b);
        r += b.nrows();
    }
    out
}

/// Null space of a stacked real matrix by SVD: returns (dimension,
/// matrix whose first `dimension` columns are an orthonormal kernel
/// basis). Rank decisions within a decade of the threshold are refused.
fn kernel_of(m: &RMat, tol_rank: f64) -> Result<(usize, RMat), StructureError> {
    let d = m.ncols();
    let svd = m.clone().svd(false, true);
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let threshold = tol_rank * sigma_max.max(f64::MIN_POSITIVE);
    let mut dim = 0;
    for &s in svd.singular_values.iter() {
        if s > 0.1 * threshold && s < 10.0 * threshold {
            return Err(StructureError::RankAmbiguous { sigma: s, threshold });
        }
        if s <= threshold {
            dim += 1;
        }
    }
    // Singular values come sorted descending; kernel vectors are the last
    // rows of Vᵀ. If the SVD is rank-truncated, missing directions are
    // exact kernel vectors; recover them by completing the basis.
    let v_t = svd.v_t.expect("requested V^T");
    let reported = v_t.nrows();
    let mut basis = RMat::zeros(d, d);
    let mut col = 0;
    for i in (0..reported).rev() {
        if i < svd.singular_values.len() && svd.singular_values[i] <= threshold && col < dim {
            basis.column_mut(col).copy_from(&v_t.row(i).transpose());
            col += 1;
        }
    }
    // nalgebra always returns a full V for thin input here (rows ≥ cols in
    // every call site once at least one block is stacked), so col == dim.
    debug_assert_eq!(col, dim, "kernel basis extraction incomplete");
    Ok((dim, basis))
}

/// True iff every eigenvalue λ of F has |Im λ| > tol_imag.
///
/// Meaningful under the precondition S = {0} (which forbids real
/// eigenvalues); with S ≠ {0} the answer simply reports what it sees.
pub fn check_no_real_eigenvalues(map: &HamiltonMap, tol_imag: f64) -> bool {
    complex_eigenvalues(&map.f).iter().all(|l| l.im.abs() > tol_imag)
}

/// Partial ellipticity of q on S: does q(X) = 0 with X ∈ S force X = 0?
///
/// Decision procedure on the restricted forms R = Re Q|_S, I = Im Q|_S:
/// definiteness of cos θ·R + sin θ·I for some grid θ certifies a trivial
/// zero set; a nontrivial common kernel of R and I certifies a zero.
/// Anything else is refused as inconclusive rather than guessed.
pub fn partial_ellipticity_on_s(
    sym: &QuadraticSymbol,
    report: &SingularSpaceReport,
) -> Result<bool, StructureError> {
    if report.dim == 0 {
        return Ok(true);
    }
    let b = &report.basis;
    let re_s = b.transpose() * sym.re_q() * b;
    let im_s = b.transpose() * sym.im_q() * b;
    let scale = (fro_norm_r(&re_s) + fro_norm_r(&im_s)).max(f64::MIN_POSITIVE);

    // Definite rotation ⇒ |q| bounded below on the unit sphere of S.
    let steps = 720;
    for k in 0..steps {
        let theta = 2.0 * std::f64::consts::PI * (k as f64) / (steps as f64);
        let rot = &re_s * theta.cos() + &im_s * theta.sin();
        if sym_min_eig(&rot) > 1e-9 * scale {
            return Ok(true);
        }
    }
    // Common kernel vector v: q(v) = 0 exactly.
    let stacked = stack_matrices(&[re_s.clone() / scale, im_s.clone() / scale], report.dim);
    let (kdim, _) = kernel_of(&stacked, TOL_RANK_REL)?;
    if kdim > 0 {
        return Ok(false);
    }
    Err(StructureError::Inconclusive)
}
