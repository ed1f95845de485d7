//! Hermite basis bookkeeping: truncation, ladder matrices, multi-index
//! encoding, and the expansion of Gaussian ground states.

use nalgebra::DVector;
use quadgap_core::linalg::{complex_eigenvalues, gauss_legendre};
use quadgap_core::{C64, CMat, CVec};

use crate::GalerkinError;

/// Hard cap on the total basis dimension n_basis^n.
pub const DIM_LIMIT: usize = 200_000;

/// Half-open box of Hermite levels `[0, n_basis)^n`.
///
/// Basis vectors are indexed by multi-indices beta with axis 0 fastest:
/// `index = beta[0] + n_basis*beta[1] + n_basis^2*beta[2] + ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HermiteTruncation {
    n: usize,
    n_basis: usize,
    dim: usize,
}

/// Build a truncation with `n_basis` levels on each of `n` axes.
pub fn hermite_truncation(n: usize, n_basis: usize) -> Result<HermiteTruncation, GalerkinError> {
    assert!(n >= 1, "at least one variable");
    if n_basis < 4 {
        return Err(GalerkinError::TruncationTooSmall { n_basis });
    }
    let mut dim: usize = 1;
    for _ in 0..n {
        dim = dim
            .checked_mul(n_basis)
            .filter(|&d| d <= DIM_LIMIT)
            .ok_or(GalerkinError::TruncationTooLarge {
                dim: usize::MAX,
                limit: DIM_LIMIT,
            })?;
    }
    Ok(HermiteTruncation { n, n_basis, dim })
}

impl HermiteTruncation {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_basis(&self) -> usize {
        self.n_basis
    }

    /// Total dimension n_basis^n.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Decompose a flat index into its per-axis levels.
    pub fn decode(&self, mut index: usize) -> Vec<usize> {
        let mut beta = vec![0usize; self.n];
        for b in beta.iter_mut() {
            *b = index % self.n_basis;
            index /= self.n_basis;
        }
        beta
    }

    /// Flat index of a multi-index (components must be < n_basis).
    pub fn encode(&self, beta: &[usize]) -> usize {
        debug_assert_eq!(beta.len(), self.n);
        let mut index = 0usize;
        for &b in beta.iter().rev() {
            debug_assert!(b < self.n_basis);
            index = index * self.n_basis + b;
        }
        index
    }

    /// Truncated matrix of multiplication by x on one axis.
    ///
    /// x h_k = sqrt((k+1)/2) h_{k+1} + sqrt(k/2) h_{k-1}.
    pub fn x_matrix(&self) -> CMat {
        let nb = self.n_basis;
        let mut m = CMat::zeros(nb, nb);
        for k in 0..nb {
            if k + 1 < nb {
                m[(k + 1, k)] = C64::new(((k + 1) as f64 / 2.0).sqrt(), 0.0);
            }
            if k >= 1 {
                m[(k - 1, k)] = C64::new((k as f64 / 2.0).sqrt(), 0.0);
            }
        }
        m
    }

    /// Truncated matrix of D = -i d/dx on one axis.
    ///
    /// d/dx h_k = sqrt(k/2) h_{k-1} - sqrt((k+1)/2) h_{k+1}.
    pub fn d_matrix(&self) -> CMat {
        let nb = self.n_basis;
        let mut m = CMat::zeros(nb, nb);
        for k in 0..nb {
            if k >= 1 {
                m[(k - 1, k)] = C64::new(0.0, -(k as f64 / 2.0).sqrt());
            }
            if k + 1 < nb {
                m[(k + 1, k)] = C64::new(0.0, ((k + 1) as f64 / 2.0).sqrt());
            }
        }
        m
    }
}

/// Hermite expansion of an unnormalized Gaussian u0(x) = exp(-x' A x).
#[derive(Debug, Clone)]
pub struct U0Expansion {
    /// Coefficients on the truncation's basis, flat-indexed.
    pub coeffs: CVec,
    /// Worst pointwise synthesis error over the check grid.
    pub synth_error: f64,
    /// l2 fraction of the expansion carried by the outermost two levels.
    pub tail_fraction: f64,
}

/// Expand exp(-x' A x) over the truncated Hermite basis.
///
/// The lowering identity a_i u0 = sum_j R_ij a_j^dag u0 with
/// R = (I - 2A)(I + 2A)^{-1} turns into a two-step recurrence on the
/// coefficients; c_0 = pi^{n/4} / sqrt(det(A + I/2)) seeds it. The result
/// is checked by re-synthesizing the Gaussian on a quadrature grid, which
/// catches branch and normalization mistakes that the recurrence alone
/// would propagate silently.
pub fn u0_expansion(
    a: &CMat,
    trunc: &HermiteTruncation,
) -> Result<U0Expansion, GalerkinError> {
    let n = trunc.n();
    assert_eq!(a.nrows(), n, "exponent matrix must match the truncation");
    assert_eq!(a.ncols(), n);
    let nb = trunc.n_basis();
    let dim = trunc.dim();

    let id = CMat::identity(n, n);
    let plus = &id + a * C64::new(2.0, 0.0);
    let minus = &id - a * C64::new(2.0, 0.0);
    // (I+2A) and (I-2A) commute, so the one-sided solve is the two-sided R.
    let mut r = plus
        .clone()
        .lu()
        .solve(&minus)
        .ok_or(GalerkinError::ExpansionDiverges { radius: f64::INFINITY })?;
    r = (&r + &r.transpose()) * C64::new(0.5, 0.0);
    let radius = complex_eigenvalues(&r)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if radius >= 1.0 - 1e-9 {
        return Err(GalerkinError::ExpansionDiverges { radius });
    }

    let det = (a + &id * C64::new(0.5, 0.0)).determinant();
    let c0 = C64::new(std::f64::consts::PI.powf(n as f64 / 4.0), 0.0) / det.sqrt();

    // Fill by total degree; odd shells stay zero because they only ever
    // reference the shell two below.
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by_key(|&i| trunc.decode(i).iter().sum::<usize>());
    let mut coeffs = CVec::zeros(dim);
    coeffs[0] = c0;
    for &idx in &order {
        let beta = trunc.decode(idx);
        let level: usize = beta.iter().sum();
        if level == 0 {
            continue;
        }
        let i = beta.iter().position(|&b| b > 0).expect("level > 0");
        let mut alpha = beta.clone();
        alpha[i] -= 1;
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..n {
            if alpha[j] == 0 {
                continue;
            }
            let mut lower = alpha.clone();
            lower[j] -= 1;
            acc += r[(i, j)] * C64::new((alpha[j] as f64).sqrt(), 0.0)
                * coeffs[trunc.encode(&lower)];
        }
        coeffs[idx] = acc / C64::new((beta[i] as f64).sqrt(), 0.0);
    }

    let total: f64 = coeffs.iter().map(|z| z.norm_sqr()).sum();
    let tail: f64 = (0..dim)
        .filter(|&i| trunc.decode(i).iter().any(|&b| b + 2 >= nb))
        .map(|i| coeffs[i].norm_sqr())
        .sum();
    let tail_fraction = (tail / total.max(1e-300)).sqrt();

    // Synthesis check on a tensor Gauss-Legendre grid over [-2.5, 2.5]^n.
    let (nodes, _) = gauss_legendre(8);
    let pts: Vec<f64> = nodes.iter().map(|t| 2.5 * t).collect();
    let table: Vec<DVector<f64>> = pts.iter().map(|&x| hermite_values(nb, x)).collect();
    let mut grid_idx = vec![0usize; n];
    let mut synth_error: f64 = 0.0;
    let mut amp: f64 = 0.0;
    loop {
        let x = CVec::from_iterator(n, grid_idx.iter().map(|&g| C64::new(pts[g], 0.0)));
        let mut synth = C64::new(0.0, 0.0);
        for idx in 0..dim {
            let beta = trunc.decode(idx);
            let mut h = 1.0;
            for (l, &b) in beta.iter().enumerate() {
                h *= table[grid_idx[l]][b];
            }
            synth += coeffs[idx] * C64::new(h, 0.0);
        }
        let quad = (&x.transpose() * a * &x)[(0, 0)];
        let target = (-quad).exp();
        amp = amp.max(target.norm());
        synth_error = synth_error.max((synth - target).norm());
        // odometer over the tensor grid
        let mut l = 0;
        loop {
            if l == n {
                break;
            }
            grid_idx[l] += 1;
            if grid_idx[l] < pts.len() {
                break;
            }
            grid_idx[l] = 0;
            l += 1;
        }
        if l == n {
            break;
        }
    }

    // Budget: the strict floor catches wrong coefficients outright; the
    // tail term forgives what the truncation genuinely cannot carry.
    let shell: f64 = (0..dim)
        .filter(|&i| trunc.decode(i).iter().any(|&b| b + 4 >= nb))
        .map(|i| coeffs[i].norm())
        .sum();
    let budget = (1e-8 * amp.max(1.0)).max(5.0 * shell);
    if synth_error > budget {
        return Err(GalerkinError::ExpansionInconsistent { synth_error, budget });
    }

    Ok(U0Expansion { coeffs, synth_error, tail_fraction })
}

/// Values h_0(x)..h_{n_basis-1}(x) of the normalized Hermite functions.
fn hermite_values(n_basis: usize, x: f64) -> DVector<f64> {
    let mut h = DVector::zeros(n_basis);
    h[0] = std::f64::consts::PI.powf(-0.25) * (-x * x / 2.0).exp();
    if n_basis > 1 {
        h[1] = std::f64::consts::SQRT_2 * x * h[0];
    }
    for k in 2..n_basis {
        let kf = k as f64;
        h[k] = (2.0 / kf).sqrt() * x * h[k - 1] - ((kf - 1.0) / kf).sqrt() * h[k - 2];
    }
    h
}
