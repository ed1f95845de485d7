//! Complex-valued quadratic forms q(X) = Xᵀ Q X on phase space R^{2n}.
//!
//! Coordinates are ordered (x₁..x_n, ξ₁..ξ_n) everywhere; Q is stored as
//! the full complex symmetric 2n×2n coefficient matrix, with symmetry
//! enforced at construction rather than assumed.

use serde::{Deserialize, Serialize};

use crate::linalg::{fro_norm, max_abs, re_mat, sym_min_eig};
use crate::{C64, CMat, CVec, RMat};

/// Number of position variables; the phase dimension is 2n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseDim {
    n: usize,
}

impl PhaseDim {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "phase dimension needs n ≥ 1");
        PhaseDim { n }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Full phase-space dimension 2n.
    pub fn full(&self) -> usize {
        2 * self.n
    }
}

/// Errors from symbol construction and evaluation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SymbolError {
    #[error("expected a {expected}×{expected} matrix, got {rows}×{cols}")]
    DimensionMismatch { expected: usize, rows: usize, cols: usize },
    #[error("expected a phase vector of length {expected}, got {got}")]
    PointDimensionMismatch { expected: usize, got: usize },
    #[error("coefficient matrix asymmetry {asym:.3e} exceeds the relative tolerance {tol:.3e}")]
    AsymmetryTooLarge { asym: f64, tol: f64 },
}

/// A quadratic symbol q(X) = Xᵀ Q X with Q complex symmetric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticSymbol {
    dim: PhaseDim,
    q: CMat,
    max_asymmetry: f64,
}

/// A point of (possibly complexified) phase space.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    pub coords: CVec,
}

impl PhasePoint {
    pub fn new(coords: CVec) -> Self {
        PhasePoint { coords }
    }

    pub fn from_real(coords: &[f64]) -> Self {
        PhasePoint {
            coords: CVec::from_iterator(coords.len(), coords.iter().map(|&x| C64::new(x, 0.0))),
        }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.len() == 0
    }
}

/// Build a symbol from an arbitrary (not necessarily symmetric) 2n×2n
/// coefficient matrix; the stored Q is the symmetrization
/// (entries + entriesᵀ)/2, and the largest asymmetry is recorded.
pub fn make_symbol(dim: PhaseDim, entries: CMat) -> Result<QuadraticSymbol, SymbolError> {
    let d = dim.full();
    if entries.nrows() != d || entries.ncols() != d {
        return Err(SymbolError::DimensionMismatch {
            expected: d,
            rows: entries.nrows(),
            cols: entries.ncols(),
        });
    }
    let sym = (&entries + entries.transpose()) * C64::new(0.5, 0.0);
    let max_asymmetry = max_abs(&(&entries - entries.transpose()));
    Ok(QuadraticSymbol { dim, q: sym, max_asymmetry })
}

impl QuadraticSymbol {
    pub fn dim(&self) -> PhaseDim {
        self.dim
    }

    /// The symmetric coefficient matrix Q.
    pub fn q(&self) -> &CMat {
        self.q_matrix()
    }

    pub fn q_matrix(&self) -> &CMat {
        &self.q
    }

    /// Largest |entriesᵢⱼ − entriesⱼᵢ| seen at construction.
    pub fn max_asymmetry(&self) -> f64 {
        self.max_asymmetry
    }

    /// q(X) = Xᵀ Q X.
    pub fn evaluate(&self, x: &PhasePoint) -> Result<C64, SymbolError> {
        self.polarize(x, x)
    }

    /// Polarized form q(X; Y) = Xᵀ Q Y; symmetric in its arguments and
    /// reducing to `evaluate` on the diagonal.
    pub fn polarize(&self, x: &PhasePoint, y: &PhasePoint) -> Result<C64, SymbolError> {
        let d = self.dim.full();
        for p in [x, y] {
            if p.len() != d {
                return Err(SymbolError::PointDimensionMismatch { expected: d, got: p.len() });
            }
        }
        // Plain transpose, not conjugate: the form is bilinear, not sesquilinear.
        let qy = &self.q * &y.coords;
        Ok(x.coords.iter().zip(qy.iter()).map(|(a, b)| a * b).sum())
    }

    /// Symbol of Re q (real symmetric coefficients).
    pub fn real_part(&self) -> QuadraticSymbol {
        QuadraticSymbol {
            dim: self.dim,
            q: CMat::from_fn(self.q.nrows(), self.q.ncols(), |i, j| {
                C64::new(self.q[(i, j)].re, 0.0)
            }),
            max_asymmetry: 0.0,
        }
    }

    /// Symbol of Im q (real symmetric coefficients).
    pub fn imag_part(&self) -> QuadraticSymbol {
        QuadraticSymbol {
            dim: self.dim,
            q: CMat::from_fn(self.q.nrows(), self.q.ncols(), |i, j| {
                C64::new(self.q[(i, j)].im, 0.0)
            }),
            max_asymmetry: 0.0,
        }
    }

    /// Re Q as a real matrix.
    pub fn re_q(&self) -> RMat {
        re_mat(&self.q)
    }

    /// Im Q as a real matrix.
    pub fn im_q(&self) -> RMat {
        crate::linalg::im_mat(&self.q)
    }

    /// Symbol with coefficientwise complex conjugate of Q (the symbol of
    /// the formal adjoint of the operator).
    pub fn conj(&self) -> QuadraticSymbol {
        QuadraticSymbol {
            dim: self.dim,
            q: self.q.map(|z| z.conj()),
            max_asymmetry: self.max_asymmetry,
        }
    }

    /// Frobenius norm of Q, the scale reference for all tolerances.
    pub fn norm(&self) -> f64 {
        fro_norm(&self.q)
    }

    /// Positivity check for Re q: `min_eig` is the smallest eigenvalue of
    /// Re Q and `is_psd` accepts down to −tol_psd (absolute; callers scale
    /// by ‖Q‖).
    pub fn check_accretive(&self, tol_psd: f64) -> AccretiveReport {
        let min_eig = sym_min_eig(&self.re_q());
        AccretiveReport { is_psd: min_eig >= -tol_psd, min_eig }
    }
}

/// Result of `check_accretive`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccretiveReport {
    pub is_psd: bool,
    pub min_eig: f64,
}

/// Default relative PSD tolerance: Re Q of the bundled models is exactly
/// degenerate, so only genuinely negative eigenvalues may reject.
pub const TOL_PSD_REL: f64 = 1e-10;

/// On-disk symbol file: `n`, plus row-major 2n×2n real and imaginary
/// parts. The reader re-validates symmetry within a relative tolerance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SymbolFile {
    pub n: usize,
    #[serde(rename = "Q_re")]
    pub q_re: Vec<f64>,
    #[serde(rename = "Q_im")]
    pub q_im: Vec<f64>,
}

/// Relative symmetry tolerance for symbol files.
pub const SYMBOL_FILE_SYM_TOL: f64 = 1e-12;

impl SymbolFile {
    pub fn from_symbol(sym: &QuadraticSymbol) -> Self {
        let d = sym.dim().full();
        let q = sym.q_matrix();
        let mut q_re = Vec::with_capacity(d * d);
        let mut q_im = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                q_re.push(q[(i, j)].re);
                q_im.push(q[(i, j)].im);
            }
        }
        SymbolFile { n: sym.dim().n(), q_re, q_im }
    }

    /// Validate shape and symmetry, then build the symbol.
    pub fn into_symbol(self) -> Result<QuadraticSymbol, SymbolError> {
        let d = 2 * self.n;
        if self.n == 0 || self.q_re.len() != d * d || self.q_im.len() != d * d {
            return Err(SymbolError::DimensionMismatch {
                expected: d,
                rows: self.q_re.len() / d.max(1),
                cols: d,
            });
        }
        let m = CMat::from_fn(d, d, |i, j| C64::new(self.q_re[i * d + j], self.q_im[i * d + j]));
        let scale = max_abs(&m).max(f64::MIN_POSITIVE);
        let asym = max_abs(&(&m - m.transpose())) / scale;
        if asym > SYMBOL_FILE_SYM_TOL {
            return Err(SymbolError::AsymmetryTooLarge { asym, tol: SYMBOL_FILE_SYM_TOL });
        }
        make_symbol(PhaseDim::new(self.n), m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// q = x² + ξ² on n=1.
    fn harmonic_oscillator() -> QuadraticSymbol {
        make_symbol(PhaseDim::new(1), CMat::identity(2, 2)).unwrap()
    }

    #[test]
    fn harmonic_oscillator_identity_matrix() {
        let sym = harmonic_oscillator();
        assert_eq!(sym.q_matrix(), &CMat::identity(2, 2));
        let at = sym.evaluate(&PhasePoint::from_real(&[1.0, 0.0])).unwrap();
        assert_eq!(at, c(1.0, 0.0));
    }

    #[test]
    fn symmetrization_of_single_offdiagonal_entry() {
        // entries = [[0, i],[0, 0]] → Q = [[0, i/2],[i/2, 0]], q = i·xξ.
        let mut entries = CMat::zeros(2, 2);
        entries[(0, 1)] = c(0.0, 1.0);
        let sym = make_symbol(PhaseDim::new(1), entries).unwrap();
        assert_eq!(sym.q_matrix()[(0, 1)], c(0.0, 0.5));
        assert_eq!(sym.q_matrix()[(1, 0)], c(0.0, 0.5));
        assert!(sym.max_asymmetry() > 0.9);
        // q(1, 1) = i.
        let v = sym.evaluate(&PhasePoint::from_real(&[1.0, 1.0])).unwrap();
        assert!((v - c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn evaluate_at_origin_is_zero() {
        let sym = harmonic_oscillator();
        let v = sym.evaluate(&PhasePoint::from_real(&[0.0, 0.0])).unwrap();
        assert_eq!(v, c(0.0, 0.0));
    }

    #[test]
    fn polarize_symmetric_and_diagonal_consistent() {
        let mut entries = CMat::zeros(2, 2);
        entries[(0, 1)] = c(0.0, 1.0);
        let sym = make_symbol(PhaseDim::new(1), entries).unwrap();
        let x = PhasePoint::from_real(&[1.0, 0.0]);
        let y = PhasePoint::from_real(&[0.0, 1.0]);
        let pxy = sym.polarize(&x, &y).unwrap();
        let pyx = sym.polarize(&y, &x).unwrap();
        assert_eq!(pxy, pyx);
        assert!((pxy - c(0.0, 0.5)).norm() < 1e-15);
        let pxx = sym.polarize(&x, &x).unwrap();
        assert_eq!(pxx, sym.evaluate(&x).unwrap());
    }

    #[test]
    fn orthogonal_axes_of_diagonal_form_polarize_to_zero() {
        let sym = harmonic_oscillator();
        let x = PhasePoint::from_real(&[1.0, 0.0]);
        let y = PhasePoint::from_real(&[0.0, 1.0]);
        assert_eq!(sym.polarize(&x, &y).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn real_imag_parts_reassemble() {
        let entries = CMat::from_fn(4, 4, |i, j| c((i + j) as f64, (i as f64) - (j as f64)));
        let sym = make_symbol(PhaseDim::new(2), entries).unwrap();
        let re = sym.real_part();
        let im = sym.imag_part();
        let rebuilt = re.q_matrix() + im.q_matrix() * c(0.0, 1.0);
        assert_eq!(&rebuilt, sym.q_matrix());
        assert!(im.q_matrix().iter().all(|z| z.im == 0.0));
    }

    #[test]
    fn accretive_check_accepts_psd_rejects_negative() {
        let ho = harmonic_oscillator();
        let rep = ho.check_accretive(1e-10);
        assert!(rep.is_psd);
        assert!((rep.min_eig - 1.0).abs() < 1e-12);

        // q = −x²: negative definite direction.
        let mut entries = CMat::zeros(2, 2);
        entries[(0, 0)] = c(-1.0, 0.0);
        let neg = make_symbol(PhaseDim::new(1), entries).unwrap();
        assert!(!neg.check_accretive(1e-10).is_psd);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let entries = CMat::zeros(3, 3);
        assert!(matches!(
            make_symbol(PhaseDim::new(2), entries),
            Err(SymbolError::DimensionMismatch { expected: 4, .. })
        ));
        let sym = harmonic_oscillator();
        assert!(sym.evaluate(&PhasePoint::from_real(&[1.0])).is_err());
    }

    #[test]
    fn symbol_file_roundtrip_and_symmetry_gate() {
        let mut entries = CMat::zeros(2, 2);
        entries[(0, 1)] = c(0.0, 0.5);
        entries[(1, 0)] = c(0.0, 0.5);
        entries[(0, 0)] = c(1.0, 0.0);
        let sym = make_symbol(PhaseDim::new(1), entries).unwrap();
        let file = SymbolFile::from_symbol(&sym);
        let back = file.into_symbol().unwrap();
        assert_eq!(back.q_matrix(), sym.q_matrix());

        let bad = SymbolFile { n: 1, q_re: vec![0.0, 1.0, 0.0, 0.0], q_im: vec![0.0; 4] };
        assert!(matches!(bad.into_symbol(), Err(SymbolError::AsymmetryTooLarge { .. })));
    }
}
