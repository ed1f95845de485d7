//! Spectral analysis of accretive quadratic differential operators.
//!
//! A complex-valued quadratic form q(X) = Xᵀ Q X on phase space R^{2n}
//! (coordinates X = (x₁..x_n, ξ₁..ξ_n)) with Re q ≥ 0 quantizes to a
//! maximally accretive operator q^w(x,D). Everything this crate computes
//! is driven by the Hamilton map F = −J Q of the symbol:
//!
//! * [`symbol`] - construction and evaluation of quadratic symbols;
//! * [`hamilton`] - the Hamilton map, the flow of Im q, and time averages
//!   of Re q along that flow;
//! * [`structure`] - the singular space S, the hypoellipticity index k₀,
//!   and the subelliptic loss δ = 2k₀/(2k₀+1);
//! * [`spectrum`] - eigenvalues of F clustered by multiplicity, the
//!   operator spectrum Σ(r_λ + 2k_λ)(−iλ), the bottom eigenvalue μ₀ and
//!   the spectral gap τ₀;
//! * [`ground_state`] - the positive Lagrangian plane V⁺, the Gaussian
//!   ground state u₀(x) = exp(−xᵀAx), and the rank-one projection data;
//! * [`models`] - the Kramers–Fokker–Planck, coupled-chain and Langevin
//!   heat-bath symbols with their companion linear SDEs;
//! * [`sde`] - ensemble simulation of those SDEs and empirical decay-rate
//!   estimation.
//!
//! Numerical kernels (complex eigenvalues, matrix exponential, matrix
//! sign function, Lyapunov solves, quadrature) live in [`linalg`]; they
//! are deliberately self-contained so that downstream verification paths
//! can use an unrelated eigensolver.

pub mod ground_state;
pub mod hamilton;
pub mod linalg;
pub mod models;
pub mod sde;
pub mod spectrum;
pub mod structure;
pub mod symbol;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex<f64>;
/// Dense complex matrix.
pub type CMat = nalgebra::DMatrix<C64>;
/// Dense complex vector.
pub type CVec = nalgebra::DVector<C64>;
/// Dense real matrix.
pub type RMat = nalgebra::DMatrix<f64>;
/// Dense real vector.
pub type RVec = nalgebra::DVector<f64>;
