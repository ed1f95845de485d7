//! Operator spectrum from the Hamilton map.
//!
//! With S = {0} the spectrum of q^w is the lattice
//! { Σ_λ (r_λ + 2k_λ)(−iλ) : k_λ ∈ N }, the sum running over eigenvalues
//! λ of F with Im λ > 0 and r_λ their algebraic multiplicities. The
//! bottom eigenvalue is μ₀ = Σ r_λ(−iλ) and the spectral gap is
//! τ₀ = 2·min Im λ.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::hamilton::HamiltonMap;
use crate::linalg::{complex_eigenvalues, fro_norm};
use crate::C64;

/// Default relative clustering tolerance: tol = 1e−7·‖F‖.
pub const TOL_CLUSTER_REL: f64 = 1e-7;

/// Default real-part cutoff for lattice enumeration, in units of τ₀.
pub const RE_CUTOFF_TAU0_FACTOR: f64 = 10.0;

const MAX_LATTICE_POINTS: usize = 65_536;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpectrumError {
    #[error("eigenvalue {lambda} of F is real within tolerance {tol:.3e}; S = {{0}} cannot hold")]
    RealEigenvalue { lambda: C64, tol: f64 },
    #[error("eigenvalue cluster at {lambda} has no mirror cluster at −λ with equal multiplicity")]
    PairingViolation { lambda: C64 },
    #[error("no eigenvalue clusters with Im λ > 0")]
    EmptyCluster,
    #[error("lattice enumeration produced more than {max} points below the cutoff; lower re_cutoff")]
    EnumerationTooLarge { max: usize },
    #[error("parameter a = 0 is outside the model domain")]
    ZeroParameter,
}

/// One merged eigenvalue cluster of F with Im λ > 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenCluster {
    /// Cluster representative (mean of members).
    pub lambda: C64,
    /// Algebraic multiplicity = number of raw eigenvalues merged.
    pub r: usize,
    pub members: Vec<C64>,
}

/// One enumerated spectrum point Σ (r_λ + 2k_λ)(−iλ).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticePoint {
    pub value: C64,
    /// Index vector (k_λ), ordered like the cluster list.
    pub index: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub clusters: Vec<EigenCluster>,
    pub mu0: C64,
    pub tau0: f64,
    /// Spectrum points with Re(value) ≤ Re(μ₀) + cutoff, sorted by
    /// (Re, Im, index).
    pub low_lying: Vec<LatticePoint>,
}

/// Eigenvalues of F merged into clusters, keeping Im λ > 0.
///
/// Precondition: the structure analysis reported S = {0}; a (numerically)
/// real eigenvalue is rejected because it contradicts it. Pass
/// `tol_cluster = TOL_CLUSTER_REL * ‖F‖` unless there is a reason not to.
pub fn eigen_clusters(
    map: &HamiltonMap,
    tol_cluster: f64,
) -> Result<Vec<EigenCluster>, SpectrumError> {
    let raw = complex_eigenvalues(&map.f);
    let tol = tol_cluster.max(f64::MIN_POSITIVE);

    // Greedy transitive merge: an eigenvalue joins every cluster it
    // touches, collapsing them into one.
    let mut groups: Vec<Vec<C64>> = Vec::new();
    for lam in raw {
        let mut touched: Vec<usize> = groups
            .iter()
            .enumerate()
            .filter(|(_, g)| g.iter().any(|m| (m - lam).norm() <= tol))
            .map(|(i, _)| i)
            .collect();
        if let Some(&first) = touched.first() {
            for &i in touched.iter().skip(1).rev() {
                let absorbed = groups.remove(i);
                groups[first].extend(absorbed);
            }
            groups[first].push(lam);
        } else {
            groups.push(vec![lam]);
        }
        touched.clear();
    }

    let mut all: Vec<EigenCluster> = groups
        .into_iter()
        .map(|members| {
            let sum: C64 = members.iter().sum();
            let lambda = sum / members.len() as f64;
            EigenCluster { lambda, r: members.len(), members }
        })
        .collect();

    for c in &all {
        if c.lambda.im.abs() <= tol {
            return Err(SpectrumError::RealEigenvalue { lambda: c.lambda, tol });
        }
    }
    // λ ∈ σ(F) ⇒ −λ ∈ σ(F) with the same multiplicity.
    for c in &all {
        let mirror = all
            .iter()
            .find(|d| (d.lambda + c.lambda).norm() <= 10.0 * tol);
        match mirror {
            Some(d) if d.r == c.r => {}
            _ => return Err(SpectrumError::PairingViolation { lambda: c.lambda }),
        }
    }

    all.retain(|c| c.lambda.im > 0.0);
    all.sort_by(|a, b| {
        (a.lambda.im, a.lambda.re)
            .partial_cmp(&(b.lambda.im, b.lambda.re))
            .expect("finite eigenvalues")
    });
    Ok(all)
}

/// μ₀, τ₀ and the enumerated low-lying spectrum.
///
/// `re_cutoff` bounds Re(value) − Re(μ₀); `None` uses 10·τ₀.
pub fn spectrum_report(
    clusters: &[EigenCluster],
    re_cutoff: Option<f64>,
) -> Result<SpectrumReport, SpectrumError> {
    if clusters.is_empty() {
        return Err(SpectrumError::EmptyCluster);
    }
    let minus_i = C64::new(0.0, -1.0);
    let mu0: C64 = clusters.iter().map(|c| minus_i * c.lambda * c.r as f64).sum();
    let tau0 = 2.0 * clusters.iter().map(|c| c.lambda.im).fold(f64::INFINITY, f64::min);
    let cutoff = re_cutoff.unwrap_or(RE_CUTOFF_TAU0_FACTOR * tau0);
    let re_max = mu0.re + cutoff;

    // Best-first lattice walk. Each index vector is generated once by
    // only incrementing coordinates ≥ the last incremented one.
    #[derive(PartialEq)]
    struct Item {
        re: f64,
        value: C64,
        index: Vec<usize>,
        min_j: usize,
    }
    impl Eq for Item {}
    impl PartialOrd for Item {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for Item {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            self.re.total_cmp(&other.re)
        }
    }

    let increments: Vec<C64> = clusters.iter().map(|c| 2.0 * (minus_i * c.lambda)).collect();
    let mut heap = BinaryHeap::new();
    heap.push(Reverse(Item { re: mu0.re, value: mu0, index: vec![0; clusters.len()], min_j: 0 }));
    let mut low_lying = Vec::new();
    while let Some(Reverse(item)) = heap.pop() {
        if item.re > re_max + 1e-12 * re_max.abs().max(1.0) {
            break;
        }
        for j in item.min_j..clusters.len() {
            let mut index = item.index.clone();
            index[j] += 1;
            let value = item.value + increments[j];
            heap.push(Reverse(Item { re: value.re, value, index, min_j: j }));
        }
        low_lying.push(LatticePoint { value: item.value, index: item.index });
        if low_lying.len() > MAX_LATTICE_POINTS {
            return Err(SpectrumError::EnumerationTooLarge { max: MAX_LATTICE_POINTS });
        }
    }
    low_lying.sort_by(|a, b| {
        (a.value.re, a.value.im, &a.index)
            .partial_cmp(&(b.value.re, b.value.im, &b.index))
            .expect("finite spectrum values")
    });

    Ok(SpectrumReport { clusters: clusters.to_vec(), mu0, tau0, low_lying })
}

/// Convenience: clusters with the default tolerance, then the report.
pub fn analyze_spectrum(map: &HamiltonMap) -> Result<SpectrumReport, SpectrumError> {
    let clusters = eigen_clusters(map, TOL_CLUSTER_REL * fro_norm(&map.f))?;
    spectrum_report(&clusters, None)
}

/// Closed forms for the kinetic Fokker–Planck operator with V = ½ax².
pub fn kfp_closed_forms(a: f64) -> Result<(f64, f64), SpectrumError> {
    if a == 0.0 {
        return Err(SpectrumError::ZeroParameter);
    }
    let mu0 = if a > 0.0 { 0.5 } else { (1.0 - 4.0 * a).sqrt() / 2.0 };
    let tau0 = if a < 0.0 {
        ((1.0 - 4.0 * a).sqrt() - 1.0) / 2.0
    } else if a <= 0.25 {
        (1.0 - (1.0 - 4.0 * a).sqrt()) / 2.0
    } else {
        0.5
    };
    Ok((mu0, tau0))
}
