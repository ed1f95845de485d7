//! Ensemble simulation of the linear model SDEs dX = BX dt + Σ dW and
//! empirical return-to-equilibrium rates.
//!
//! The default scheme samples the exact discrete-time Gaussian
//! transition (mean e^{Bh}x, covariance C∞ − e^{Bh}C∞e^{Bᵀh}), so the
//! only error in the moment curves is statistical. Euler–Maruyama is
//! kept as a cross-check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::linalg::{complex_eigenvalues, complexify, expm, fro_norm_r, lyapunov_solve, re_mat};
use crate::models::LinearSDE;
use crate::{RMat, RVec};

/// Paths per reduction block; fixed so results are independent of the
/// thread schedule.
const BLOCK_PATHS: usize = 1024;
const MAX_BINS: usize = 1 << 20;
const BOOTSTRAP_RESAMPLES: usize = 200;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SdeError {
    #[error("drift spectrum reaches the closed right half-plane (max Re = {max_re:.6e}); no return to equilibrium")]
    UnstableDrift { max_re: f64 },
    #[error("invalid simulation config: {0}")]
    ConfigInvalid(String),
    #[error("stationary Lyapunov equation is singular despite a Hurwitz drift")]
    LyapunovFailure,
    #[error("t_final = {t_final} too short to resolve the gap; need at least {needed}")]
    FitWindowTooShort { t_final: f64, needed: f64 },
    #[error("too few usable points for a rate fit")]
    TooFewPoints,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    EulerMaruyama,
    ExactGaussian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub dt: f64,
    pub t_final: f64,
    pub n_paths: usize,
    pub seed: u64,
    pub scheme: Scheme,
    /// Shared initial point of every path.
    pub x0: Vec<f64>,
}

/// Per-block raw moment sums, kept so statistics can be re-aggregated
/// (block bootstrap) without touching the paths again.
#[derive(Debug, Clone)]
pub struct BlockMoments {
    pub count: usize,
    /// sum_x[bin] = Σ_paths X(t_bin)
    pub sum_x: Vec<RVec>,
    /// sum_xx[bin] = Σ_paths X(t_bin)X(t_bin)ᵀ
    pub sum_xx: Vec<RMat>,
}

#[derive(Debug, Clone)]
pub struct EnsembleStats {
    pub times: Vec<f64>,
    pub means: Vec<RVec>,
    /// Population covariance per bin.
    pub covs: Vec<RMat>,
    pub blocks: Vec<BlockMoments>,
    /// Stationary covariance from the Lyapunov equation.
    pub cov_inf: RMat,
    pub n_paths: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FitMethod {
    /// Least squares on log values over the max-R² window.
    WindowedLs,
    /// Least squares through parabola-refined local maxima; immune to
    /// oscillatory sign structure under the norm.
    Envelope,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub rate: f64,
    pub window: (f64, f64),
    pub r2: f64,
    pub method: FitMethod,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayEstimate {
    pub mean: RateFit,
    pub cov: RateFit,
    pub mean_ci: (f64, f64),
    pub cov_ci: (f64, f64),
    pub tau0_reference: f64,
}

/// One CSV row of binned statistics; ci bounds are the block-bootstrap
/// interval for mean_norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinnedRow {
    pub t: f64,
    pub mean_norm: f64,
    pub cov_err: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

/// Stationary covariance C∞ of dX = BX dt + Σ dW (requires Hurwitz B).
pub fn stationary_covariance(model: &LinearSDE) -> Option<RMat> {
    lyapunov_solve(&model.drift, &(&model.noise * model.noise.transpose()))
}

enum Stepper {
    Exact { e: RMat, l: RMat },
    Euler { b_dt: RMat, s_sqrt_dt: RMat },
}

impl Stepper {
    fn normals_per_step(&self) -> usize {
        match self {
            Stepper::Exact { l, .. } => l.ncols(),
            Stepper::Euler { s_sqrt_dt, .. } => s_sqrt_dt.ncols(),
        }
    }

    fn advance(&self, x: &RVec, xi: &RVec) -> RVec {
        match self {
            Stepper::Exact { e, l } => e * x + l * xi,
            Stepper::Euler { b_dt, s_sqrt_dt } => x + b_dt * x + s_sqrt_dt * xi,
        }
    }
}

/// Symmetric PSD square root with negative-eigenvalue clamping.
fn psd_sqrt(m: &RMat) -> RMat {
    let sym = (m + m.transpose()) * 0.5;
    let eig = nalgebra::SymmetricEigen::new(sym);
    let d = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    &eig.eigenvectors * RMat::from_diagonal(&d) * eig.eigenvectors.transpose()
}

#[cfg(feature = "parallel")]
fn map_blocks<F>(n: usize, f: F) -> Vec<BlockMoments>
where
    F: Fn(usize) -> BlockMoments + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_blocks<F>(n: usize, f: F) -> Vec<BlockMoments>
where
    F: Fn(usize) -> BlockMoments,
{
    (0..n).map(f).collect()
}

/// Simulate an ensemble from cfg.x0 and return binned moments.
///
/// Statistics are bit-identical for a fixed (seed, config) regardless of
/// parallelism: each path has its own RNG stream and blocks are folded
/// in index order.
pub fn simulate(model: &LinearSDE, cfg: &SimConfig) -> Result<EnsembleStats, SdeError> {
    let d = model.drift.nrows();
    if model.drift.ncols() != d || model.noise.nrows() != d {
        return Err(SdeError::ConfigInvalid("drift/noise dimensions disagree".into()));
    }
    if !(cfg.dt > 0.0) {
        return Err(SdeError::ConfigInvalid(format!("dt = {} must be positive", cfg.dt)));
    }
    if cfg.t_final < cfg.dt {
        return Err(SdeError::ConfigInvalid("t_final < dt".into()));
    }
    if cfg.n_paths == 0 {
        return Err(SdeError::ConfigInvalid("n_paths = 0".into()));
    }
    if cfg.x0.len() != d {
        return Err(SdeError::ConfigInvalid(format!(
            "x0 has length {}, drift is {d}x{d}",
            cfg.x0.len()
        )));
    }
    let max_re = complex_eigenvalues(&complexify(&model.drift))
        .iter()
        .map(|l| l.re)
        .fold(f64::NEG_INFINITY, f64::max);
    if max_re >= 0.0 {
        return Err(SdeError::UnstableDrift { max_re });
    }

    let n_steps = (cfg.t_final / cfg.dt).round() as usize;
    let n_bins = n_steps + 1;
    if n_bins > MAX_BINS {
        return Err(SdeError::ConfigInvalid(format!("{n_bins} bins exceed the cap {MAX_BINS}")));
    }
    let times: Vec<f64> = (0..n_bins).map(|i| i as f64 * cfg.dt).collect();

    let cov_inf = stationary_covariance(model).ok_or(SdeError::LyapunovFailure)?;
    let stepper = match cfg.scheme {
        Scheme::ExactGaussian => {
            let e = re_mat(&expm(&complexify(&(&model.drift * cfg.dt))));
            let c_h = &cov_inf - &e * &cov_inf * e.transpose();
            Stepper::Exact { e, l: psd_sqrt(&c_h) }
        }
        Scheme::EulerMaruyama => Stepper::Euler {
            b_dt: &model.drift * cfg.dt,
            s_sqrt_dt: &model.noise * cfg.dt.sqrt(),
        },
    };

    let x0 = RVec::from_column_slice(&cfg.x0);
    let n_blocks = cfg.n_paths.div_ceil(BLOCK_PATHS);
    let run_block = |b: usize| -> BlockMoments {
        let lo = b * BLOCK_PATHS;
        let hi = ((b + 1) * BLOCK_PATHS).min(cfg.n_paths);
        let mut sum_x = vec![RVec::zeros(d); n_bins];
        let mut sum_xx = vec![RMat::zeros(d, d); n_bins];
        let k = stepper.normals_per_step();
        let mut xi = RVec::zeros(k);
        for p in lo..hi {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(p as u64);
            let mut x = x0.clone();
            sum_x[0] += &x;
            sum_xx[0] += &x * x.transpose();
            for bin in 1..n_bins {
                for v in xi.iter_mut() {
                    *v = rng.sample(StandardNormal);
                }
                x = stepper.advance(&x, &xi);
                sum_x[bin] += &x;
                sum_xx[bin] += &x * x.transpose();
            }
        }
        BlockMoments { count: hi - lo, sum_x, sum_xx }
    };
    let blocks = map_blocks(n_blocks, run_block);

    let (means, covs) = aggregate(&blocks, (0..n_blocks).collect::<Vec<_>>().as_slice(), d, n_bins);
    Ok(EnsembleStats {
        times,
        means,
        covs,
        blocks,
        cov_inf,
        n_paths: cfg.n_paths,
        seed: cfg.seed,
    })
}

/// Means and population covariances from a multiset of block indices.
fn aggregate(
    blocks: &[BlockMoments],
    idxs: &[usize],
    d: usize,
    n_bins: usize,
) -> (Vec<RVec>, Vec<RMat>) {
    let mut count = 0usize;
    let mut sum_x = vec![RVec::zeros(d); n_bins];
    let mut sum_xx = vec![RMat::zeros(d, d); n_bins];
    for &i in idxs {
        count += blocks[i].count;
        for bin in 0..n_bins {
            sum_x[bin] += &blocks[i].sum_x[bin];
            sum_xx[bin] += &blocks[i].sum_xx[bin];
        }
    }
    let nf = count as f64;
    let means: Vec<RVec> = sum_x.iter().map(|s| s / nf).collect();
    let covs: Vec<RMat> = sum_xx
        .iter()
        .zip(&means)
        .map(|(sxx, m)| sxx / nf - m * m.transpose())
        .collect();
    (means, covs)
}

pub fn mean_norms(stats: &EnsembleStats) -> Vec<f64> {
    stats.means.iter().map(|m| m.norm()).collect()
}

pub fn cov_errors(stats: &EnsembleStats) -> Vec<f64> {
    stats.covs.iter().map(|c| fro_norm_r(&(c - &stats.cov_inf))).collect()
}

// ---------------------------------------------------------------------
// Rate fitting
// ---------------------------------------------------------------------

/// Windowed least squares on (t, ln v): the window (stride-scanned, at
/// least 6 points and a fifth of the usable span) maximizing R², ties
/// broken toward longer windows. Returns None when too few positive
/// values exist.
fn windowed_ls(ts: &[f64], vs: &[f64]) -> Option<RateFit> {
    let pts: Vec<(f64, f64)> = ts
        .iter()
        .zip(vs)
        .filter(|(_, &v)| v > 1e-290 && v.is_finite())
        .map(|(&t, &v)| (t, v.ln()))
        .collect();
    let k = pts.len();
    if k < 6 {
        return None;
    }
    // Prefix sums for O(1) window statistics.
    let mut st = vec![0.0; k + 1];
    let mut sy = vec![0.0; k + 1];
    let mut stt = vec![0.0; k + 1];
    let mut sty = vec![0.0; k + 1];
    let mut syy = vec![0.0; k + 1];
    for (i, &(t, y)) in pts.iter().enumerate() {
        st[i + 1] = st[i] + t;
        sy[i + 1] = sy[i] + y;
        stt[i + 1] = stt[i] + t * t;
        sty[i + 1] = sty[i] + t * y;
        syy[i + 1] = syy[i] + y * y;
    }
    let min_len = 6.max(k / 5);
    let stride = 1.max(k / 120);
    let mut best: Option<(f64, usize, f64, (f64, f64))> = None; // r2, len, slope, window
    let mut i = 0;
    while i + min_len <= k {
        let mut j = i + min_len;
        while j <= k {
            let n = (j - i) as f64;
            let (dst, dsy) = (st[j] - st[i], sy[j] - sy[i]);
            let dtt = stt[j] - stt[i] - dst * dst / n;
            let dty = sty[j] - sty[i] - dst * dsy / n;
            let dyy = syy[j] - syy[i] - dsy * dsy / n;
            if dtt > 1e-30 {
                let slope = dty / dtt;
                let r2 = if dyy > 1e-30 { (dty * dty) / (dtt * dyy) } else { 1.0 };
                let better = match &best {
                    None => true,
                    Some((br2, blen, _, _)) => {
                        r2 > br2 + 1e-12 || (r2 > br2 - 1e-12 && (j - i) > *blen)
                    }
                };
                if better {
                    best = Some((r2, j - i, slope, (pts[i].0, pts[j - 1].0)));
                }
            }
            if j == k {
                break;
            }
            j = (j + stride).min(k);
        }
        i += stride;
    }
    best.map(|(r2, _, slope, window)| RateFit {
        rate: -slope,
        window,
        r2,
        method: FitMethod::WindowedLs,
    })
}

/// Local maxima of vs dominating a ±w neighborhood, each refined by a
/// parabola through its three central samples in log space.
fn refined_peaks(ts: &[f64], vs: &[f64], w: usize) -> Vec<(f64, f64)> {
    let k = vs.len();
    let mut peaks = Vec::new();
    for i in 1..k.saturating_sub(1) {
        if vs[i] <= 1e-290 || !vs[i].is_finite() {
            continue;
        }
        let lo = i.saturating_sub(w);
        let hi = (i + w + 1).min(k);
        if (lo..hi).all(|j| j == i || vs[j] < vs[i]) {
            let (y0, y1, y2) = (vs[i - 1].ln(), vs[i].ln(), vs[i + 1].ln());
            let denom = y0 - 2.0 * y1 + y2;
            if denom < -1e-300 {
                // Vertex of the interpolating parabola.
                let delta = (0.5 * (y0 - y2) / denom).clamp(-1.0, 1.0);
                let h = ts[i + 1] - ts[i];
                let t_star = ts[i] + delta * h;
                let y_star = y1 - 0.25 * (y0 - y2) * delta;
                peaks.push((t_star, y_star));
            } else {
                peaks.push((ts[i], y1));
            }
        }
    }
    peaks
}

/// Statistical floor estimate: median of the trailing tenth of the series.
fn noise_floor(vs: &[f64]) -> f64 {
    let m = 5.max(vs.len() / 10).min(vs.len());
    let mut tail: Vec<f64> =
        vs[vs.len() - m..].iter().copied().filter(|v| v.is_finite() && *v > 0.0).collect();
    if tail.is_empty() {
        return 0.0;
    }
    tail.sort_by(f64::total_cmp);
    tail[tail.len() / 2]
}

/// Envelope fit: least squares through refined peaks at t ≥ t_min.
///
/// The dominance radius is found adaptively: start wide (suppresses
/// sampling-noise bumps) and shrink until at least four peaks above
/// twice the noise floor survive.
fn envelope_ls(ts: &[f64], vs: &[f64], t_min: f64) -> Option<RateFit> {
    let y_floor = (2.0 * noise_floor(vs)).max(1e-290).ln();
    let mut peaks = Vec::new();
    let mut w = vs.len() / 6;
    while w >= 2 {
        peaks = refined_peaks(ts, vs, w)
            .into_iter()
            .filter(|(t, y)| *t >= t_min && *y > y_floor)
            .collect();
        if peaks.len() >= 4 {
            break;
        }
        w /= 2;
    }
    if peaks.len() < 4 {
        return None;
    }
    let n = peaks.len() as f64;
    let (mut st, mut sy, mut stt, mut sty, mut syy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(t, y) in &peaks {
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
        syy += y * y;
    }
    let dtt = stt - st * st / n;
    let dty = sty - st * sy / n;
    let dyy = syy - sy * sy / n;
    if dtt <= 1e-30 {
        return None;
    }
    let slope = dty / dtt;
    let r2 = if dyy > 1e-30 { (dty * dty) / (dtt * dyy) } else { 1.0 };
    Some(RateFit {
        rate: -slope,
        window: (peaks[0].0, peaks[peaks.len() - 1].0),
        r2,
        method: FitMethod::Envelope,
    })
}

/// Fit a decay rate to a norm series, choosing the envelope method when
/// the series has enough oscillation peaks and plain windowed least
/// squares otherwise.
pub fn fit_decay_rate(ts: &[f64], vs: &[f64]) -> Result<RateFit, SdeError> {
    let t_min = ts.last().copied().unwrap_or(0.0) * 0.25;
    if let Some(env) = envelope_ls(ts, vs, t_min) {
        return Ok(env);
    }
    windowed_ls(ts, vs).ok_or(SdeError::TooFewPoints)
}

fn fit_with_method(ts: &[f64], vs: &[f64], method: FitMethod) -> Option<RateFit> {
    match method {
        FitMethod::Envelope => {
            let t_min = ts.last().copied().unwrap_or(0.0) * 0.25;
            envelope_ls(ts, vs, t_min).or_else(|| windowed_ls(ts, vs))
        }
        FitMethod::WindowedLs => windowed_ls(ts, vs),
    }
}

fn percentile_ci(mut rates: Vec<f64>) -> (f64, f64) {
    rates.retain(|r| r.is_finite());
    if rates.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    rates.sort_by(f64::total_cmp);
    let n = rates.len();
    let lo = ((0.025 * n as f64).floor() as usize).min(n - 1);
    let hi = ((0.975 * n as f64).ceil() as usize).min(n).saturating_sub(1).max(lo);
    (rates[lo], rates[hi])
}

/// Fit mean- and covariance-decay rates with block-bootstrap confidence
/// intervals, and carry τ₀ along for comparison.
///
/// Precondition: t_final ≥ 10/τ₀ so several gap times fit in the run.
pub fn empirical_gap(stats: &EnsembleStats, tau0: f64) -> Result<DecayEstimate, SdeError> {
    if !(tau0 > 0.0) {
        return Err(SdeError::ConfigInvalid(format!("tau0 = {tau0} must be positive")));
    }
    let t_final = *stats.times.last().unwrap_or(&0.0);
    let needed = 10.0 / tau0;
    if t_final < needed {
        return Err(SdeError::FitWindowTooShort { t_final, needed });
    }
    let mean_fit = fit_decay_rate(&stats.times, &mean_norms(stats))?;
    let cov_fit = fit_decay_rate(&stats.times, &cov_errors(stats))?;

    let n_blocks = stats.blocks.len();
    let d = stats.cov_inf.nrows();
    let n_bins = stats.times.len();
    let (mut mean_rates, mut cov_rates) = (Vec::new(), Vec::new());
    if n_blocks >= 2 {
        let mut rng = ChaCha8Rng::seed_from_u64(stats.seed ^ 0x626f_6f74_7374_7261);
        for _ in 0..BOOTSTRAP_RESAMPLES {
            let idxs: Vec<usize> =
                (0..n_blocks).map(|_| rng.gen_range(0..n_blocks)).collect();
            let (means, covs) = aggregate(&stats.blocks, &idxs, d, n_bins);
            let mn: Vec<f64> = means.iter().map(|m| m.norm()).collect();
            let ce: Vec<f64> = covs.iter().map(|c| fro_norm_r(&(c - &stats.cov_inf))).collect();
            if let Some(f) = fit_with_method(&stats.times, &mn, mean_fit.method) {
                mean_rates.push(f.rate);
            }
            if let Some(f) = fit_with_method(&stats.times, &ce, cov_fit.method) {
                cov_rates.push(f.rate);
            }
        }
    } else {
        mean_rates.push(mean_fit.rate);
        cov_rates.push(cov_fit.rate);
    }

    Ok(DecayEstimate {
        mean_ci: percentile_ci(mean_rates),
        cov_ci: percentile_ci(cov_rates),
        mean: mean_fit,
        cov: cov_fit,
        tau0_reference: tau0,
    })
}

/// Binned rows for CSV emission; the CI columns are block-bootstrap
/// bounds on mean_norm per bin (degenerate with a single block).
pub fn binned_rows(stats: &EnsembleStats) -> Vec<BinnedRow> {
    let n_bins = stats.times.len();
    let d = stats.cov_inf.nrows();
    let mn = mean_norms(stats);
    let ce = cov_errors(stats);
    let n_blocks = stats.blocks.len();
    let mut lo = mn.clone();
    let mut hi = mn.clone();
    if n_blocks >= 2 {
        let mut rng = ChaCha8Rng::seed_from_u64(stats.seed ^ 0x62696e_726f7773);
        let mut samples: Vec<Vec<f64>> = vec![Vec::with_capacity(BOOTSTRAP_RESAMPLES); n_bins];
        for _ in 0..BOOTSTRAP_RESAMPLES {
            let idxs: Vec<usize> =
                (0..n_blocks).map(|_| rng.gen_range(0..n_blocks)).collect();
            let (means, _) = aggregate(&stats.blocks, &idxs, d, n_bins);
            for (bin, m) in means.iter().enumerate() {
                samples[bin].push(m.norm());
            }
        }
        for bin in 0..n_bins {
            let (l, h) = percentile_ci(std::mem::take(&mut samples[bin]));
            lo[bin] = l;
            hi[bin] = h;
        }
    }
    (0..n_bins)
        .map(|bin| BinnedRow {
            t: stats.times[bin],
            mean_norm: mn[bin],
            cov_err: ce[bin],
            ci_lo: lo[bin],
            ci_hi: hi[bin],
        })
        .collect()
}
