//! Propagation of e^{-t(M - mu0 I)} and the fitted decay rate.
//!
//! The propagator over each grid increment is a scaled-and-squared
//! matrix exponential; increments that agree to a relative 1e-9 share
//! one exponential so a uniform grid costs a single expm. What is
//! measured is the distance to the ground-state line, not to zero: the
//! projection coefficient c_u is split off first and the decay of
//! ||v(t) - c_u u0|| is fitted on a log scale over the largest
//! tail-anchored window with the best linear fit.

use serde::{Deserialize, Serialize};

use quadgap_core::ground_state::{projection_coefficient, GroundState};
use quadgap_core::linalg::expm;
use quadgap_core::{C64, CMat, CVec};

use crate::hermite::u0_expansion;
use crate::quantize::QuantizedOperator;
use crate::GalerkinError;

/// Norm trajectory above this aborts as overflow.
const OVERFLOW_CAP: f64 = 1e100;

/// Norms below this are clamped before taking logs in the fit.
const LOG_FLOOR: f64 = 1e-300;

/// Decay record of one initial state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SemigroupDecay {
    /// ||v(t_i) - c_u u0|| on the requested grid.
    pub norms: Vec<f64>,
    /// Fitted exponential rate (negated slope of log norms).
    pub fitted_rate: f64,
    /// Index window [start, end] the rate was fitted on.
    pub window: (usize, usize),
    /// Coefficient of determination of that fit.
    pub r2: f64,
    /// Projection of the initial state on the ground state.
    pub c_u: C64,
}

/// Evolve `u_init` under e^{-t(M - mu0 I)} and fit the decay rate of the
/// component orthogonal to the ground state.
///
/// `t_grid` must be strictly increasing and nonnegative. The ground
/// state is expanded on the operator's own truncation; its projection
/// coefficient is frozen at t = 0 (the semigroup preserves it, so
/// re-projecting along the way would only launder numerical drift).
pub fn semigroup_decay(
    op: &QuantizedOperator,
    gs: &GroundState,
    u_init: &CVec,
    t_grid: &[f64],
) -> Result<SemigroupDecay, GalerkinError> {
    assert!(!t_grid.is_empty(), "need at least one time");
    assert!(t_grid[0] >= 0.0, "times must be nonnegative");
    assert!(
        t_grid.windows(2).all(|w| w[0] < w[1]),
        "times must be strictly increasing"
    );
    let dim = op.dim();
    assert_eq!(u_init.len(), dim, "initial state must match the basis");

    let u0 = u0_expansion(&gs.a, op.truncation())?.coeffs;
    let c_u = projection_coefficient(u_init, &u0)
        .expect("u0 expansion lives on the operator's own basis");

    let mu0 = gs.mu0;
    let m = op.dense();
    let gen = {
        let mut g = -&m;
        for i in 0..dim {
            g[(i, i)] += mu0;
        }
        g
    };

    // cache of propagators keyed by the increment, snapped to 1e-9 rel
    let mut known: Vec<(f64, CMat)> = Vec::new();
    let mut propagator = |dt: f64| -> CMat {
        for (seen, p) in &known {
            if (dt - seen).abs() <= 1e-9 * seen.abs() {
                return p.clone();
            }
        }
        let p = expm(&(&gen * C64::new(dt, 0.0)));
        known.push((dt, p.clone()));
        p
    };

    let mut v = u_init.clone();
    let mut prev_t = 0.0;
    let mut norms = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let dt = t - prev_t;
        if dt > 0.0 {
            v = propagator(dt) * &v;
        }
        prev_t = t;
        let w = &v - &u0 * c_u;
        let norm = w.norm();
        if !norm.is_finite() || norm > OVERFLOW_CAP {
            return Err(GalerkinError::Overflow { norm });
        }
        norms.push(norm);
    }

    let (fitted_rate, window, r2) = fit_log_window(t_grid, &norms);
    Ok(SemigroupDecay { norms, fitted_rate, window, r2, c_u })
}

/// Least-squares slope of log(norms) over the largest linear window.
///
/// The asymptotic rate lives at the tail of the trajectory, so every
/// candidate window ends at the last sample and extends backward; the
/// start index is chosen by maximal R^2, with ties within 1e-6 resolved
/// toward the longest window. Anchoring at the tail is what lets the fit
/// step over an initial transient yet keep the full trend when the decay
/// carries a persistent oscillation: a crest-to-trough stretch of a
/// beating norm can out-score the trend line on R^2, but only over
/// windows that forget the tail. Windows shorter than a fifth of the
/// grid (or five points) are not considered. Returns (rate, window, r2)
/// with rate = -slope.
fn fit_log_window(ts: &[f64], norms: &[f64]) -> (f64, (usize, usize), f64) {
    let n = ts.len();
    if n < 2 || norms.iter().all(|&v| v <= 1e-150) {
        return (0.0, (0, n.saturating_sub(1)), 0.0);
    }
    let ys: Vec<f64> = norms.iter().map(|&v| v.max(LOG_FLOOR).ln()).collect();

    // prefix sums make each window O(1)
    let mut st = vec![0.0; n + 1];
    let mut stt = vec![0.0; n + 1];
    let mut sy = vec![0.0; n + 1];
    let mut syy = vec![0.0; n + 1];
    let mut sty = vec![0.0; n + 1];
    for i in 0..n {
        st[i + 1] = st[i] + ts[i];
        stt[i + 1] = stt[i] + ts[i] * ts[i];
        sy[i + 1] = sy[i] + ys[i];
        syy[i + 1] = syy[i] + ys[i] * ys[i];
        sty[i + 1] = sty[i] + ts[i] * ys[i];
    }
    let stats = |a: usize, b: usize| -> (f64, f64) {
        // slope and r2 on indices a..=b
        let k = (b - a + 1) as f64;
        let (s1, s2) = (st[b + 1] - st[a], stt[b + 1] - stt[a]);
        let (y1, y2) = (sy[b + 1] - sy[a], syy[b + 1] - syy[a]);
        let ty = sty[b + 1] - sty[a];
        let den = k * s2 - s1 * s1;
        if den.abs() < 1e-30 {
            return (0.0, 0.0);
        }
        let slope = (k * ty - s1 * y1) / den;
        let sst = y2 - y1 * y1 / k;
        if sst < 1e-30 {
            // flat data fits any horizontal line perfectly
            return (slope, 1.0);
        }
        let ssr = sst - slope * slope * den / k;
        (slope, 1.0 - (ssr / sst).max(0.0))
    };

    let min_len = (n / 5).max(5).min(n);
    let last = n - 1;
    let mut best_r2 = f64::NEG_INFINITY;
    for a in 0..=(n - min_len) {
        let (_, r2) = stats(a, last);
        if r2 > best_r2 {
            best_r2 = r2;
        }
    }
    let mut chosen = (0usize, last);
    for a in 0..=(n - min_len) {
        let (_, r2) = stats(a, last);
        if r2 >= best_r2 - 1e-6 {
            chosen = (a, last);
            break;
        }
    }
    let (slope, r2) = stats(chosen.0, chosen.1);
    (-slope, chosen, r2)
}
