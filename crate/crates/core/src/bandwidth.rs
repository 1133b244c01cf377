//! Leave-one-out cross-validation of a single smoothing bandwidth, based on
//! the grid-averaged pooled periodogram.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fdata::FunctionalSample;
use crate::kernel::WeightKernel;
use crate::spectral::{fourier_frequency, max_frequency_index, scalar_periodogram};

pub const DEFAULT_GRID_POINTS: usize = 25;
pub const DEFAULT_GRID_MIN: f64 = 0.02;
pub const DEFAULT_GRID_MAX: f64 = 0.6;

/// Scores over a bandwidth grid and the selected minimiser.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CvResult {
    pub b_grid: Vec<f64>,
    pub scores: Vec<f64>,
    pub b_cv: f64,
}

/// `n` log-spaced points from `lo` to `hi`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return alloc::vec![lo];
    }
    let (a, z) = (libm::log(lo), libm::log(hi));
    (0..n).map(|i| libm::exp(a + (z - a) * i as f64 / (n - 1) as f64)).collect()
}

pub fn default_grid() -> Vec<f64> {
    log_grid(DEFAULT_GRID_MIN, DEFAULT_GRID_MAX, DEFAULT_GRID_POINTS)
}

fn check_pair(x: &FunctionalSample, y: &FunctionalSample) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::Incompatible(format!("sample lengths {} and {} differ", x.len(), y.len())));
    }
    if x.grid() != y.grid() {
        return Err(Error::Incompatible("samples are observed on different grids".into()));
    }
    Ok(())
}

/// `Î_T(λ_t) = k^{-2} Σ_{r,s} (½ p̂_X + ½ p̂_Y)(s_r, s_s)` for `t = 0..=N`.
///
/// The double sum collapses to `½|J_{X̄}|² + ½|J_{Ȳ}|²`, where `X̄`, `Ȳ` are
/// the grid-averaged scalar series.
pub fn averaged_periodogram(x: &FunctionalSample, y: &FunctionalSample) -> Result<Vec<f64>> {
    check_pair(x, y)?;
    let px = scalar_periodogram(x);
    let py = scalar_periodogram(y);
    Ok(px.iter().zip(&py).map(|(a, b)| 0.5 * a + 0.5 * b).collect())
}

/// `CV(b)` from a precomputed averaged periodogram (`t = 0..=N`, even in `t`).
///
/// Returns `+∞` when some leave-one-out estimate is not strictly positive.
pub fn cv_score_from_periodogram(periodogram: &[f64], len: usize, b: f64, kernel: &WeightKernel) -> Result<f64> {
    if !(b > 0.0 && b < PI) {
        return Err(Error::Contract(format!("bandwidth must lie in (0, π), got {b}")));
    }
    let n = max_frequency_index(len);
    if periodogram.len() != n + 1 {
        return Err(Error::Incompatible(format!("expected {} periodogram ordinates", n + 1)));
    }
    if n == 0 {
        return Ok(f64::INFINITY);
    }
    let scale = 1.0 / (len as f64 * b);
    let mut total = 0.0;
    for t in 1..=n as i64 {
        let lt = fourier_frequency(t, len);
        let mut g = 0.0;
        for s in -(n as i64)..=n as i64 {
            if s == t || s == -t {
                continue;
            }
            let w = kernel.eval((lt - fourier_frequency(s, len)) / b);
            if w != 0.0 {
                g += w * periodogram[s.unsigned_abs() as usize];
            }
        }
        g *= scale;
        if !(g > 0.0) {
            return Ok(f64::INFINITY);
        }
        total += libm::log(g) + periodogram[t as usize] / g;
    }
    Ok(total / n as f64)
}

pub fn cv_score(b: f64, x: &FunctionalSample, y: &FunctionalSample, kernel: &WeightKernel) -> Result<f64> {
    let ip = averaged_periodogram(x, y)?;
    cv_score_from_periodogram(&ip, x.len(), b, kernel)
}

/// Scores every grid point and returns the minimiser; ties go to the
/// smaller bandwidth.
pub fn select(x: &FunctionalSample, y: &FunctionalSample, b_grid: &[f64], kernel: &WeightKernel) -> Result<CvResult> {
    if b_grid.is_empty() {
        return Err(Error::Contract("bandwidth grid is empty".into()));
    }
    if b_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Contract("bandwidth grid must be strictly ascending".into()));
    }
    let ip = averaged_periodogram(x, y)?;
    let scores = b_grid
        .iter()
        .map(|&b| cv_score_from_periodogram(&ip, x.len(), b, kernel))
        .collect::<Result<Vec<_>>>()?;
    let best = first_finite_argmin(&scores).ok_or(Error::NoValidBandwidth)?;
    Ok(CvResult { b_grid: b_grid.to_vec(), scores, b_cv: b_grid[best] })
}

/// Index of the smallest finite score, earliest on ties.
fn first_finite_argmin(scores: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &s) in scores.iter().enumerate() {
        if s.is_finite() && best.map_or(true, |j| s < scores[j]) {
            best = Some(i);
        }
    }
    best
}
