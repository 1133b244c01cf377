//! The L² distance statistic `U_T`, its studentization and the frequency and
//! grid decompositions used for diagnostics.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::kernel::WeightKernel;
use crate::spectral::{hs_dist_sq, hs_norm_sq, pooled, SpectralEstimate};

/// `θ̂₀` at or below this value is treated as an identically-zero pooled estimate.
pub const DEGENERATE_THETA: f64 = 1e-300;

/// Outcome of the studentized test on one pair of samples.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TestResult {
    pub u_stat: f64,
    pub mu0_hat: f64,
    pub theta0_hat: f64,
    pub t_stat: f64,
    pub p_value: Option<f64>,
    pub b: f64,
    #[cfg_attr(feature = "serde", serde(rename = "T"))]
    pub len: usize,
    pub k: usize,
    /// `Q̂_{T,λ_j}` for `j = 0..=N`.
    pub q_profile: Vec<f64>,
    /// `D̂²(s_r, s_l)`, row-major `k x k`.
    pub d_map: Vec<f64>,
}

impl TestResult {
    /// `D̂²(s_r, s_l)`.
    pub fn d2(&self, r: usize, l: usize) -> f64 {
        self.d_map[r * self.k + l]
    }
}

/// Sum over `t = -N..=N` of a quantity that is even in `t`, given at `t = 0..=N`.
pub(crate) fn symmetric_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut total = 0.0;
    for (t, v) in values.enumerate() {
        total += if t == 0 { v } else { 2.0 * v };
    }
    total
}

/// `U_T = (2π/T) Σ_{t=-N}^{N} ‖f̂_X,λ_t - f̂_Y,λ_t‖²_HS`.
pub fn u_statistic(fx: &SpectralEstimate, fy: &SpectralEstimate) -> Result<f64> {
    fx.check_compatible(fy)?;
    let sum = symmetric_sum(fx.slices().iter().zip(fy.slices()).map(|(a, b)| hs_dist_sq(a, b)));
    Ok(2.0 * PI / fx.len() as f64 * sum)
}

/// `μ̂₀ = π^{-1} [(2π/T) Σ_t trace(f̂_λ_t)²] ∫W²` with `trace = k^{-1} Σ_i f̂(s_i, s_i)`.
pub fn mu0_hat(pool: &SpectralEstimate, kernel: &WeightKernel) -> f64 {
    let k = pool.k() as f64;
    let traces: Vec<f64> = pool.slices().iter().map(|s| s.trace().re / k).collect();
    mu0_from_traces(&traces, pool.len(), kernel)
}

/// `μ̂₀` from normalized traces at `t = 0..=N`.
pub fn mu0_from_traces(traces: &[f64], len: usize, kernel: &WeightKernel) -> f64 {
    let sum = symmetric_sum(traces.iter().map(|tr| tr * tr));
    (2.0 * PI / len as f64) * sum * kernel.c_w2() / PI
}

/// `θ̂₀ = sqrt((4/π²) c_conv (2π/T) Σ_t ‖f̂_λ_t‖⁴_HS)`.
pub fn theta0_hat(pool: &SpectralEstimate, kernel: &WeightKernel) -> Result<f64> {
    let norms: Vec<f64> = pool.slices().iter().map(hs_norm_sq).collect();
    theta0_from_norms(&norms, pool.len(), kernel)
}

/// `θ̂₀` from squared HS norms `‖f̂_λ_t‖²_HS` at `t = 0..=N`.
pub fn theta0_from_norms(norms: &[f64], len: usize, kernel: &WeightKernel) -> Result<f64> {
    let sum = symmetric_sum(norms.iter().map(|h| h * h));
    let theta = libm::sqrt(4.0 / (PI * PI) * kernel.c_conv() * (2.0 * PI / len as f64) * sum);
    if !(theta > DEGENERATE_THETA) {
        return Err(Error::Degenerate(format!("θ̂₀ = {theta:e}; the pooled estimate vanishes")));
    }
    Ok(theta)
}

/// `t_U = (√b T U_T - b^{-1/2} μ̂₀) / θ̂₀`.
pub fn studentize(u: f64, mu0: f64, theta0: f64, b: f64, len: usize) -> Result<f64> {
    if !(theta0 > 0.0) {
        return Err(Error::Degenerate(format!("θ̂₀ = {theta0} is not positive")));
    }
    let sb = libm::sqrt(b);
    Ok((sb * len as f64 * u - mu0 / sb) / theta0)
}

/// `Q̂_j = 2π √b ‖f̂_X,λ_j - f̂_Y,λ_j‖²_HS / θ̂₀` for `j = 0..=N`.
pub fn q_profile(fx: &SpectralEstimate, fy: &SpectralEstimate, theta0: f64) -> Result<Vec<f64>> {
    fx.check_compatible(fy)?;
    if !(theta0 > 0.0) {
        return Err(Error::Degenerate(format!("θ̂₀ = {theta0} is not positive")));
    }
    let c = 2.0 * PI * libm::sqrt(fx.bandwidth()) / theta0;
    Ok(fx.slices().iter().zip(fy.slices()).map(|(a, b)| c * hs_dist_sq(a, b)).collect())
}

/// `D̂²(s_r, s_l) = (2π√b / k²) Σ_{j=-N}^{N} |Δ_j(s_r, s_l)|² / θ̂₀`, row-major.
///
/// Summing the map over all grid cells gives the full-frequency sum of `Q̂`.
pub fn d_map(fx: &SpectralEstimate, fy: &SpectralEstimate, theta0: f64) -> Result<Vec<f64>> {
    fx.check_compatible(fy)?;
    if !(theta0 > 0.0) {
        return Err(Error::Degenerate(format!("θ̂₀ = {theta0} is not positive")));
    }
    let k = fx.k();
    let c = 2.0 * PI * libm::sqrt(fx.bandwidth()) / ((k * k) as f64 * theta0);
    let mut map = alloc::vec![0.0; k * k];
    for (t, (a, b)) in fx.slices().iter().zip(fy.slices()).enumerate() {
        let mult = if t == 0 { 1.0 } else { 2.0 };
        for (m, (x, y)) in map.iter_mut().zip(a.as_slice().iter().zip(b.as_slice())) {
            *m += mult * (x - y).norm_sqr();
        }
    }
    for m in &mut map {
        *m *= c;
    }
    Ok(map)
}

/// Studentized statistic with both diagnostic decompositions; `p_value` is
/// left empty for the calibration step.
pub fn evaluate(fx: &SpectralEstimate, fy: &SpectralEstimate) -> Result<TestResult> {
    let pool = pooled(fx, fy)?;
    let kernel = fx.kernel();
    let u = u_statistic(fx, fy)?;
    let mu0 = mu0_hat(&pool, kernel);
    let theta0 = theta0_hat(&pool, kernel)?;
    let t = studentize(u, mu0, theta0, fx.bandwidth(), fx.len())?;
    Ok(TestResult {
        u_stat: u,
        mu0_hat: mu0,
        theta0_hat: theta0,
        t_stat: t,
        p_value: None,
        b: fx.bandwidth(),
        len: fx.len(),
        k: fx.k(),
        q_profile: q_profile(fx, fy, theta0)?,
        d_map: d_map(fx, fy, theta0)?,
    })
}

/// Upper-tail standard Gaussian probability `1 - Φ(t)`, the asymptotic
/// calibration of `t_U`.
pub fn gaussian_p_value(t: f64) -> f64 {
    0.5 * libm::erfc(t / core::f64::consts::SQRT_2)
}
