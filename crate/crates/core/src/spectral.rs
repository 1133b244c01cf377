//! Finite Fourier transforms, periodogram kernels and kernel-smoothed
//! spectral density operator estimates on the grid.
//!
//! Only the non-negative Fourier frequencies `λ_t = 2πt/T`, `t = 0..=N` with
//! `N = ⌊(T-1)/2⌋`, are stored. Quantities at `-λ_t` are the complex
//! conjugates of those at `λ_t`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fdata::{FunctionalSample, Grid};
use crate::fft::FftPlan;
use crate::kernel::WeightKernel;
use crate::linalg::CMatrix;

/// `N = ⌊(T-1)/2⌋`.
pub fn max_frequency_index(len: usize) -> usize {
    (len.saturating_sub(1)) / 2
}

/// `λ_t = 2πt/T`.
pub fn fourier_frequency(t: i64, len: usize) -> f64 {
    2.0 * PI * t as f64 / len as f64
}

/// `J_{λ_t}(s_j)` for `t = 0..=N` and every grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct DftFrame {
    len: usize,
    n_freq: usize,
    grid: Grid,
    coefficients: Vec<Complex64>,
}

impl DftFrame {
    /// `J_{λ_t}(s_j) = (2πT)^{-1/2} Σ_{u=1}^{T} X_u(s_j) e^{-iuλ_t}`, one FFT per
    /// grid column.
    pub fn from_sample(sample: &FunctionalSample) -> Self {
        let len = sample.len();
        let k = sample.k();
        let n_freq = max_frequency_index(len);
        let plan = FftPlan::new(len);
        let norm = 1.0 / libm::sqrt(2.0 * PI * len as f64);
        let mut coefficients = vec![Complex64::new(0.0, 0.0); (n_freq + 1) * k];
        let mut column = vec![Complex64::new(0.0, 0.0); len];
        for j in 0..k {
            for (u, c) in column.iter_mut().enumerate() {
                *c = Complex64::new(sample.values()[u * k + j], 0.0);
            }
            plan.forward(&mut column);
            // the sum starts at u = 1, hence the extra e^{-iλ_t}
            for t in 0..=n_freq {
                let shift = Complex64::from_polar(norm, -fourier_frequency(t as i64, len));
                coefficients[t * k + j] = column[t] * shift;
            }
        }
        Self { len, n_freq, grid: sample.grid().clone(), coefficients }
    }

    /// Frame from precomputed coefficients laid out as `(N + 1) x k`.
    pub fn from_coefficients(len: usize, grid: Grid, coefficients: Vec<Complex64>) -> Result<Self> {
        let n_freq = max_frequency_index(len);
        if coefficients.len() != (n_freq + 1) * grid.len() {
            return Err(Error::Incompatible(format!(
                "expected {} coefficients, got {}",
                (n_freq + 1) * grid.len(),
                coefficients.len()
            )));
        }
        Ok(Self { len, n_freq, grid, coefficients })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn n_freq(&self) -> usize {
        self.n_freq
    }

    pub fn k(&self) -> usize {
        self.grid.len()
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// `J_{λ_t}` for `0 <= t <= N`.
    pub fn row(&self, t: usize) -> &[Complex64] {
        let k = self.k();
        &self.coefficients[t * k..(t + 1) * k]
    }

    /// `J_{λ_t}(s_j)` for any `-N <= t <= N`.
    pub fn coefficient(&self, t: i64, j: usize) -> Complex64 {
        let z = self.row(t.unsigned_abs() as usize)[j];
        if t < 0 {
            z.conj()
        } else {
            z
        }
    }
}

/// Rank-one periodogram kernel `p̂_{λ_t}(s_i, s_j) = J(s_i) conj(J(s_j))`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodogramKernel {
    pub frequency_index: usize,
    pub values: CMatrix,
}

pub fn periodogram(frame: &DftFrame, t: usize) -> Result<PeriodogramKernel> {
    if t > frame.n_freq() {
        return Err(Error::IndexOutOfRange { index: t, max: frame.n_freq() });
    }
    Ok(PeriodogramKernel { frequency_index: t, values: CMatrix::outer(frame.row(t)) })
}

/// Precomputed smoothing weights `W((λ_u - λ_t)/b) / (bT)`.
///
/// For each target `u = 0..=N` the window holds `(m, w(+m), w(-m))` for every
/// `m = |t|` with a nonzero weight, so the `±t` pair can be applied to one
/// periodogram and its conjugate at once.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothingWindow {
    len: usize,
    n_freq: usize,
    b: f64,
    wrap: bool,
    kernel: WeightKernel,
    taps: Vec<Vec<(usize, f64, f64)>>,
}

impl SmoothingWindow {
    /// Sums over `t = -N..=N` with no periodic wrap unless `wrap` is set.
    pub fn new(len: usize, b: f64, kernel: &WeightKernel, wrap: bool) -> Result<Self> {
        if !(b > 0.0 && b < PI) {
            return Err(Error::Contract(format!("bandwidth must lie in (0, π), got {b}")));
        }
        let n_freq = max_frequency_index(len);
        let n = n_freq as i64;
        let scale = 1.0 / (b * len as f64);
        let weight = |u: i64, t: i64| {
            let mut diff = fourier_frequency(u - t, len);
            if wrap {
                diff = wrap_angle(diff);
            }
            kernel.eval(diff / b) * scale
        };
        let taps = (0..=n)
            .map(|u| {
                (0..=n)
                    .filter_map(|m| {
                        let pos = weight(u, m);
                        let neg = if m == 0 { 0.0 } else { weight(u, -m) };
                        (pos != 0.0 || neg != 0.0).then_some((m as usize, pos, neg))
                    })
                    .collect()
            })
            .collect();
        Ok(Self { len, n_freq, b, wrap, kernel: *kernel, taps })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn n_freq(&self) -> usize {
        self.n_freq
    }

    pub fn bandwidth(&self) -> f64 {
        self.b
    }

    pub fn wraps(&self) -> bool {
        self.wrap
    }

    pub fn kernel(&self) -> &WeightKernel {
        &self.kernel
    }

    /// `(m, w(λ_u - λ_m), w(λ_u + λ_m))` for target `u`.
    pub fn taps(&self, u: usize) -> &[(usize, f64, f64)] {
        &self.taps[u]
    }

    /// Smooths a real, even sequence given at `t = 0..=N`.
    pub fn smooth_scalar(&self, values: &[f64]) -> Vec<f64> {
        self.taps.iter().map(|taps| taps.iter().map(|&(m, p, q)| (p + q) * values[m]).sum()).collect()
    }
}

/// Reduces an angle to `(-π, π]`.
fn wrap_angle(x: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut y = x % two_pi;
    if y > PI {
        y -= two_pi;
    } else if y <= -PI {
        y += two_pi;
    }
    y
}

/// `f̂_{λ_u}(s_i, s_j)` for `u = 0..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEstimate {
    len: usize,
    n_freq: usize,
    b: f64,
    wrap: bool,
    kernel: WeightKernel,
    grid: Grid,
    slices: Vec<CMatrix>,
}

impl SpectralEstimate {
    pub fn from_slices(window: &SmoothingWindow, grid: Grid, slices: Vec<CMatrix>) -> Result<Self> {
        if slices.len() != window.n_freq() + 1 || slices.iter().any(|s| s.dim() != grid.len()) {
            return Err(Error::Incompatible("slice count or size does not match the window".into()));
        }
        Ok(Self {
            len: window.len(),
            n_freq: window.n_freq(),
            b: window.bandwidth(),
            wrap: window.wraps(),
            kernel: *window.kernel(),
            grid,
            slices,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn n_freq(&self) -> usize {
        self.n_freq
    }

    pub fn k(&self) -> usize {
        self.grid.len()
    }

    pub fn bandwidth(&self) -> f64 {
        self.b
    }

    pub fn wraps(&self) -> bool {
        self.wrap
    }

    pub fn kernel(&self) -> &WeightKernel {
        &self.kernel
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Slice at `λ_u`, `0 <= u <= N`. The slice at `-λ_u` is its conjugate.
    pub fn slice(&self, u: usize) -> &CMatrix {
        &self.slices[u]
    }

    pub fn slices(&self) -> &[CMatrix] {
        &self.slices
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { slices: self.slices.iter().map(|s| s.scaled(c)).collect(), ..self.clone() }
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.len != other.len {
            return Err(Error::Incompatible(format!("lengths {} and {}", self.len, other.len)));
        }
        if self.grid != other.grid {
            return Err(Error::Incompatible("grids differ".into()));
        }
        if self.b != other.b {
            return Err(Error::Incompatible(format!("bandwidths {} and {}", self.b, other.b)));
        }
        if self.kernel != other.kernel || self.wrap != other.wrap {
            return Err(Error::Incompatible("smoothing kernels differ".into()));
        }
        Ok(())
    }
}

/// `f̂_{λ_u} = (bT)^{-1} Σ_{t=-N}^{N} W((λ_u - λ_t)/b) p̂_{λ_t}`, no frequency wrap.
pub fn smooth(frame: &DftFrame, b: f64, kernel: &WeightKernel) -> Result<SpectralEstimate> {
    let window = SmoothingWindow::new(frame.len(), b, kernel, false)?;
    smooth_with(frame, &window)
}

pub fn smooth_with(frame: &DftFrame, window: &SmoothingWindow) -> Result<SpectralEstimate> {
    if window.len() != frame.len() {
        return Err(Error::Incompatible(format!(
            "window built for T = {}, frame has T = {}",
            window.len(),
            frame.len()
        )));
    }
    let slices = smooth_rank_one(frame.coefficients(), frame.k(), window);
    SpectralEstimate::from_slices(window, frame.grid().clone(), slices)
}

/// Smooths arbitrary periodogram-like kernels given at `t = 0..=N`.
pub fn smooth_kernels(
    periodograms: &[CMatrix],
    grid: &Grid,
    window: &SmoothingWindow,
) -> Result<SpectralEstimate> {
    if periodograms.len() != window.n_freq() + 1 {
        return Err(Error::Incompatible(format!(
            "expected {} periodogram slices, got {}",
            window.n_freq() + 1,
            periodograms.len()
        )));
    }
    let k = grid.len();
    let slices = (0..=window.n_freq())
        .map(|u| {
            let mut f = CMatrix::zeros(k);
            for &(m, pos, neg) in window.taps(u) {
                let p = &periodograms[m];
                for (out, z) in f.as_mut_slice().iter_mut().zip(p.as_slice()) {
                    *out += Complex64::new((pos + neg) * z.re, (pos - neg) * z.im);
                }
            }
            f
        })
        .collect();
    SpectralEstimate::from_slices(window, grid.clone(), slices)
}

/// Smoothing specialised to rank-one periodograms built from `(N + 1) x k`
/// Fourier coefficients. Fills the upper triangle and mirrors it, so every
/// output slice is exactly Hermitian.
pub fn smooth_rank_one(coefficients: &[Complex64], k: usize, window: &SmoothingWindow) -> Vec<CMatrix> {
    (0..=window.n_freq())
        .map(|u| {
            let mut f = CMatrix::zeros(k);
            let data = f.as_mut_slice();
            for &(m, pos, neg) in window.taps(u) {
                let sum = pos + neg;
                let diff = pos - neg;
                let j_m = &coefficients[m * k..(m + 1) * k];
                for i in 0..k {
                    let a = j_m[i];
                    let row = &mut data[i * k..(i + 1) * k];
                    for (out, bj) in row[i..].iter_mut().zip(&j_m[i..]) {
                        let p = a * bj.conj();
                        out.re += sum * p.re;
                        out.im += diff * p.im;
                    }
                }
            }
            for i in 0..k {
                data[i * k + i].im = 0.0;
                for j in 0..i {
                    data[i * k + j] = data[j * k + i].conj();
                }
            }
            f
        })
        .collect()
}

/// `½ f̂_X + ½ f̂_Y`.
pub fn pooled(fx: &SpectralEstimate, fy: &SpectralEstimate) -> Result<SpectralEstimate> {
    fx.check_compatible(fy)?;
    let slices = fx
        .slices
        .iter()
        .zip(&fy.slices)
        .map(|(a, b)| {
            let data = a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| 0.5 * x + 0.5 * y).collect();
            CMatrix::from_vec(a.dim(), data)
        })
        .collect();
    Ok(SpectralEstimate { slices, ..fx.clone() })
}

/// Discretised Hilbert–Schmidt inner product `k^{-2} Σ_{i,j} a_ij conj(b_ij)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> Result<Complex64> {
    if a.dim() != b.dim() {
        return Err(Error::Incompatible(format!("kernel sizes {} and {}", a.dim(), b.dim())));
    }
    let k = a.dim() as f64;
    let sum: Complex64 = a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x * y.conj()).sum();
    Ok(sum / (k * k))
}

/// `k^{-2} Σ |a_ij|²`.
pub fn hs_norm_sq(a: &CMatrix) -> f64 {
    let k = a.dim() as f64;
    a.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>() / (k * k)
}

/// `k^{-2} Σ |a_ij - b_ij|²`.
pub(crate) fn hs_dist_sq(a: &CMatrix, b: &CMatrix) -> f64 {
    let k = a.dim() as f64;
    a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>() / (k * k)
}

/// Smoothed periodogram of the grid-averaged scalar series
/// `V_t = k^{-1} Σ_j X_t(s_j)`; equals `k^{-2} Σ_{i,j} f̂_λ(s_i, s_j)`.
pub fn integrated_scalar_estimate(
    sample: &FunctionalSample,
    b: f64,
    kernel: &WeightKernel,
) -> Result<Vec<f64>> {
    let window = SmoothingWindow::new(sample.len(), b, kernel, false)?;
    Ok(window.smooth_scalar(&scalar_periodogram(sample)))
}

/// Periodogram `|k^{-1} Σ_j J_{λ_t}(s_j)|²` of the grid-averaged series, `t = 0..=N`.
pub fn scalar_periodogram(sample: &FunctionalSample) -> Vec<f64> {
    let means: Vec<f64> = sample.rows().map(|r| r.iter().sum::<f64>() / r.len() as f64).collect();
    let averaged = FunctionalSample::new(Grid::midpoints(1), means).expect("shape inherited from a valid sample");
    let frame = DftFrame::from_sample(&averaged);
    frame.coefficients().iter().map(|z| z.norm_sqr()).collect()
}
