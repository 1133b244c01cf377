//! Frequency-domain bootstrap.
//!
//! Fourier coefficients are redrawn at `λ_1..λ_N` from circularly-symmetric
//! complex Gaussians whose covariance is the pooled spectral estimate, with
//! the coefficient at `λ_0` set to zero. Each replicate is smoothed with the
//! same window as the sample fit and studentized, giving one draw `t*_U`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::fdata::{FunctionalSample, Grid};
use crate::kernel::WeightKernel;
use crate::linalg::{hermitian_eigen, CMatrix};
use crate::rng::substream;
use crate::spectral::{pooled, smooth_rank_one, smooth_with, DftFrame, SmoothingWindow, SpectralEstimate};
use crate::teststat::{self, TestResult};

/// Relative Hermitian defect tolerated before a slice is rejected.
const HERMITIAN_TOL: f64 = 1e-10;

pub const DEFAULT_REPLICATES: usize = 1000;

/// How each replicate is studentized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Studentization {
    /// `μ̂*₀`, `θ̂*₀` from the replicate's own pooled estimate.
    #[default]
    Full,
    /// Reuse the sample-level `μ̂₀`, `θ̂₀` (the `t⁺` variant).
    Plugin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BootstrapPlan {
    pub replicates: usize,
    pub master_seed: u64,
    /// Requested parallelism, `0` = automatic. Never affects results.
    pub workers: usize,
    pub studentization: Studentization,
    pub wrap_frequencies: bool,
}

impl BootstrapPlan {
    pub fn new(replicates: usize, master_seed: u64) -> Self {
        Self {
            replicates,
            master_seed,
            workers: 0,
            studentization: Studentization::Full,
            wrap_frequencies: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::Contract("at least one bootstrap replicate is required".into()));
        }
        Ok(())
    }
}

/// Sampling factor `L_t` with `L_t L_tᴴ = Σ̂_{λ_t}` (negative eigenvalues clamped).
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyFactor {
    pub frequency_index: usize,
    pub factor: CMatrix,
}

/// Factor of a single Hermitian slice via its clamped eigendecomposition.
pub fn factorize_slice(slice: &CMatrix, frequency_index: usize) -> Result<FrequencyFactor> {
    let scale = slice.max_abs();
    if slice.hermitian_defect() > HERMITIAN_TOL * scale {
        return Err(Error::InvalidEstimate(format!(
            "slice at frequency index {frequency_index} is not Hermitian"
        )));
    }
    let n = slice.dim();
    if scale == 0.0 {
        return Ok(FrequencyFactor { frequency_index, factor: CMatrix::zeros(n) });
    }
    let eig = hermitian_eigen(slice);
    let mut factor = eig.vectors;
    for (col, &lambda) in eig.values.iter().enumerate() {
        let root = libm::sqrt(lambda.max(0.0));
        for i in 0..n {
            factor[(i, col)] *= root;
        }
    }
    Ok(FrequencyFactor { frequency_index, factor })
}

/// Factors of the pooled estimate at `t = 1..=N`.
pub fn factorize(pool: &SpectralEstimate) -> Result<Vec<FrequencyFactor>> {
    (1..=pool.n_freq()).map(|t| factorize_slice(pool.slice(t), t)).collect()
}

/// `J* = L Z` with `Z` standard circularly-symmetric complex Gaussian
/// (`E[ZZᴴ] = I`, `E[ZZᵀ] = 0`).
pub fn draw_coefficients<R: Rng + ?Sized>(factor: &FrequencyFactor, rng: &mut R) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); factor.factor.dim()];
    draw_into(factor, rng, &mut out);
    out
}

fn draw_into<R: Rng + ?Sized>(factor: &FrequencyFactor, rng: &mut R, out: &mut [Complex64]) {
    let n = factor.factor.dim();
    let z: Vec<Complex64> = (0..n)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
        })
        .collect();
    let l = factor.factor.as_slice();
    for (i, o) in out.iter_mut().enumerate() {
        *o = l[i * n..(i + 1) * n].iter().zip(&z).map(|(a, b)| a * b).sum();
    }
}

/// One bootstrap draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Replicate {
    pub t_star: f64,
    pub u_star: f64,
    pub mu0_star: f64,
    pub theta0_star: f64,
}

/// Read-only state shared by all replicates of one test.
#[derive(Debug, Clone)]
pub struct BootstrapContext {
    window: SmoothingWindow,
    grid: Grid,
    factors: Vec<FrequencyFactor>,
    mu0: f64,
    theta0: f64,
    studentization: Studentization,
}

impl BootstrapContext {
    /// Factorizes `pool` once; the sample-level `μ̂₀`, `θ̂₀` are computed from
    /// it as well.
    pub fn new(pool: &SpectralEstimate, window: &SmoothingWindow, studentization: Studentization) -> Result<Self> {
        if window.len() != pool.len() || window.bandwidth() != pool.bandwidth() {
            return Err(Error::Incompatible("window does not match the pooled estimate".into()));
        }
        let mu0 = teststat::mu0_hat(pool, pool.kernel());
        let theta0 = teststat::theta0_hat(pool, pool.kernel())?;
        Ok(Self {
            window: window.clone(),
            grid: pool.grid().clone(),
            factors: factorize(pool)?,
            mu0,
            theta0,
            studentization,
        })
    }

    pub fn factors(&self) -> &[FrequencyFactor] {
        &self.factors
    }

    pub fn studentization(&self) -> Studentization {
        self.studentization
    }

    fn kernel(&self) -> &WeightKernel {
        self.window.kernel()
    }

    /// Pair of replicate estimates `(f̂*_X, f̂*_Y)`.
    pub fn draw_estimates<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(SpectralEstimate, SpectralEstimate)> {
        let k = self.grid.len();
        let rows = self.window.n_freq() + 1;
        let draw = |rng: &mut R| {
            let mut coefs = vec![Complex64::new(0.0, 0.0); rows * k];
            for f in &self.factors {
                let t = f.frequency_index;
                draw_into(f, rng, &mut coefs[t * k..(t + 1) * k]);
            }
            coefs
        };
        let jx = draw(rng);
        let jy = draw(rng);
        let fx = SpectralEstimate::from_slices(&self.window, self.grid.clone(), smooth_rank_one(&jx, k, &self.window))?;
        let fy = SpectralEstimate::from_slices(&self.window, self.grid.clone(), smooth_rank_one(&jy, k, &self.window))?;
        Ok((fx, fy))
    }

    fn try_replicate<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Replicate> {
        let k = self.grid.len();
        let rows = self.window.n_freq() + 1;
        let mut coefs = vec![Complex64::new(0.0, 0.0); rows * k];
        let mut draw = |rng: &mut R, out: &mut PackedPeriodograms| {
            for f in &self.factors {
                let t = f.frequency_index;
                draw_into(f, rng, &mut coefs[t * k..(t + 1) * k]);
            }
            out.fill(&coefs);
        };
        let mut px = PackedPeriodograms::new(k, rows);
        let mut py = PackedPeriodograms::new(k, rows);
        draw(rng, &mut px);
        draw(rng, &mut py);
        let stats = px.smoothed_summaries(&py, &self.window);

        let len = self.window.len();
        let b = self.window.bandwidth();
        let u_star = 2.0 * core::f64::consts::PI / len as f64 * teststat::symmetric_sum(stats.iter().map(|s| s.dist));
        let (mu0_star, theta0_star) = match self.studentization {
            Studentization::Full => {
                let traces: Vec<f64> = stats.iter().map(|s| s.pool_trace).collect();
                let norms: Vec<f64> = stats.iter().map(|s| s.pool_norm).collect();
                (
                    teststat::mu0_from_traces(&traces, len, self.kernel()),
                    teststat::theta0_from_norms(&norms, len, self.kernel())?,
                )
            }
            Studentization::Plugin => (self.mu0, self.theta0),
        };
        let t_star = teststat::studentize(u_star, mu0_star, theta0_star, b, len)?;
        Ok(Replicate { t_star, u_star, mu0_star, theta0_star })
    }

    /// Replicate computed from full slice matrices; reference for the packed path.
    pub fn replicate_reference<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Replicate> {
        let (fx, fy) = self.draw_estimates(rng)?;
        let len = self.window.len();
        let u_star = teststat::u_statistic(&fx, &fy)?;
        let (mu0_star, theta0_star) = match self.studentization {
            Studentization::Full => {
                let pool = pooled(&fx, &fy)?;
                (teststat::mu0_hat(&pool, self.kernel()), teststat::theta0_hat(&pool, self.kernel())?)
            }
            Studentization::Plugin => (self.mu0, self.theta0),
        };
        let t_star = teststat::studentize(u_star, mu0_star, theta0_star, self.window.bandwidth(), len)?;
        Ok(Replicate { t_star, u_star, mu0_star, theta0_star })
    }

    /// One replicate; a degenerate draw is redrawn once from the same stream
    /// before the error is surfaced.
    pub fn replicate<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Replicate> {
        match self.try_replicate(rng) {
            Err(Error::Degenerate(_)) => self.try_replicate(rng),
            other => other,
        }
    }

    /// Replicate `index` under `master_seed`, independent of scheduling.
    pub fn replicate_indexed(&self, master_seed: u64, index: u64) -> Result<Replicate> {
        self.replicate(&mut substream(master_seed, index))
    }
}

/// Rank-one periodograms `J Jᴴ` at `t = 0..=N`, upper triangle only, with
/// real and imaginary parts split so the smoothing loop is a plain axpy.
struct PackedPeriodograms {
    k: usize,
    packed: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

/// Per-frequency quantities a replicate needs.
struct FrequencySummary {
    /// `‖f̂*_X - f̂*_Y‖²_HS`
    dist: f64,
    /// `k^{-1} trace` of the pooled replicate estimate
    pool_trace: f64,
    /// `‖½f̂*_X + ½f̂*_Y‖²_HS`
    pool_norm: f64,
}

impl PackedPeriodograms {
    fn new(k: usize, rows: usize) -> Self {
        let packed = k * (k + 1) / 2;
        Self { k, packed, re: vec![0.0; rows * packed], im: vec![0.0; rows * packed] }
    }

    fn fill(&mut self, coefs: &[Complex64]) {
        let k = self.k;
        for (m, j) in coefs.chunks_exact(k).enumerate() {
            let mut idx = m * self.packed;
            for i in 0..k {
                for jj in i..k {
                    let p = j[i] * j[jj].conj();
                    self.re[idx] = p.re;
                    self.im[idx] = p.im;
                    idx += 1;
                }
            }
        }
    }

    fn smoothed_summaries(&self, other: &Self, window: &SmoothingWindow) -> Vec<FrequencySummary> {
        let (k, p) = (self.k, self.packed);
        let mut xr = vec![0.0; p];
        let mut xi = vec![0.0; p];
        let mut yr = vec![0.0; p];
        let mut yi = vec![0.0; p];
        // off-diagonal entries stand for themselves and their mirror image
        let mut mult = vec![2.0; p];
        let mut diag = Vec::with_capacity(k);
        let mut idx = 0;
        for i in 0..k {
            mult[idx] = 1.0;
            diag.push(idx);
            idx += k - i;
        }
        let k2 = (k * k) as f64;
        (0..=window.n_freq())
            .map(|u| {
                xr.fill(0.0);
                xi.fill(0.0);
                yr.fill(0.0);
                yi.fill(0.0);
                for &(m, pos, neg) in window.taps(u) {
                    let (s, d) = (pos + neg, pos - neg);
                    let r = m * p..(m + 1) * p;
                    axpy(&mut xr, s, &self.re[r.clone()]);
                    axpy(&mut xi, d, &self.im[r.clone()]);
                    axpy(&mut yr, s, &other.re[r.clone()]);
                    axpy(&mut yi, d, &other.im[r]);
                }
                let mut dist = 0.0;
                let mut pool_norm = 0.0;
                for q in 0..p {
                    let (dr, di) = (xr[q] - yr[q], xi[q] - yi[q]);
                    let (sr, si) = (xr[q] + yr[q], xi[q] + yi[q]);
                    dist += mult[q] * (dr * dr + di * di);
                    pool_norm += mult[q] * (sr * sr + si * si);
                }
                let trace: f64 = diag.iter().map(|&q| xr[q] + yr[q]).sum();
                FrequencySummary { dist: dist / k2, pool_trace: 0.5 * trace / k as f64, pool_norm: 0.25 * pool_norm / k2 }
            })
            .collect()
    }
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// All replicate draws of one test, in replicate-index order.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapDistribution {
    pub t_star: Vec<f64>,
    pub u_star: Vec<f64>,
    pub mu0_star: Vec<f64>,
    pub theta0_star: Vec<f64>,
    sorted: Vec<f64>,
}

impl BootstrapDistribution {
    pub fn from_replicates(reps: &[Replicate]) -> Self {
        let t_star: Vec<f64> = reps.iter().map(|r| r.t_star).collect();
        let mut sorted = t_star.clone();
        sorted.sort_by(f64::total_cmp);
        Self {
            t_star,
            u_star: reps.iter().map(|r| r.u_star).collect(),
            mu0_star: reps.iter().map(|r| r.mu0_star).collect(),
            theta0_star: reps.iter().map(|r| r.theta0_star).collect(),
            sorted,
        }
    }

    pub fn len(&self) -> usize {
        self.t_star.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t_star.is_empty()
    }

    /// Ascending copy of `t_star`.
    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// `(1 + #{t* >= t}) / (B + 1)`.
    pub fn p_value(&self, t_stat: f64) -> f64 {
        p_value_sorted(&self.sorted, t_stat)
    }
}

/// Monte-Carlo p-value from an ascending array of bootstrap draws.
pub fn p_value_sorted(sorted: &[f64], t_stat: f64) -> f64 {
    let below = sorted.partition_point(|&x| x < t_stat);
    let exceed = sorted.len() - below;
    (1 + exceed) as f64 / (sorted.len() + 1) as f64
}

/// Sample statistic plus the bootstrap context needed to calibrate it.
#[derive(Debug, Clone)]
pub struct PreparedTest {
    pub result: TestResult,
    pub context: BootstrapContext,
    pub fx: SpectralEstimate,
    pub fy: SpectralEstimate,
}

/// Estimates both spectral operators, evaluates `t_U` and factorizes the
/// pooled estimate.
pub fn prepare(
    x: &FunctionalSample,
    y: &FunctionalSample,
    b: f64,
    kernel: &WeightKernel,
    plan: &BootstrapPlan,
) -> Result<PreparedTest> {
    plan.validate()?;
    if !x.is_centered() || !y.is_centered() {
        return Err(Error::Contract("both samples must be centered before testing".into()));
    }
    if x.len() != y.len() {
        return Err(Error::Incompatible(format!("sample lengths {} and {} differ", x.len(), y.len())));
    }
    if x.grid() != y.grid() {
        return Err(Error::Incompatible("samples are observed on different grids".into()));
    }
    let window = SmoothingWindow::new(x.len(), b, kernel, plan.wrap_frequencies)?;
    let fx = smooth_with(&DftFrame::from_sample(x), &window)?;
    let fy = smooth_with(&DftFrame::from_sample(y), &window)?;
    let result = teststat::evaluate(&fx, &fy)?;
    let pool = pooled(&fx, &fy)?;
    let context = BootstrapContext::new(&pool, &window, plan.studentization)?;
    Ok(PreparedTest { result, context, fx, fy })
}

/// Full result of a bootstrap test.
#[derive(Debug, Clone)]
pub struct TestOutcome {
    pub result: TestResult,
    pub distribution: BootstrapDistribution,
}

impl PreparedTest {
    /// Attaches the p-value computed from `replicates`.
    pub fn finish(self, replicates: &[Replicate]) -> TestOutcome {
        let distribution = BootstrapDistribution::from_replicates(replicates);
        let mut result = self.result;
        result.p_value = Some(distribution.p_value(result.t_stat));
        TestOutcome { result, distribution }
    }
}

/// Sequential bootstrap test. Replicate `i` uses substream `i` of
/// `plan.master_seed`, so a parallel driver over the same indices produces
/// identical output.
pub fn run(
    x: &FunctionalSample,
    y: &FunctionalSample,
    b: f64,
    kernel: &WeightKernel,
    plan: &BootstrapPlan,
) -> Result<TestOutcome> {
    let prepared = prepare(x, y, b, kernel, plan)?;
    let reps = (0..plan.replicates as u64)
        .map(|i| prepared.context.replicate_indexed(plan.master_seed, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(prepared.finish(&reps))
}
