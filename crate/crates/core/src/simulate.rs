//! Functional moving-average generators driven by Brownian-bridge
//! innovations:
//!
//! ```text
//! X_t = A₁(ε_{t-1}) + a₂ ε_{t-2} + ε_t
//! Y_t = A₁(e_{t-1}) + e_t
//! ```
//!
//! with `A₁` the integral operator of kernel
//! `ψ(u, v) = exp(-(u² + v²)/2) / (4 ∫₀¹ exp(-t²) dt)`.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::bootstrap::{self, BootstrapPlan, Studentization};
use crate::error::Result;
use crate::fdata::{FunctionalSample, Grid};
use crate::kernel::WeightKernel;
use crate::quadrature::adaptive_simpson;
use crate::rng::{derive_seed, substream};
use crate::spectral::{self, DftFrame};
use crate::teststat;

pub const DEFAULT_GRID_POINTS: usize = 21;
pub const DEFAULT_BASIS: usize = 21;

/// `4 ∫₀¹ exp(-t²) dt`.
pub fn psi_normalizer() -> f64 {
    4.0 * adaptive_simpson(&|t: f64| libm::exp(-t * t), 0.0, 1.0, 1e-13)
}

pub fn psi(u: f64, v: f64, normalizer: f64) -> f64 {
    libm::exp(-(u * u + v * v) / 2.0) / normalizer
}

#[derive(Debug, Clone, PartialEq)]
pub struct FmaModel {
    pub a2: f64,
    pub len: usize,
    grid: Grid,
    psi_matrix: Vec<f64>,
    /// Fourier-basis size for optional smoothing of generated curves.
    pub n_basis: Option<usize>,
}

impl FmaModel {
    pub fn new(a2: f64, len: usize, grid: Grid) -> Self {
        let c = psi_normalizer();
        let pts = grid.points();
        let psi_matrix = pts.iter().flat_map(|&u| pts.iter().map(move |&v| psi(u, v, c))).collect();
        Self { a2, len, grid, psi_matrix, n_basis: Some(DEFAULT_BASIS) }
    }

    /// Default simulation layout: 21 midpoints, 21-function Fourier smoothing.
    pub fn standard(a2: f64, len: usize) -> Self {
        Self::new(a2, len, Grid::midpoints(DEFAULT_GRID_POINTS))
    }

    pub fn with_smoothing(mut self, n_basis: Option<usize>) -> Self {
        self.n_basis = n_basis;
        self
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn k(&self) -> usize {
        self.grid.len()
    }

    /// Row-major `ψ(s_i, s_j)`.
    pub fn psi_matrix(&self) -> &[f64] {
        &self.psi_matrix
    }

    /// `(A₁ x)(s_i) = k^{-1} Σ_j ψ(s_i, s_j) x(s_j)`.
    pub fn apply_a1(&self, curve: &[f64]) -> Vec<f64> {
        let k = self.k();
        let w = 1.0 / k as f64;
        self.psi_matrix.chunks_exact(k).map(|row| w * row.iter().zip(curve).map(|(p, x)| p * x).sum::<f64>()).collect()
    }

    /// Draws `(X, Y)` with independent innovation streams. The MA recursion is
    /// started exactly from `T + 2` (resp. `T + 1`) innovations.
    pub fn gen_pair<R: Rng + ?Sized>(&self, eps_rng: &mut R, e_rng: &mut R) -> Result<(FunctionalSample, FunctionalSample)> {
        let k = self.k();
        let eps: Vec<Vec<f64>> = (0..self.len + 2).map(|_| brownian_bridge(&self.grid, eps_rng)).collect();
        let e: Vec<Vec<f64>> = (0..self.len + 1).map(|_| brownian_bridge(&self.grid, e_rng)).collect();

        let mut xs = Vec::with_capacity(self.len * k);
        let mut ys = Vec::with_capacity(self.len * k);
        for t in 0..self.len {
            // eps[t + 2] is ε_t, eps[t + 1] is ε_{t-1}, eps[t] is ε_{t-2}
            let a1 = self.apply_a1(&eps[t + 1]);
            xs.extend((0..k).map(|j| a1[j] + self.a2 * eps[t][j] + eps[t + 2][j]));
            let a1 = self.apply_a1(&e[t]);
            ys.extend((0..k).map(|j| a1[j] + e[t + 1][j]));
        }
        let mut x = FunctionalSample::new(self.grid.clone(), xs)?;
        let mut y = FunctionalSample::new(self.grid.clone(), ys)?;
        if let Some(n) = self.n_basis {
            x = x.fourier_smooth(n)?;
            y = y.fourier_smooth(n)?;
        }
        Ok((x, y))
    }

    /// Pair for repetition `rep` under `seed`, with disjoint ε and e streams.
    pub fn gen_pair_seeded(&self, seed: u64, rep: u64) -> Result<(FunctionalSample, FunctionalSample)> {
        let rep_seed = derive_seed(seed, rep);
        let mut eps = substream(rep_seed, STREAM_EPS);
        let mut e = substream(rep_seed, STREAM_E);
        self.gen_pair(&mut eps, &mut e)
    }
}

const STREAM_EPS: u64 = 1;
const STREAM_E: u64 = 2;
const LABEL_BOOTSTRAP: u64 = 3;

/// Brownian bridge `W(s) - s W(1)` on the grid from Gaussian increments.
pub fn brownian_bridge<R: Rng + ?Sized>(grid: &Grid, rng: &mut R) -> Vec<f64> {
    let mut w = vec![0.0; grid.len()];
    let mut level = 0.0;
    let mut prev = 0.0;
    for (wj, &s) in w.iter_mut().zip(grid.points()) {
        let z: f64 = rng.sample(StandardNormal);
        level += libm::sqrt(s - prev) * z;
        *wj = level;
        prev = s;
    }
    let z: f64 = rng.sample(StandardNormal);
    let w1 = level + libm::sqrt(1.0 - prev) * z;
    for (wj, &s) in w.iter_mut().zip(grid.points()) {
        *wj -= s * w1;
    }
    w
}

/// One Monte-Carlo repetition: simulate, center, test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepetitionOutcome {
    pub t_stat: f64,
    pub p_value: f64,
}

/// Bootstrap plan of repetition `rep`; its master seed is disjoint from the
/// innovation streams.
pub fn repetition_plan(seed: u64, rep: u64, replicates: usize, studentization: Studentization) -> BootstrapPlan {
    let mut plan = BootstrapPlan::new(replicates, derive_seed(derive_seed(seed, rep), LABEL_BOOTSTRAP));
    plan.studentization = studentization;
    plan
}

/// Simulates repetition `rep` and runs the full bootstrap test on it.
/// Bootstrap replicates use substreams of a seed derived from `(seed, rep)`.
pub fn run_repetition(
    model: &FmaModel,
    b: f64,
    kernel: &WeightKernel,
    replicates: usize,
    studentization: Studentization,
    seed: u64,
    rep: u64,
) -> Result<RepetitionOutcome> {
    let (x, y) = model.gen_pair_seeded(seed, rep)?;
    let plan = repetition_plan(seed, rep, replicates, studentization);
    let outcome = bootstrap::run(&x.center(), &y.center(), b, kernel, &plan)?;
    Ok(RepetitionOutcome {
        t_stat: outcome.result.t_stat,
        p_value: outcome.result.p_value.expect("bootstrap run sets the p-value"),
    })
}

/// Studentized statistic of repetition `rep` without calibration.
pub fn null_statistic(model: &FmaModel, b: f64, kernel: &WeightKernel, seed: u64, rep: u64) -> Result<f64> {
    let (x, y) = model.gen_pair_seeded(seed, rep)?;
    let fx = spectral::smooth(&DftFrame::from_sample(&x.center()), b, kernel)?;
    let fy = spectral::smooth(&DftFrame::from_sample(&y.center()), b, kernel)?;
    Ok(teststat::evaluate(&fx, &fy)?.t_stat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn normalizer_value() {
        // 4·(√π/2)·erf(1)
        let closed = 2.0 * libm::sqrt(core::f64::consts::PI) * libm::erf(1.0);
        assert_abs_diff_eq!(psi_normalizer(), closed, epsilon = 1e-10);
        assert_abs_diff_eq!(psi_normalizer(), 2.98730, epsilon = 1e-5);
    }

    #[test]
    fn psi_matrix_symmetric_positive() {
        let m = FmaModel::standard(0.0, 10);
        let k = m.k();
        for i in 0..k {
            for j in 0..k {
                assert_eq!(m.psi_matrix()[i * k + j], m.psi_matrix()[j * k + i]);
                assert!(m.psi_matrix()[i * k + j] > 0.0);
            }
        }
    }

    #[test]
    fn a1_linear_and_zero() {
        let m = FmaModel::standard(0.0, 10);
        let zero = vec![0.0; 21];
        assert!(m.apply_a1(&zero).iter().all(|&v| v == 0.0));
        let u: Vec<f64> = (0..21).map(|i| i as f64 * 0.25 - 1.0).collect();
        let v: Vec<f64> = (0..21).map(|i| libm::sin(i as f64)).collect();
        let combo: Vec<f64> = u.iter().zip(&v).map(|(a, b)| 2.0 * a - 0.5 * b).collect();
        let lhs = m.apply_a1(&combo);
        let (au, av) = (m.apply_a1(&u), m.apply_a1(&v));
        for i in 0..21 {
            assert_abs_diff_eq!(lhs[i], 2.0 * au[i] - 0.5 * av[i], epsilon = 1e-14);
        }
    }

    #[test]
    fn a1_of_constant_matches_quadrature() {
        let m = FmaModel::standard(0.0, 10);
        let c = psi_normalizer();
        let out = m.apply_a1(&[1.0; 21]);
        for (i, &s) in m.grid().points().iter().enumerate() {
            let exact = adaptive_simpson(&|v: f64| psi(s, v, c), 0.0, 1.0, 1e-12);
            assert!((out[i] - exact).abs() <= 2e-3);
        }
    }

    #[test]
    fn bridge_is_reproducible() {
        let g = Grid::midpoints(21);
        assert_eq!(brownian_bridge(&g, &mut substream(5, 0)), brownian_bridge(&g, &mut substream(5, 0)));
    }

    #[test]
    fn endpoint_grid_bridge_vanishes_at_ends() {
        let g = Grid::endpoints(11);
        let b = brownian_bridge(&g, &mut substream(5, 1));
        assert_abs_diff_eq!(b[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b[10], 0.0, epsilon = 1e-12);
    }
}
