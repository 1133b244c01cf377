//! Functional samples: curves observed on a common grid in `[0, 1]`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};

/// Minimum number of curves accepted in a sample.
pub const MIN_CURVES: usize = 4;

/// Placement rule for an equidistant grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum GridPolicy {
    /// `s_j = (2j - 1) / (2k)`.
    #[default]
    Midpoint,
    /// `s_j = (j - 1) / (k - 1)`, both endpoints included.
    Endpoint,
}

/// Ordered evaluation points `s_1 < ... < s_k` in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Grid {
    points: Vec<f64>,
}

impl Grid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidGrid("grid has no points".into()));
        }
        for (j, &s) in points.iter().enumerate() {
            if !(0.0..=1.0).contains(&s) {
                return Err(Error::InvalidGrid(format!("point {s} at index {j} outside [0, 1]")));
            }
            if j > 0 && points[j - 1] >= s {
                return Err(Error::InvalidGrid(format!(
                    "points not strictly increasing at index {j}"
                )));
            }
        }
        Ok(Self { points })
    }

    pub fn midpoints(k: usize) -> Self {
        let points = (1..=k).map(|j| (2 * j - 1) as f64 / (2 * k) as f64).collect();
        Self { points }
    }

    pub fn endpoints(k: usize) -> Self {
        let points = if k == 1 {
            vec![0.0]
        } else {
            (0..k).map(|j| j as f64 / (k - 1) as f64).collect()
        };
        Self { points }
    }

    pub fn equidistant(k: usize, policy: GridPolicy) -> Self {
        match policy {
            GridPolicy::Midpoint => Self::midpoints(k),
            GridPolicy::Endpoint => Self::endpoints(k),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }
}

/// `T` curves evaluated on a shared grid; row `t` is the curve at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalSample {
    grid: Grid,
    values: Vec<f64>,
    len: usize,
    centered: bool,
}

impl FunctionalSample {
    /// Builds a sample from row-major values (`len * grid.len()` entries).
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        let k = grid.len();
        if values.len() % k != 0 {
            return Err(Error::RaggedRow {
                row: values.len() / k + 1,
                expected: k,
                found: values.len() % k,
            });
        }
        let len = values.len() / k;
        if len < MIN_CURVES {
            return Err(Error::InputSize { rows: len, min: MIN_CURVES });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: pos / k + 1, col: pos % k + 1 });
        }
        Ok(Self { grid, values, len, centered: false })
    }

    pub fn from_rows(grid: Grid, rows: &[Vec<f64>]) -> Result<Self> {
        let k = grid.len();
        let mut values = Vec::with_capacity(rows.len() * k);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(Error::RaggedRow { row: i + 1, expected: k, found: row.len() });
            }
            values.extend_from_slice(row);
        }
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Number of curves `T`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Number of grid points `k`.
    pub fn k(&self) -> usize {
        self.grid.len()
    }

    pub fn is_centered(&self) -> bool {
        self.centered
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, t: usize) -> &[f64] {
        let k = self.k();
        &self.values[t * k..(t + 1) * k]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.k())
    }

    /// Multiplies every value by `c`. Keeps the centering flag.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
            len: self.len,
            centered: self.centered,
        }
    }

    /// Subtracts the sample mean function from every curve.
    pub fn center(&self) -> Self {
        if self.centered {
            return self.clone();
        }
        let k = self.k();
        let mut mean = vec![0.0; k];
        for row in self.rows() {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= self.len as f64;
        }
        let values = self
            .rows()
            .flat_map(|row| row.iter().zip(&mean).map(|(v, m)| v - m))
            .collect();
        Self { grid: self.grid.clone(), values, len: self.len, centered: true }
    }

    /// Replaces each curve by its least-squares projection onto the first
    /// `n_basis` Fourier functions, evaluated on the same grid.
    pub fn fourier_smooth(&self, n_basis: usize) -> Result<Self> {
        let projection = BasisProjection::fit(self, n_basis)?;
        let basis = fourier_design(self.grid.points(), n_basis);
        let k = self.k();
        let mut values = vec![0.0; self.values.len()];
        for (t, out) in values.chunks_exact_mut(k).enumerate() {
            let coef = projection.row(t);
            for (j, o) in out.iter_mut().enumerate() {
                *o = (0..n_basis).map(|m| basis[j * n_basis + m] * coef[m]).sum();
            }
        }
        Ok(Self { grid: self.grid.clone(), values, len: self.len, centered: self.centered })
    }
}

/// Fourier-basis coefficients of every curve of a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisProjection {
    n_basis: usize,
    coefficients: Vec<f64>,
}

impl BasisProjection {
    /// Least-squares fit with the Riemann weight `1/k`. On an equidistant
    /// midpoint grid the Gram matrix is the identity and this is the plain
    /// quadrature projection.
    pub fn fit(sample: &FunctionalSample, n_basis: usize) -> Result<Self> {
        if n_basis % 2 == 0 {
            return Err(Error::Contract(format!("n_basis must be odd, got {n_basis}")));
        }
        let k = sample.k();
        if n_basis > k {
            return Err(Error::IllPosedProjection { n_basis, k });
        }
        let phi = fourier_design(sample.grid().points(), n_basis);
        let w = 1.0 / k as f64;

        let mut gram = vec![0.0; n_basis * n_basis];
        for a in 0..n_basis {
            for c in 0..n_basis {
                gram[a * n_basis + c] =
                    w * (0..k).map(|j| phi[j * n_basis + a] * phi[j * n_basis + c]).sum::<f64>();
            }
        }
        let chol = cholesky(&gram, n_basis).ok_or(Error::IllPosedProjection { n_basis, k })?;

        let mut coefficients = Vec::with_capacity(sample.len() * n_basis);
        let mut rhs = vec![0.0; n_basis];
        for row in sample.rows() {
            for (a, r) in rhs.iter_mut().enumerate() {
                *r = w * (0..k).map(|j| phi[j * n_basis + a] * row[j]).sum::<f64>();
            }
            coefficients.extend(cholesky_solve(&chol, n_basis, &rhs));
        }
        Ok(Self { n_basis, coefficients })
    }

    pub fn n_basis(&self) -> usize {
        self.n_basis
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn row(&self, t: usize) -> &[f64] {
        &self.coefficients[t * self.n_basis..(t + 1) * self.n_basis]
    }
}

/// Row-major `k x n_basis` matrix of `{1, √2 cos(2πms), √2 sin(2πms)}`.
pub fn fourier_design(points: &[f64], n_basis: usize) -> Vec<f64> {
    let mut phi = vec![0.0; points.len() * n_basis];
    for (j, &s) in points.iter().enumerate() {
        let row = &mut phi[j * n_basis..(j + 1) * n_basis];
        if let Some(first) = row.first_mut() {
            *first = 1.0;
        }
        for m in 1..=(n_basis.saturating_sub(1) / 2) {
            let arg = 2.0 * PI * m as f64 * s;
            row[2 * m - 1] = core::f64::consts::SQRT_2 * libm::cos(arg);
            row[2 * m] = core::f64::consts::SQRT_2 * libm::sin(arg);
        }
    }
    phi
}

fn cholesky(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    let scale = (0..n).map(|i| a[i * n + i].abs()).fold(0.0, f64::max);
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[i * n + j];
            for p in 0..j {
                sum -= l[i * n + p] * l[j * n + p];
            }
            if i == j {
                if sum <= 1e-12 * scale {
                    return None;
                }
                l[i * n + i] = libm::sqrt(sum);
            } else {
                l[i * n + j] = sum / l[j * n + j];
            }
        }
    }
    Some(l)
}

fn cholesky_solve(l: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; n];
    for i in 0..n {
        let s: f64 = (0..i).map(|p| l[i * n + p] * y[p]).sum();
        y[i] = (b[i] - s) / l[i * n + i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|p| l[p * n + i] * x[p]).sum();
        x[i] = (y[i] - s) / l[i * n + i];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sample(rows: &[&[f64]]) -> FunctionalSample {
        let k = rows[0].len();
        let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
        FunctionalSample::from_rows(Grid::midpoints(k), &rows).unwrap()
    }

    #[test]
    fn midpoint_grid() {
        assert_eq!(Grid::midpoints(4).points(), &[0.125, 0.375, 0.625, 0.875]);
        assert_eq!(Grid::endpoints(3).points(), &[0.0, 0.5, 1.0]);
    }

    #[test]
    fn grid_rejects_unordered_or_out_of_range() {
        assert!(Grid::new(vec![0.2, 0.1]).is_err());
        assert!(Grid::new(vec![0.2, 0.2]).is_err());
        assert!(Grid::new(vec![-0.1, 0.5]).is_err());
        assert!(Grid::new(vec![]).is_err());
    }

    #[test]
    fn too_few_rows() {
        let rows = vec![vec![1.0]; 3];
        assert_eq!(
            FunctionalSample::from_rows(Grid::midpoints(1), &rows),
            Err(Error::InputSize { rows: 3, min: 4 })
        );
    }

    #[test]
    fn ragged_row_is_named() {
        let rows = vec![vec![1.0, 2.0], vec![1.0], vec![0.0, 0.0], vec![0.0, 0.0]];
        assert_eq!(
            FunctionalSample::from_rows(Grid::midpoints(2), &rows),
            Err(Error::RaggedRow { row: 2, expected: 2, found: 1 })
        );
    }

    #[test]
    fn center_small_example() {
        let x = sample(&[&[1.0, 2.0], &[3.0, 4.0], &[1.0, 2.0], &[3.0, 4.0]]).center();
        assert_eq!(x.row(0), &[-1.0, -1.0]);
        assert_eq!(x.row(1), &[1.0, 1.0]);
        assert!(x.is_centered());
    }

    #[test]
    fn center_kills_constants_and_is_idempotent() {
        let x = sample(&[&[2.5, -1.0], &[2.5, -1.0], &[2.5, -1.0], &[2.5, -1.0]]).center();
        assert!(x.values().iter().all(|&v| v == 0.0));

        let y = sample(&[&[0.3, 1.0], &[1.7, -4.0], &[-2.0, 0.5], &[9.0, 2.0]]).center();
        let mut twice = y.clone();
        twice.centered = false;
        let twice = twice.center();
        for (a, b) in y.values().iter().zip(twice.values()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
        assert_eq!(y.center(), y);
    }

    #[test]
    fn fourier_smooth_contract() {
        let x = sample(&[&[1.0, 2.0], &[3.0, 4.0], &[1.0, 2.0], &[3.0, 4.0]]);
        assert!(matches!(x.fourier_smooth(2), Err(Error::Contract(_))));
        assert_eq!(x.fourier_smooth(3), Err(Error::IllPosedProjection { n_basis: 3, k: 2 }));
    }

    #[test]
    fn basis_element_is_fixed_point() {
        let grid = Grid::midpoints(21);
        let curve: Vec<f64> = grid
            .points()
            .iter()
            .map(|s| core::f64::consts::SQRT_2 * libm::cos(2.0 * PI * s))
            .collect();
        let rows = vec![curve.clone(); 4];
        let x = FunctionalSample::from_rows(grid, &rows).unwrap();
        let smoothed = x.fourier_smooth(21).unwrap();
        for t in 0..4 {
            for (a, b) in smoothed.row(t).iter().zip(&curve) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn constant_curve_single_basis() {
        let x = sample(&[&[1.0, 1.0, 1.0], &[1.0, 1.0, 1.0], &[1.0, 1.0, 1.0], &[1.0, 1.0, 1.0]]);
        let s = x.fourier_smooth(1).unwrap();
        for (a, b) in s.values().iter().zip(x.values()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn endpoint_grid_projection_is_idempotent() {
        let grid = Grid::endpoints(15);
        let rows: Vec<Vec<f64>> = (0..5)
            .map(|t| (0..15).map(|j| libm::sin((t * 7 + j * 3) as f64)).collect())
            .collect();
        let x = FunctionalSample::from_rows(grid, &rows).unwrap();
        let once = x.fourier_smooth(5).unwrap();
        let twice = once.fourier_smooth(5).unwrap();
        for (a, b) in once.values().iter().zip(twice.values()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-8);
        }
    }
}
