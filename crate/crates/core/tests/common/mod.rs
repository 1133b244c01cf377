#![allow(dead_code)]

use rand::Rng;
use rand_distr::StandardNormal;
use specop_core::linalg::CMatrix;
use specop_core::rng::substream;
use specop_core::{Complex64, FunctionalSample, Grid};

/// Gaussian white-noise sample, deterministic in `seed`.
pub fn noise(len: usize, k: usize, seed: u64) -> FunctionalSample {
    let mut rng = substream(seed, 0);
    let values = (0..len * k).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    FunctionalSample::new(Grid::midpoints(k), values).unwrap()
}

/// `J_{λ_t}(s_j)` by direct summation.
pub fn naive_dft(sample: &FunctionalSample, t: i64, j: usize) -> Complex64 {
    let len = sample.len();
    let lambda = 2.0 * std::f64::consts::PI * t as f64 / len as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for u in 1..=len {
        acc += Complex64::from_polar(sample.row(u - 1)[j], -(u as f64) * lambda);
    }
    acc / (2.0 * std::f64::consts::PI * len as f64).sqrt()
}

pub fn to_nalgebra(m: &CMatrix) -> nalgebra::DMatrix<nalgebra::Complex<f64>> {
    let n = m.dim();
    nalgebra::DMatrix::from_fn(n, n, |i, j| {
        let z = m[(i, j)];
        nalgebra::Complex::new(z.re, z.im)
    })
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}
