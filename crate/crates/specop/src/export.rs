//! JSON and CSV renderings of estimates and diagnostics.

use std::f64::consts::PI;
use std::io::Write;

use serde::Serialize;
use specop_core::bandwidth::CvResult;
use specop_core::bootstrap::BootstrapDistribution;
use specop_core::{SpectralEstimate, TestResult};

/// Flat form of a spectral estimate: slice `u` occupies
/// `re[u*k*k..(u+1)*k*k]`, row-major.
#[derive(Debug, Serialize)]
pub struct EstimateRecord<'a> {
    #[serde(rename = "T")]
    pub len: usize,
    #[serde(rename = "N")]
    pub n_freq: usize,
    pub b: f64,
    pub kernel_name: &'a str,
    pub grid: &'a [f64],
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl<'a> EstimateRecord<'a> {
    pub fn new(est: &'a SpectralEstimate) -> Self {
        let cells = est.slices().iter().flat_map(|s| s.as_slice().iter());
        Self {
            len: est.len(),
            n_freq: est.n_freq(),
            b: est.bandwidth(),
            kernel_name: est.kernel().name(),
            grid: est.grid().points(),
            re: cells.clone().map(|z| z.re).collect(),
            im: cells.map(|z| z.im).collect(),
        }
    }
}

fn csv_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v > 0.0 {
        "inf".into()
    } else {
        "nan".into()
    }
}

/// `lambda,q` for `λ_j = 2πj/T`, `j = 0..=N`.
pub fn write_q_profile<W: Write>(mut out: W, result: &TestResult) -> std::io::Result<()> {
    writeln!(out, "lambda,q")?;
    for (j, q) in result.q_profile.iter().enumerate() {
        let lambda = 2.0 * PI * j as f64 / result.len as f64;
        writeln!(out, "{},{}", csv_float(lambda), csv_float(*q))?;
    }
    Ok(())
}

/// `sigma,tau,d2` over the grid.
pub fn write_d_map<W: Write>(mut out: W, result: &TestResult, grid: &[f64]) -> std::io::Result<()> {
    writeln!(out, "sigma,tau,d2")?;
    for (r, sigma) in grid.iter().enumerate() {
        for (l, tau) in grid.iter().enumerate() {
            writeln!(out, "{},{},{}", csv_float(*sigma), csv_float(*tau), csv_float(result.d2(r, l)))?;
        }
    }
    Ok(())
}

pub fn write_cv<W: Write>(mut out: W, cv: &CvResult) -> std::io::Result<()> {
    writeln!(out, "b,cv")?;
    for (b, s) in cv.b_grid.iter().zip(&cv.scores) {
        writeln!(out, "{},{}", csv_float(*b), csv_float(*s))?;
    }
    Ok(())
}

/// Replicates in draw order.
pub fn write_bootstrap<W: Write>(mut out: W, dist: &BootstrapDistribution) -> std::io::Result<()> {
    writeln!(out, "index,t_star,u_star,mu0_star,theta0_star")?;
    for i in 0..dist.len() {
        writeln!(
            out,
            "{i},{},{},{},{}",
            csv_float(dist.t_star[i]),
            csv_float(dist.u_star[i]),
            csv_float(dist.mu0_star[i]),
            csv_float(dist.theta0_star[i])
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn result() -> TestResult {
        TestResult {
            u_stat: 0.0,
            mu0_hat: 1.0,
            theta0_hat: 1.0,
            t_stat: 0.0,
            p_value: None,
            b: 0.2,
            len: 5,
            k: 2,
            q_profile: vec![0.5, 0.25, 0.0],
            d_map: vec![1.0, 2.0, 3.0, 4.0],
        }
    }

    #[test]
    fn headers_are_exact() {
        let mut q = Vec::new();
        write_q_profile(&mut q, &result()).unwrap();
        let q = String::from_utf8(q).unwrap();
        assert!(q.starts_with("lambda,q\n"));
        assert_eq!(q.lines().count(), 4);
        let mut d = Vec::new();
        write_d_map(&mut d, &result(), &[0.25, 0.75]).unwrap();
        let d = String::from_utf8(d).unwrap();
        assert!(d.starts_with("sigma,tau,d2\n"));
        assert!(d.lines().nth(2).unwrap().starts_with("2.5000000000000000e-1,7.5"));
    }

    #[test]
    fn infinite_scores_are_spelled_out() {
        let cv = CvResult { b_grid: vec![0.1, 0.2], scores: vec![f64::INFINITY, 1.0], b_cv: 0.2 };
        let mut out = Vec::new();
        write_cv(&mut out, &cv).unwrap();
        assert!(String::from_utf8(out).unwrap().contains(",inf\n"));
    }
}
