//! load → center → optional curve smoothing → bandwidth → estimates →
//! statistic → calibration.

use std::path::Path;

use serde::Serialize;
use specop_core::bandwidth::{self, CvResult};
use specop_core::bootstrap::{self, BootstrapDistribution, BootstrapPlan, Studentization};
use specop_core::spectral::{smooth_with, DftFrame, SmoothingWindow};
use specop_core::teststat::{self, gaussian_p_value};
use specop_core::{FunctionalSample, SpectralEstimate, TestResult, WeightKernel};

use crate::error::{CliError, CliResult};
use crate::io::{load_csv, CsvOptions};
use crate::parallel;

/// Curve smoothing applied after centering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Smoothing {
    /// 21 Fourier functions when the grid has at least 21 points, else none.
    Auto,
    Off,
    Basis(usize),
}

impl Smoothing {
    pub const DEFAULT_BASIS: usize = 21;

    /// `None` → automatic, `Some(0)` → off.
    pub fn from_flag(n: Option<usize>) -> Self {
        match n {
            None => Smoothing::Auto,
            Some(0) => Smoothing::Off,
            Some(n) => Smoothing::Basis(n),
        }
    }

    pub fn resolve(self, k: usize) -> Option<usize> {
        match self {
            Smoothing::Auto => (k >= Self::DEFAULT_BASIS).then_some(Self::DEFAULT_BASIS),
            Smoothing::Off => None,
            Smoothing::Basis(n) => Some(n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Calibration {
    #[default]
    Bootstrap,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BandwidthSource {
    Flag,
    Cv,
}

#[derive(Debug, Clone)]
pub struct AnalysisOptions {
    pub b: Option<f64>,
    pub replicates: usize,
    pub seed: u64,
    pub workers: usize,
    pub kernel: WeightKernel,
    pub wrap_frequencies: bool,
    pub studentization: Studentization,
    pub calibration: Calibration,
    pub smoothing: Smoothing,
    pub alpha: f64,
    pub csv: CsvOptions,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            b: None,
            replicates: bootstrap::DEFAULT_REPLICATES,
            seed: 0,
            workers: 0,
            kernel: WeightKernel::epanechnikov(),
            wrap_frequencies: false,
            studentization: Studentization::Full,
            calibration: Calibration::Bootstrap,
            smoothing: Smoothing::Auto,
            alpha: 0.05,
            csv: CsvOptions::default(),
        }
    }
}

/// Loads both samples and applies the shared preprocessing. Returns the
/// number of basis functions used, if any.
pub fn load_pair(x: &Path, y: &Path, opts: &AnalysisOptions) -> CliResult<(FunctionalSample, FunctionalSample, Option<usize>)> {
    let xs = load_csv(x, &opts.csv)?;
    let ys = load_csv(y, &opts.csv)?;
    preprocess(xs, ys, opts.smoothing)
}

pub fn preprocess(
    x: FunctionalSample,
    y: FunctionalSample,
    smoothing: Smoothing,
) -> CliResult<(FunctionalSample, FunctionalSample, Option<usize>)> {
    if x.len() != y.len() {
        return Err(CliError::Scope(format!(
            "samples have {} and {} curves; this test compares series of equal length only",
            x.len(),
            y.len()
        )));
    }
    if x.k() != y.k() {
        return Err(CliError::Scope(format!("samples have {} and {} grid points; both must share one grid", x.k(), y.k())));
    }
    if x.grid() != y.grid() {
        return Err(CliError::Scope("samples are observed on different grids".into()));
    }
    let (mut x, mut y) = (x.center(), y.center());
    let basis = smoothing.resolve(x.k());
    if let Some(n) = basis {
        x = x.fourier_smooth(n)?;
        y = y.fourier_smooth(n)?;
    }
    Ok((x, y, basis))
}

/// Bandwidth from the flag, or by cross-validation over the default grid.
pub fn resolve_bandwidth(
    x: &FunctionalSample,
    y: &FunctionalSample,
    opts: &AnalysisOptions,
) -> CliResult<(f64, BandwidthSource, Option<CvResult>)> {
    match opts.b {
        Some(b) => Ok((b, BandwidthSource::Flag, None)),
        None => {
            let cv = bandwidth::select(x, y, &bandwidth::default_grid(), &opts.kernel)?;
            Ok((cv.b_cv, BandwidthSource::Cv, Some(cv)))
        }
    }
}

/// Machine-readable test output.
#[derive(Debug, Clone, Serialize)]
pub struct TestReport {
    #[serde(flatten)]
    pub result: TestResult,
    pub b_source: BandwidthSource,
    pub kernel: &'static str,
    pub studentization: Studentization,
    pub calibration: Calibration,
    pub wrap_frequencies: bool,
    pub n_basis: Option<usize>,
    pub replicates: usize,
    pub seed: u64,
    pub alpha: f64,
    pub reject: bool,
    /// Ascending `t*` draws; empty under Gaussian calibration.
    pub bootstrap_sorted: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct TestRun {
    pub report: TestReport,
    pub distribution: Option<BootstrapDistribution>,
    pub cv: Option<CvResult>,
    pub fx: SpectralEstimate,
    pub fy: SpectralEstimate,
}

/// Runs the test on preprocessed samples.
pub fn run_test(x: &FunctionalSample, y: &FunctionalSample, n_basis: Option<usize>, opts: &AnalysisOptions) -> CliResult<TestRun> {
    let (b, b_source, cv) = resolve_bandwidth(x, y, opts)?;
    let plan = BootstrapPlan {
        replicates: opts.replicates,
        master_seed: opts.seed,
        workers: opts.workers,
        studentization: opts.studentization,
        wrap_frequencies: opts.wrap_frequencies,
    };
    let (result, distribution, fx, fy) = match opts.calibration {
        Calibration::Bootstrap => {
            let prepared = bootstrap::prepare(x, y, b, &opts.kernel, &plan)?;
            let pool = parallel::pool(opts.workers)?;
            let reps = parallel::map_indexed(&pool, plan.replicates, |i| prepared.context.replicate_indexed(plan.master_seed, i))?;
            let (fx, fy) = (prepared.fx.clone(), prepared.fy.clone());
            let outcome = prepared.finish(&reps);
            (outcome.result, Some(outcome.distribution), fx, fy)
        }
        Calibration::Gaussian => {
            let (fx, fy) = estimates(x, y, b, opts)?;
            let mut result = teststat::evaluate(&fx, &fy)?;
            result.p_value = Some(gaussian_p_value(result.t_stat));
            (result, None, fx, fy)
        }
    };
    let p = result.p_value.expect("calibration sets the p-value");
    let report = TestReport {
        b_source,
        kernel: opts.kernel.name(),
        studentization: opts.studentization,
        calibration: opts.calibration,
        wrap_frequencies: opts.wrap_frequencies,
        n_basis,
        replicates: if distribution.is_some() { opts.replicates } else { 0 },
        seed: opts.seed,
        alpha: opts.alpha,
        reject: p <= opts.alpha,
        bootstrap_sorted: distribution.as_ref().map(|d| d.sorted().to_vec()).unwrap_or_default(),
        result,
    };
    Ok(TestRun { report, distribution, cv, fx, fy })
}

/// Both spectral estimates at bandwidth `b`.
pub fn estimates(x: &FunctionalSample, y: &FunctionalSample, b: f64, opts: &AnalysisOptions) -> CliResult<(SpectralEstimate, SpectralEstimate)> {
    let window = SmoothingWindow::new(x.len(), b, &opts.kernel, opts.wrap_frequencies)?;
    Ok((smooth_with(&DftFrame::from_sample(x), &window)?, smooth_with(&DftFrame::from_sample(y), &window)?))
}

/// Statistic and diagnostics without calibration.
pub fn diagnose(x: &FunctionalSample, y: &FunctionalSample, opts: &AnalysisOptions) -> CliResult<(TestResult, BandwidthSource)> {
    let (b, source, _) = resolve_bandwidth(x, y, opts)?;
    let (fx, fy) = estimates(x, y, b, opts)?;
    Ok((teststat::evaluate(&fx, &fy)?, source))
}

#[cfg(test)]
mod tests {
    use super::*;
    use specop_core::Grid;

    fn sample(len: usize, k: usize, phase: f64) -> FunctionalSample {
        let v = (0..len * k).map(|i| ((i as f64) * 0.91 + phase).sin() + 0.1 * ((i * i) as f64 * 0.07).cos()).collect();
        FunctionalSample::new(Grid::midpoints(k), v).unwrap()
    }

    #[test]
    fn smoothing_resolution() {
        assert_eq!(Smoothing::from_flag(None).resolve(21), Some(21));
        assert_eq!(Smoothing::from_flag(None).resolve(20), None);
        assert_eq!(Smoothing::from_flag(Some(0)).resolve(50), None);
        assert_eq!(Smoothing::from_flag(Some(7)).resolve(5), Some(7));
    }

    #[test]
    fn unequal_lengths_are_out_of_scope() {
        let e = preprocess(sample(20, 3, 0.0), sample(21, 3, 0.0), Smoothing::Off).unwrap_err();
        assert_eq!(e.exit_code(), 3);
        assert!(e.to_string().contains("equal length"));
        let e = preprocess(sample(20, 3, 0.0), sample(20, 4, 0.0), Smoothing::Off).unwrap_err();
        assert_eq!(e.exit_code(), 3);
    }

    #[test]
    fn oversized_basis_is_a_usage_error() {
        let e = preprocess(sample(20, 3, 0.0), sample(20, 3, 1.0), Smoothing::Basis(5)).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn gaussian_calibration() {
        let (x, y, n) = preprocess(sample(40, 3, 0.0), sample(40, 3, 1.0), Smoothing::Off).unwrap();
        let opts = AnalysisOptions { b: Some(0.3), calibration: Calibration::Gaussian, ..Default::default() };
        let run = run_test(&x, &y, n, &opts).unwrap();
        assert!(run.report.bootstrap_sorted.is_empty());
        assert_eq!(run.report.result.p_value, Some(gaussian_p_value(run.report.result.t_stat)));
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let (x, y, n) = preprocess(sample(40, 3, 0.0), sample(40, 3, 1.0), Smoothing::Off).unwrap();
        let base = AnalysisOptions { b: Some(0.3), replicates: 30, seed: 5, ..Default::default() };
        let a = run_test(&x, &y, n, &AnalysisOptions { workers: 1, ..base.clone() }).unwrap();
        let b = run_test(&x, &y, n, &AnalysisOptions { workers: 3, ..base }).unwrap();
        assert_eq!(serde_json::to_string(&a.report).unwrap(), serde_json::to_string(&b.report).unwrap());
    }
}
