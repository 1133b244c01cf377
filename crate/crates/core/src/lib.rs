//! Frequency-domain test for equality of the spectral density operators of
//! two functional time series observed on a common grid.
//!
//! Curves are stored as `T × k` matrices. The pipeline is:
//! DFT ([`spectral::DftFrame`]) → kernel-smoothed operator estimates
//! ([`spectral::SpectralEstimate`]) → studentized `L²`-type statistic
//! ([`teststat`]) → calibration by a frequency-domain bootstrap
//! ([`bootstrap`]). Bandwidth selection lives in [`bandwidth`], Monte-Carlo
//! data generation in [`simulate`].
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bandwidth;
pub mod bootstrap;
pub mod error;
pub mod fdata;
pub mod fft;
pub mod kernel;
pub mod linalg;
pub mod quadrature;
pub mod rng;
pub mod simulate;
pub mod spectral;
pub mod stats;
pub mod teststat;

pub use num_complex::Complex64;

pub use bootstrap::{BootstrapPlan, Studentization, TestOutcome};
pub use error::{Error, Result};
pub use fdata::{FunctionalSample, Grid, GridPolicy};
pub use kernel::WeightKernel;
pub use spectral::{DftFrame, SpectralEstimate};
pub use teststat::TestResult;
