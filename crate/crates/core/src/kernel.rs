//! Frequency-domain smoothing kernels `W` supported on `[-π, π]` with
//! `∫ W = 2π`, plus the two integral constants the studentization needs.

use alloc::format;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::{adaptive_simpson, piecewise_simpson};

const CONV_TOL: f64 = 1e-8;

/// A smoothing kernel together with its precomputed constants.
#[derive(Debug, Clone, Copy)]
pub struct WeightKernel {
    name: &'static str,
    eval: fn(f64) -> f64,
    c_w2: f64,
    c_conv: f64,
}

impl PartialEq for WeightKernel {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.c_w2 == other.c_w2 && self.c_conv == other.c_conv
    }
}

fn epanechnikov(x: f64) -> f64 {
    if x.abs() > PI {
        return 0.0;
    }
    let v = x / PI;
    1.5 * (1.0 - v * v)
}

fn biweight(x: f64) -> f64 {
    if x.abs() > PI {
        return 0.0;
    }
    let v = x / PI;
    let w = 1.0 - v * v;
    1.875 * w * w
}

impl WeightKernel {
    /// Validates `eval` and computes `∫W²` and `∫(∫W(u)W(u-x)du)² dx` by
    /// quadrature.
    pub fn new(name: &'static str, eval: fn(f64) -> f64) -> Result<Self> {
        let probes = 257;
        for i in 0..probes {
            let x = -PI + 2.0 * PI * i as f64 / (probes - 1) as f64;
            let (w, wm) = (eval(x), eval(-x));
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidKernel(format!("W({x}) = {w} is not a finite nonnegative value")));
            }
            if (w - wm).abs() > 1e-12 * (1.0 + w.abs()) {
                return Err(Error::InvalidKernel(format!("W is not symmetric at {x}")));
            }
        }
        let mass = adaptive_simpson(&eval, -PI, PI, 1e-12);
        if (mass - 2.0 * PI).abs() > 1e-8 {
            return Err(Error::InvalidKernel(format!("∫W = {mass}, expected 2π")));
        }
        let c_w2 = adaptive_simpson(&|u: f64| eval(u) * eval(u), -PI, PI, 1e-12);
        let c_conv = convolution_constant(eval);
        if c_w2 <= 0.0 || c_conv <= 0.0 {
            return Err(Error::InvalidKernel("kernel constants must be positive".into()));
        }
        Ok(Self { name, eval, c_w2, c_conv })
    }

    /// `W(x) = (3/2)(1 - (x/π)²)` on `[-π, π]`.
    pub fn epanechnikov() -> Self {
        Self::new("epanechnikov-2pi", epanechnikov).expect("built-in kernel is valid")
    }

    /// `W(x) = (15/8)(1 - (x/π)²)²` on `[-π, π]`.
    pub fn biweight() -> Self {
        Self::new("biweight-2pi", biweight).expect("built-in kernel is valid")
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "epanechnikov-2pi" | "epanechnikov" => Some(Self::epanechnikov()),
            "biweight-2pi" | "biweight" => Some(Self::biweight()),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    /// `∫_{-π}^{π} W²(u) du`.
    pub fn c_w2(&self) -> f64 {
        self.c_w2
    }

    /// `∫_{-2π}^{2π} (∫_{-π}^{π} W(u) W(u - x) du)² dx`.
    pub fn c_conv(&self) -> f64 {
        self.c_conv
    }
}

impl Default for WeightKernel {
    fn default() -> Self {
        Self::epanechnikov()
    }
}

fn convolution_constant(eval: fn(f64) -> f64) -> f64 {
    // self-convolution is even in x
    let inner = |x: f64| {
        let lo = (x - PI).max(-PI);
        let hi = PI.min(x + PI);
        if hi <= lo {
            return 0.0;
        }
        adaptive_simpson(&|u: f64| eval(u) * eval(u - x), lo, hi, CONV_TOL * 1e-3)
    };
    let outer = |x: f64| {
        let k = inner(x);
        k * k
    };
    2.0 * piecewise_simpson(&outer, 0.0, 2.0 * PI, &[PI], CONV_TOL * 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn epanechnikov_constants() {
        let w = WeightKernel::epanechnikov();
        assert_relative_eq!(w.c_w2(), 12.0 * PI / 5.0, max_relative = 1e-10);
        // closed form 2672π³/385 from symbolic integration of the piecewise polynomial
        assert!((w.c_conv() - 2672.0 * PI * PI * PI / 385.0).abs() < 1e-8);
    }

    #[test]
    fn biweight_mass_is_2pi() {
        let w = WeightKernel::biweight();
        assert_relative_eq!(w.c_w2(), 225.0 / 64.0 * PI * 256.0 / 315.0, max_relative = 1e-10);
    }

    #[test]
    fn rejects_bad_kernels() {
        fn flat_wrong_mass(x: f64) -> f64 {
            if x.abs() <= PI { 0.5 } else { 0.0 }
        }
        fn skewed(x: f64) -> f64 {
            if x.abs() <= PI { 1.0 + 0.1 * x } else { 0.0 }
        }
        assert!(WeightKernel::new("flat", flat_wrong_mass).is_err());
        assert!(WeightKernel::new("skewed", skewed).is_err());
    }

    #[test]
    fn support_and_symmetry() {
        let w = WeightKernel::epanechnikov();
        assert_eq!(w.eval(3.5), 0.0);
        assert_eq!(w.eval(1.2), w.eval(-1.2));
        assert_eq!(w.eval(0.0), 1.5);
    }
}
