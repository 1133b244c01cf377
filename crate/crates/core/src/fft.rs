//! Forward discrete Fourier transform of arbitrary length.
//!
//! Power-of-two lengths use an iterative radix-2 transform; every other
//! length goes through Bluestein's chirp-z reduction onto a power of two.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

/// A reusable transform of fixed length computing
/// `X_m = Σ_n x_n exp(-2πi nm / len)`.
#[derive(Debug, Clone)]
pub struct FftPlan {
    len: usize,
    algo: Algo,
}

#[derive(Debug, Clone)]
enum Algo {
    Trivial,
    Radix2(Radix2),
    Bluestein {
        inner: Radix2,
        chirp: Vec<Complex64>,
        filter: Vec<Complex64>,
    },
}

#[derive(Debug, Clone)]
struct Radix2 {
    len: usize,
    twiddles: Vec<Complex64>,
}

impl Radix2 {
    fn new(len: usize) -> Self {
        debug_assert!(len.is_power_of_two());
        let twiddles = (0..len / 2)
            .map(|i| Complex64::from_polar(1.0, -2.0 * PI * i as f64 / len as f64))
            .collect();
        Self { len, twiddles }
    }

    fn forward(&self, data: &mut [Complex64]) {
        let n = self.len;
        if n <= 1 {
            return;
        }
        let bits = n.trailing_zeros();
        for i in 0..n {
            let j = i.reverse_bits() >> (usize::BITS - bits);
            if j > i {
                data.swap(i, j);
            }
        }
        let mut size = 2;
        while size <= n {
            let half = size / 2;
            let stride = n / size;
            for start in (0..n).step_by(size) {
                for i in 0..half {
                    let w = self.twiddles[i * stride];
                    let a = data[start + i];
                    let b = data[start + i + half] * w;
                    data[start + i] = a + b;
                    data[start + i + half] = a - b;
                }
            }
            size *= 2;
        }
    }

    fn inverse(&self, data: &mut [Complex64]) {
        for z in data.iter_mut() {
            *z = z.conj();
        }
        self.forward(data);
        let scale = 1.0 / self.len as f64;
        for z in data.iter_mut() {
            *z = z.conj() * scale;
        }
    }
}

impl FftPlan {
    pub fn new(len: usize) -> Self {
        let algo = if len <= 1 {
            Algo::Trivial
        } else if len.is_power_of_two() {
            Algo::Radix2(Radix2::new(len))
        } else {
            let m = (2 * len - 1).next_power_of_two();
            let inner = Radix2::new(m);
            // chirp_n = exp(-iπ n²/len); n² reduced mod 2·len to keep the angle small
            let chirp: Vec<Complex64> = (0..len)
                .map(|n| {
                    let sq = (n as u128 * n as u128 % (2 * len as u128)) as f64;
                    Complex64::from_polar(1.0, -PI * sq / len as f64)
                })
                .collect();
            let mut filter = vec![Complex64::new(0.0, 0.0); m];
            filter[0] = chirp[0].conj();
            for n in 1..len {
                filter[n] = chirp[n].conj();
                filter[m - n] = chirp[n].conj();
            }
            inner.forward(&mut filter);
            Algo::Bluestein { inner, chirp, filter }
        };
        Self { len, algo }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// In-place forward transform; `data.len()` must equal the plan length.
    pub fn forward(&self, data: &mut [Complex64]) {
        assert_eq!(data.len(), self.len, "buffer length does not match the plan");
        match &self.algo {
            Algo::Trivial => {}
            Algo::Radix2(r) => r.forward(data),
            Algo::Bluestein { inner, chirp, filter } => {
                let m = inner.len;
                let mut work = vec![Complex64::new(0.0, 0.0); m];
                for (w, (x, c)) in work.iter_mut().zip(data.iter().zip(chirp)) {
                    *w = x * c;
                }
                inner.forward(&mut work);
                for (w, f) in work.iter_mut().zip(filter) {
                    *w *= f;
                }
                inner.inverse(&mut work);
                for (x, (w, c)) in data.iter_mut().zip(work.iter().zip(chirp)) {
                    *x = w * c;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|m| {
                x.iter()
                    .enumerate()
                    .map(|(j, v)| v * Complex64::from_polar(1.0, -2.0 * PI * ((j * m) % n) as f64 / n as f64))
                    .sum()
            })
            .collect()
    }

    #[test]
    fn matches_naive_for_many_lengths() {
        for n in 1..70 {
            let x: Vec<Complex64> = (0..n)
                .map(|i| Complex64::new(libm::sin(i as f64 * 1.3 + 0.2), libm::cos(i as f64 * 0.7)))
                .collect();
            let mut y = x.clone();
            FftPlan::new(n).forward(&mut y);
            let z = naive(&x);
            let scale: f64 = z.iter().map(|v| v.norm()).fold(1.0, f64::max);
            for (a, b) in y.iter().zip(&z) {
                assert!((a - b).norm() <= 1e-12 * scale, "n = {n}");
            }
        }
    }
}
