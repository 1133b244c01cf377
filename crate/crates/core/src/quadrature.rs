//! Adaptive Simpson quadrature.

const MAX_DEPTH: u32 = 48;

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    recurse(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || libm::fabs(delta) <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Integrates over `[a, b]` after splitting at the interior `breaks`, which
/// keeps the adaptive rule away from kinks.
pub fn piecewise_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, breaks: &[f64], tol: f64) -> f64 {
    let mut total = 0.0;
    let mut lo = a;
    let inner = breaks.iter().copied().filter(|&x| x > a && x < b);
    let count = breaks.len() + 1;
    for hi in inner.chain(core::iter::once(b)) {
        total += adaptive_simpson(f, lo, hi, tol / count as f64);
        lo = hi;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn polynomial_exact() {
        let v = adaptive_simpson(&|x: f64| x * x * x - 2.0 * x, 0.0, 2.0, 1e-12);
        assert_abs_diff_eq!(v, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn gaussian_integral_matches_erf() {
        let v = adaptive_simpson(&|t: f64| libm::exp(-t * t), 0.0, 1.0, 1e-13);
        let closed = 0.5 * core::f64::consts::PI.sqrt() * libm::erf(1.0);
        assert_abs_diff_eq!(v, closed, epsilon = 1e-12);
    }

    #[test]
    fn kink_split() {
        let v = piecewise_simpson(&|x: f64| x.abs(), -1.0, 2.0, &[0.0], 1e-12);
        assert_abs_diff_eq!(v, 2.5, epsilon = 1e-12);
    }
}
