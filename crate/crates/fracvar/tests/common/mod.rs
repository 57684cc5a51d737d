//! Shared test oracles, independent of the library's discretizations.
//!
//! The fractional operators are checked against adaptive quadrature of their
//! defining integrals. The weakly singular kernels are removed analytically
//! first: with `v = (x - t)^p` the kernel `(x - t)^(p-1)` becomes constant,
//! so plain adaptive Simpson converges on the transformed integrand. The
//! Riemann–Liouville derivative oracle differentiates the fractional
//! integral of complementary order by central differences, which is its
//! definition.

#![allow(dead_code)]

/// Adaptive Simpson on a smooth integrand.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
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
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    recurse(&f, a, b, fa, fm, fb, whole, tol, 48)
}

/// `∫_a^x (x - t)^(p - 1) g(t) dt` with `0 < p < 1` removed analytically:
/// substituting `v = (x - t)^p` gives `(1/p) ∫_0^{(x-a)^p} g(x - v^(1/p)) dv`.
pub fn singular_convolution_left(g: &dyn Fn(f64) -> f64, a: f64, x: f64, p: f64) -> f64 {
    if x <= a {
        return 0.0;
    }
    let upper = (x - a).powf(p);
    let inv_p = 1.0 / p;
    adaptive_simpson(&|v: f64| g(x - v.powf(inv_p)), 0.0, upper, 1e-13) / p
}

/// `∫_x^b (t - x)^(p - 1) g(t) dt`, mirrored.
pub fn singular_convolution_right(g: &dyn Fn(f64) -> f64, x: f64, b: f64, p: f64) -> f64 {
    if x >= b {
        return 0.0;
    }
    let upper = (b - x).powf(p);
    let inv_p = 1.0 / p;
    adaptive_simpson(&|v: f64| g(x + v.powf(inv_p)), 0.0, upper, 1e-13) / p
}

fn gamma(x: f64) -> f64 {
    fracvar::special::gamma(x).unwrap()
}

pub enum OracleSide {
    Left,
    Right,
}

/// Riemann–Liouville fractional integral of an analytic function.
pub fn oracle_rlfi(
    side: OracleSide,
    alpha: f64,
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    x: f64,
) -> f64 {
    match side {
        OracleSide::Left => singular_convolution_left(f, a, x, alpha) / gamma(alpha),
        OracleSide::Right => singular_convolution_right(f, x, b, alpha) / gamma(alpha),
    }
}

/// Caputo derivative of an analytic function with analytic first derivative.
pub fn oracle_cfd(
    side: OracleSide,
    alpha: f64,
    fprime: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    x: f64,
) -> f64 {
    match side {
        OracleSide::Left => singular_convolution_left(fprime, a, x, 1.0 - alpha) / gamma(1.0 - alpha),
        OracleSide::Right => {
            -singular_convolution_right(fprime, x, b, 1.0 - alpha) / gamma(1.0 - alpha)
        }
    }
}

/// Riemann–Liouville derivative by its definition: the (anti-symmetrized)
/// derivative of the complementary-order fractional integral, evaluated by
/// central differences.
pub fn oracle_rlfd(
    side: OracleSide,
    alpha: f64,
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    x: f64,
) -> f64 {
    let step = 1e-5 * (b - a);
    match side {
        OracleSide::Left => {
            let i = |z: f64| oracle_rlfi(OracleSide::Left, 1.0 - alpha, f, a, b, z);
            (i(x + step) - i(x - step)) / (2.0 * step)
        }
        OracleSide::Right => {
            let i = |z: f64| oracle_rlfi(OracleSide::Right, 1.0 - alpha, f, a, b, z);
            -(i(x + step) - i(x - step)) / (2.0 * step)
        }
    }
}

/// Combined Caputo derivative oracle.
#[allow(clippy::too_many_arguments)]
pub fn oracle_combined_cfd(
    alpha: f64,
    beta: f64,
    gamma_w: f64,
    fprime: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    x: f64,
) -> f64 {
    gamma_w * oracle_cfd(OracleSide::Left, alpha, fprime, a, b, x)
        + (1.0 - gamma_w) * oracle_cfd(OracleSide::Right, beta, fprime, a, b, x)
}

/// Dual combined Riemann–Liouville derivative oracle.
#[allow(clippy::too_many_arguments)]
pub fn oracle_combined_rlfd(
    alpha: f64,
    beta: f64,
    gamma_w: f64,
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    x: f64,
) -> f64 {
    (1.0 - gamma_w) * oracle_rlfd(OracleSide::Left, beta, f, a, b, x)
        + gamma_w * oracle_rlfd(OracleSide::Right, alpha, f, a, b, x)
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1e-12)
}

#[cfg(test)]
mod self_checks {
    use super::*;

    #[test]
    fn simpson_integrates_polynomials_exactly() {
        // ∫_0^2 (x^3 - 2x + 1) dx = [x^4/4 - x^2 + x] = 4 - 4 + 2 = 2
        let v = adaptive_simpson(&|x: f64| x * x * x - 2.0 * x + 1.0, 0.0, 2.0, 1e-13);
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn desingularized_convolution_matches_beta_function() {
        // ∫_0^1 (1-t)^(-1/2) t dt = B(2, 1/2) = 4/3
        let v = singular_convolution_left(&|t: f64| t, 0.0, 1.0, 0.5);
        assert!((v - 4.0 / 3.0).abs() < 1e-10, "{v}");
    }
}
