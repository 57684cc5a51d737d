//! Operator behavior against analytic values and the quadrature oracle.

mod common;

use common::*;
use fracvar::grid::{Grid, SampledFunction};
use fracvar::operators::{
    caputo_derivative, combined_caputo, combined_riemann_liouville, fractional_integral,
    riemann_liouville_derivative, FracOrder, Side,
};
use proptest::prelude::*;

const INV_GAMMA_1_5: f64 = 1.128_379_167_095_512_6; // 2/sqrt(pi)
const INV_SQRT_PI: f64 = 0.564_189_583_547_756_3;

fn order(v: f64) -> FracOrder {
    FracOrder::new(v).unwrap()
}

fn grid01(n: usize) -> Grid {
    Grid::new(0.0, 1.0, n).unwrap()
}

#[test]
fn rlfi_left_of_one_vs_analytic_and_oracle() {
    // Analytic: I^0.5 of 1 at x=1 is 1/Gamma(1.5) = 1.128379167095...
    let oracle = oracle_rlfi(OracleSide::Left, 0.5, &|_| 1.0, 0.0, 1.0, 1.0);
    assert!(
        (oracle - INV_GAMMA_1_5).abs() < 1e-9,
        "oracle disagrees with the analytic value: {oracle}"
    );
    let f = SampledFunction::from_fn(grid01(2001), |_| 1.0).unwrap();
    let got = *fractional_integral(Side::Left, order(0.5), &f)
        .values()
        .last()
        .unwrap();
    assert!((got - INV_GAMMA_1_5).abs() < 1e-6, "{got}");
}

#[test]
fn rlfi_right_of_one_vs_oracle() {
    let oracle = oracle_rlfi(OracleSide::Right, 0.5, &|_| 1.0, 0.0, 1.0, 0.0);
    assert!((oracle - INV_GAMMA_1_5).abs() < 1e-9);
    let f = SampledFunction::from_fn(grid01(2001), |_| 1.0).unwrap();
    let got = fractional_integral(Side::Right, order(0.5), &f).values()[0];
    assert!((got - INV_GAMMA_1_5).abs() < 1e-6);
}

#[test]
fn rlfi_interior_nodes_vs_oracle() {
    let g = grid01(801);
    let f = SampledFunction::from_fn(g, |x| (2.0 * x).sin() + 0.5).unwrap();
    let out = fractional_integral(Side::Left, order(0.3), &f);
    for k in [50, 200, 400, 799] {
        let x = g.node(k);
        let want = oracle_rlfi(OracleSide::Left, 0.3, &|t: f64| (2.0 * t).sin() + 0.5, 0.0, 1.0, x);
        assert!(
            (out.values()[k] - want).abs() < 5e-6,
            "node {k}: {} vs {want}",
            out.values()[k]
        );
    }
}

#[test]
fn cfd_left_power_rule_vs_oracle() {
    // cD^0.5 x at x=1 is 1/Gamma(1.5).
    let oracle = oracle_cfd(OracleSide::Left, 0.5, &|_| 1.0, 0.0, 1.0, 1.0);
    assert!((oracle - INV_GAMMA_1_5).abs() < 1e-9);
    let f = SampledFunction::from_fn(grid01(1001), |x| x).unwrap();
    let got = *caputo_derivative(Side::Left, order(0.5), &f)
        .values()
        .last()
        .unwrap();
    assert!((got - INV_GAMMA_1_5).abs() < 1e-12); // L1 is exact on linear data
}

#[test]
fn cfd_right_of_identity_vs_oracle() {
    // Right Caputo of x at x=0 on [0,1] is -1/Gamma(1.5).
    let oracle = oracle_cfd(OracleSide::Right, 0.5, &|_| 1.0, 0.0, 1.0, 0.0);
    assert!((oracle + INV_GAMMA_1_5).abs() < 1e-9);
    let f = SampledFunction::from_fn(grid01(1001), |x| x).unwrap();
    let got = caputo_derivative(Side::Right, order(0.5), &f).values()[0];
    assert!((got + INV_GAMMA_1_5).abs() < 1e-12);
}

#[test]
fn cfd_interior_vs_oracle_smooth_function() {
    let g = grid01(1501);
    let f = SampledFunction::from_fn(g, |x| x * x * (1.0 - x)).unwrap();
    let fp = |x: f64| 2.0 * x - 3.0 * x * x;
    // L1 error is O(h^(2 - alpha)) = O(h^1.3); at n = 1501 that allows ~1e-4.
    let out = caputo_derivative(Side::Left, order(0.7), &f);
    for k in [100, 750, 1500] {
        let x = g.node(k);
        let want = oracle_cfd(OracleSide::Left, 0.7, &fp, 0.0, 1.0, x);
        assert!(
            (out.values()[k] - want).abs() < 1e-4,
            "node {k}: {} vs {want}",
            out.values()[k]
        );
    }
}

#[test]
fn rlfd_left_of_one_vs_analytic_and_fd_oracle() {
    // D^0.5 of 1 at x=1: (x-a)^(-0.5)/Gamma(0.5) = 1/sqrt(pi).
    let oracle = oracle_rlfd(OracleSide::Left, 0.5, &|_| 1.0, 0.0, 1.0, 1.0);
    assert!((oracle - INV_SQRT_PI).abs() < 1e-6, "{oracle}");
    let f = SampledFunction::from_fn(grid01(101), |_| 1.0).unwrap();
    let d = riemann_liouville_derivative(Side::Left, order(0.5), &f);
    assert!((d.values().last().unwrap() - INV_SQRT_PI).abs() < 1e-12);
    assert!(d.is_singular(0));
}

#[test]
fn combined_cfd_midpoint_cancellation_for_identity() {
    // 0.5*(x^0.5 - (1-x)^0.5)/Gamma(1.5) vanishes at the midpoint.
    let oracle = oracle_combined_cfd(0.5, 0.5, 0.5, &|_| 1.0, 0.0, 1.0, 0.5);
    assert!(oracle.abs() < 1e-9, "{oracle}");
    let f = SampledFunction::from_fn(grid01(1001), |x| x).unwrap();
    let out = combined_caputo(order(0.5), order(0.5), 0.5, &f).unwrap();
    assert!(out.values()[500].abs() < 1e-3);
}

#[test]
fn combined_rlfd_midpoint_of_symmetric_bump() {
    // For g = x(1-x) both one-sided derivatives take the same value
    // sqrt(2/pi)/3 = 0.265961... at the midpoint, so the gamma=1/2
    // combination equals it as well.
    let want = 0.265_961_520_267_621_8;
    let oracle = oracle_combined_rlfd(0.5, 0.5, 0.5, &|t: f64| t * (1.0 - t), 0.0, 1.0, 0.5);
    assert!((oracle - want).abs() < 1e-6, "oracle: {oracle}");
    let g = SampledFunction::from_fn(grid01(1001), |x| x * (1.0 - x)).unwrap();
    let out = combined_riemann_liouville(order(0.5), order(0.5), 0.5, &g).unwrap();
    assert!((out.values()[500] - want).abs() < 1e-3, "{}", out.values()[500]);
    // Endpoints carry no marker: g vanishes at both boundaries.
    assert!(!out.is_singular(0) && !out.is_singular(1000));
}

#[test]
fn classical_limit_of_cfd_is_first_derivative() {
    // cD^0.999 of x^2 approaches 2x; max interior error stays small.
    let g = grid01(2001);
    let f = SampledFunction::from_fn(g, |x| x * x).unwrap();
    let d = caputo_derivative(Side::Left, order(0.999), &f);
    let mut worst: f64 = 0.0;
    for k in 1..2000 {
        worst = worst.max((d.values()[k] - 2.0 * g.node(k)).abs());
    }
    assert!(worst <= 2e-2, "max interior error {worst}");
}

#[test]
fn power_rule_convergence_order_at_least_one() {
    // Relative error against Gamma(3)/Gamma(2.5) x^1.5 on [0.1, 1] must
    // decrease with measured order >= 1 when n doubles.
    let coeff = 1.504_505_556_127_350_1; // Gamma(3)/Gamma(2.5)
    let err = |n: usize| {
        let g = grid01(n);
        let f = SampledFunction::from_fn(g, |x| x * x).unwrap();
        let d = caputo_derivative(Side::Left, order(0.5), &f);
        let mut worst: f64 = 0.0;
        for k in 0..n {
            let x = g.node(k);
            if x >= 0.1 {
                let want = coeff * x.powf(1.5);
                worst = worst.max(((d.values()[k] - want) / want).abs());
            }
        }
        worst
    };
    let coarse = err(1001);
    let fine = err(2001);
    let order = (coarse / fine).log2();
    assert!(
        order >= 1.0,
        "measured order {order} (errors {coarse} -> {fine})"
    );
}

#[test]
fn fractional_integral_semigroup_spot_check() {
    // I^0.3 (I^0.4 f) = I^0.7 f for f = x^2, checked numerically.
    let g = grid01(2001);
    let f = SampledFunction::from_fn(g, |x| x * x).unwrap();
    let inner = fractional_integral(Side::Left, order(0.4), &f);
    let composed = fractional_integral(Side::Left, order(0.3), &inner);
    let direct = fractional_integral(Side::Left, order(0.7), &f);
    let mut worst: f64 = 0.0;
    for (u, v) in composed.values().iter().zip(direct.values()) {
        worst = worst.max((u - v).abs());
    }
    assert!(worst <= 1e-3, "semigroup defect {worst}");
}

// ---------------------------------------------------------------------------
// property tests
// ---------------------------------------------------------------------------

fn sampled(values: Vec<f64>) -> SampledFunction {
    let grid = Grid::new(0.0, 1.0, values.len()).unwrap();
    SampledFunction::new(grid, values).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn linearity_of_all_operators(
        fv in prop::collection::vec(-3.0..3.0f64, 33),
        gv in prop::collection::vec(-3.0..3.0f64, 33),
        c1 in -2.0..2.0f64,
        c2 in -2.0..2.0f64,
        a_raw in 0.05..0.95f64,
        b_raw in 0.05..0.95f64,
        w in 0.0..1.0f64,
    ) {
        let f = sampled(fv);
        let g = sampled(gv);
        let alpha = order(a_raw);
        let beta = order(b_raw);
        let combo = f.linear_combination(c1, c2, &g).unwrap();

        let scale = 1.0 + c1.abs() + c2.abs();
        let check = |of: SampledFunction, og: SampledFunction, ocombo: SampledFunction| {
            for k in 0..33 {
                let direct = ocombo.values()[k];
                let split = c1 * of.values()[k] + c2 * og.values()[k];
                if direct.is_nan() || split.is_nan() {
                    continue; // singular markers line up by construction
                }
                prop_assert!((direct - split).abs() <= 1e-12 * scale.max(direct.abs()),
                    "node {k}: {direct} vs {split}");
            }
            Ok(())
        };

        check(
            fractional_integral(Side::Left, alpha, &f),
            fractional_integral(Side::Left, alpha, &g),
            fractional_integral(Side::Left, alpha, &combo),
        )?;
        check(
            caputo_derivative(Side::Right, beta, &f),
            caputo_derivative(Side::Right, beta, &g),
            caputo_derivative(Side::Right, beta, &combo),
        )?;
        check(
            combined_caputo(alpha, beta, w, &f).unwrap(),
            combined_caputo(alpha, beta, w, &g).unwrap(),
            combined_caputo(alpha, beta, w, &combo).unwrap(),
        )?;
    }

    #[test]
    fn reflection_duality(
        fv in prop::collection::vec(-3.0..3.0f64, 41),
        a_raw in 0.05..0.95f64,
    ) {
        let f = sampled(fv);
        let alpha = order(a_raw);

        // Right operator equals node-reversed left operator of reversed data.
        let pairs = [
            (
                fractional_integral(Side::Right, alpha, &f),
                fractional_integral(Side::Left, alpha, &f.reversed()).reversed(),
            ),
            (
                caputo_derivative(Side::Right, alpha, &f),
                caputo_derivative(Side::Left, alpha, &f.reversed()).reversed(),
            ),
            (
                riemann_liouville_derivative(Side::Right, alpha, &f),
                riemann_liouville_derivative(Side::Left, alpha, &f.reversed()).reversed(),
            ),
        ];
        for (right, reflected) in pairs {
            for (u, v) in right.values().iter().zip(reflected.values()) {
                if u.is_nan() || v.is_nan() {
                    prop_assert!(u.is_nan() && v.is_nan());
                    continue;
                }
                prop_assert!((u - v).abs() <= 1e-12 * u.abs().max(1.0));
            }
        }
    }

    #[test]
    fn integral_endpoint_is_zero_and_caputo_kills_constants(
        c in -5.0..5.0f64,
        a_raw in 0.05..0.95f64,
    ) {
        let f = SampledFunction::from_fn(grid01(21), |_| c).unwrap();
        let alpha = order(a_raw);
        prop_assert_eq!(fractional_integral(Side::Left, alpha, &f).values()[0], 0.0);
        prop_assert_eq!(*fractional_integral(Side::Right, alpha, &f).values().last().unwrap(), 0.0);
        for v in caputo_derivative(Side::Left, alpha, &f).values() {
            prop_assert_eq!(*v, 0.0);
        }
    }
}
