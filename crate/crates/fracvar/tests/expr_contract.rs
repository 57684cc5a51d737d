//! The derivative/evaluation consistency contract and the print/parse
//! round-trip on generated trees.

use fracvar::expr::{parse, BinaryOp, EvalEnv, Expr, UnaryOp, Var};
use proptest::prelude::*;
use rand::Rng;
use rand::SeedableRng;

/// Every expression used anywhere in the test suite, with an environment
/// sampler keeping it inside its smooth domain.
const CORPUS: &[(&str, usize, usize)] = &[
    ("0.5*D[y1]^2", 1, 0),
    ("D[y1]^2", 1, 0),
    ("0.5*D[y1]^2 - y1", 1, 0),
    ("y1", 1, 0),
    ("1", 1, 0),
    ("x*y1", 1, 0),
    ("sin(y1)", 1, 0),
    ("0.5*D[y1]^2 + 0.5*y1^2 - x*y1", 1, 0),
    ("0.5*(D[y1]-1)^2", 1, 0),
    ("cos(x)*y1 + exp(y1/4)", 1, 0),
    ("sqrt(1 + y1^2)", 1, 0),
    ("log(2 + y1)", 1, 0),
    ("0.5*D[y1]^2 + 0.25*D[y2]^2 + y1*y2", 2, 0),
    ("y1 - lam1*y2 + lam2*x", 2, 2),
    ("D[y1]^2 - lam1*y1", 1, 1),
];

fn central_difference(
    e: &Expr,
    var: Var,
    x: f64,
    y: &mut [f64],
    dy: &mut [f64],
    lam: &mut [f64],
) -> f64 {
    let h = 1e-6;
    let mut probe = |delta: f64| -> f64 {
        let mut x_loc = x;
        match var {
            Var::X => x_loc += delta,
            Var::Y(i) => y[i] += delta,
            Var::Dy(i) => dy[i] += delta,
            Var::Lam(j) => lam[j] += delta,
        }
        let v = e
            .eval(&EvalEnv::new(x_loc, y, dy, lam))
            .expect("corpus environments stay in-domain");
        match var {
            Var::X => {}
            Var::Y(i) => y[i] -= delta,
            Var::Dy(i) => dy[i] -= delta,
            Var::Lam(j) => lam[j] -= delta,
        }
        v
    };
    let plus = probe(h);
    let minus = probe(-h);
    (plus - minus) / (2.0 * h)
}

/// |partial - central difference| <= 1e-5 * (1 + |value|) over 100 random
/// environments per expression and variable.
#[test]
fn partials_match_central_differences_on_corpus() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for &(text, n, r) in CORPUS {
        let e = parse(text, n, r).unwrap();
        let mut vars = vec![Var::X];
        for i in 0..n {
            vars.push(Var::Y(i));
            vars.push(Var::Dy(i));
        }
        for j in 0..r {
            vars.push(Var::Lam(j));
        }
        for var in vars {
            let d = e.partial(var);
            for _ in 0..100 {
                // Environments kept away from log/sqrt domain edges.
                let x: f64 = rng.random_range(0.1..1.0);
                let mut y: Vec<f64> = (0..n).map(|_| rng.random_range(-1.5..1.5)).collect();
                let mut dy: Vec<f64> = (0..n).map(|_| rng.random_range(-1.5..1.5)).collect();
                let mut lam: Vec<f64> = (0..r).map(|_| rng.random_range(-2.0..2.0)).collect();
                let analytic = d
                    .eval(&EvalEnv::new(x, &y, &dy, &lam))
                    .expect("derivative evaluates on the corpus domain");
                let numeric = central_difference(&e, var, x, &mut y, &mut dy, &mut lam);
                assert!(
                    (analytic - numeric).abs() <= 1e-5 * (1.0 + analytic.abs()),
                    "{text}, d/d{var}: {analytic} vs {numeric}"
                );
            }
        }
    }
}

#[test]
fn corpus_round_trips_structurally() {
    for &(text, n, r) in CORPUS {
        let e = parse(text, n, r).unwrap();
        let printed = e.to_string();
        let reparsed = parse(&printed, n, r).unwrap();
        assert_eq!(e, reparsed, "{text} printed as {printed}");
    }
}

// ---------------------------------------------------------------------------
// random tree round-trip
// ---------------------------------------------------------------------------

fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0u8..100).prop_map(|c| Expr::Const(c as f64 / 8.0)),
        Just(Expr::Var(Var::X)),
        Just(Expr::Var(Var::Y(0))),
        Just(Expr::Var(Var::Dy(0))),
        Just(Expr::Var(Var::Y(1))),
    ];
    leaf.prop_recursive(6, 48, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone(), 0u8..5).prop_map(|(l, r, op)| {
                let op = [
                    BinaryOp::Add,
                    BinaryOp::Sub,
                    BinaryOp::Mul,
                    BinaryOp::Div,
                    BinaryOp::Pow,
                ][op as usize];
                Expr::Binary(op, Box::new(l), Box::new(r))
            }),
            (inner, 0u8..6).prop_map(|(c, op)| {
                let op = [
                    UnaryOp::Neg,
                    UnaryOp::Sin,
                    UnaryOp::Cos,
                    UnaryOp::Exp,
                    UnaryOp::Log,
                    UnaryOp::Sqrt,
                ][op as usize];
                Expr::Unary(op, Box::new(c))
            }),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    /// Printing any AST and reparsing it reproduces the tree exactly.
    #[test]
    fn printed_trees_reparse_identically(e in arb_expr()) {
        let printed = e.to_string();
        let reparsed = parse(&printed, 2, 0)
            .unwrap_or_else(|err| panic!("printed `{printed}` failed to parse: {err}"));
        prop_assert_eq!(e, reparsed, "printed: {}", printed);
    }
}
