use dualcurve::corpus::make_example;
use dualcurve::curves::Piece;
use dualcurve::expr::{eval_jet2, eval_value, parse_expression, ExprNode, Params};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn params() -> Params {
    Params::from([("p".to_string(), 1.5), ("k".to_string(), -0.75)])
}

/// Expressions in `x`, `p` and `k` with constant exponents.
fn expr_tree() -> impl Strategy<Value = ExprNode> {
    let leaf = prop_oneof![
        (-5.0f64..5.0).prop_map(ExprNode::Const),
        (0u32..20).prop_map(|n| ExprNode::Const(n as f64)),
        Just(ExprNode::Var),
        Just(ExprNode::Param("p".into())),
        Just(ExprNode::Param("k".into())),
    ];
    leaf.prop_recursive(5, 48, 2, |inner| {
        let b = |e: ExprNode| Box::new(e);
        prop_oneof![
            inner.clone().prop_map(move |e| ExprNode::Neg(b(e))),
            (inner.clone(), inner.clone()).prop_map(move |(l, r)| ExprNode::Add(b(l), b(r))),
            (inner.clone(), inner.clone()).prop_map(move |(l, r)| ExprNode::Sub(b(l), b(r))),
            (inner.clone(), inner.clone()).prop_map(move |(l, r)| ExprNode::Mul(b(l), b(r))),
            (inner.clone(), inner.clone()).prop_map(move |(l, r)| ExprNode::Div(b(l), b(r))),
            (inner.clone(), 0u32..4).prop_map(move |(l, n)| ExprNode::Pow(b(l), b(ExprNode::Const(n as f64)))),
            (inner.clone(), prop_oneof![Just("p"), Just("k")])
                .prop_map(move |(l, n)| ExprNode::Pow(b(l), b(ExprNode::Param(n.into())))),
            inner.clone().prop_map(move |e| ExprNode::Sqrt(b(e))),
            inner.prop_map(move |e| ExprNode::Abs(b(e))),
        ]
    })
}

fn same(a: f64, b: f64) -> bool {
    (a.is_nan() && b.is_nan()) || a == b || (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #[test]
    fn parse_never_panics(src in "\\PC{0,40}") {
        let _ = parse_expression(&src);
    }

    #[test]
    fn parse_never_panics_on_expression_alphabet(src in "[x0-9pk+*/^(). eE-]{0,30}|sqrt\\([x0-9+*/^ -]{0,12}\\)") {
        let _ = parse_expression(&src);
    }

    #[test]
    fn display_round_trips(e in expr_tree(), xs in prop::collection::vec(-3.0f64..3.0, 20)) {
        let text = e.to_string();
        let back = parse_expression(&text).map_err(|err| TestCaseError::fail(format!("{text}: {err}")))?;
        let ps = params();
        for x in xs {
            match (eval_jet2(&e, x, &ps), eval_jet2(&back, x, &ps)) {
                (Ok(a), Ok(b)) => {
                    prop_assert!(same(a.value, b.value) && same(a.d1, b.d1) && same(a.d2, b.d2),
                        "{text} at {x}: {a:?} vs {b:?}");
                }
                (Err(_), Err(_)) => {}
                (a, b) => prop_assert!(false, "{text} at {x}: {a:?} vs {b:?}"),
            }
        }
    }
}

/// Expressions with their domains, taken from the worked examples.
fn corpus_expressions() -> Vec<(ExprNode, Params, f64, f64)> {
    let mut out = Vec::new();
    for (id, p) in [(1, None), (2, Some(0.5)), (2, Some(1.0)), (2, Some(2.0)), (3, Some(2.0)), (3, Some(4.0)), (5, None)] {
        for piece in make_example(id, p).unwrap().original.pieces() {
            if let Piece::Arc(arc) = piece {
                let (lo, hi) = arc.domain();
                out.push((arc.expr().clone(), arc.params().clone(), lo, hi));
            }
        }
    }
    out
}

#[test]
fn derivatives_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let h = 1e-5;
    for (e, ps, lo, hi) in corpus_expressions() {
        // Stay clear of the endpoints, where some arcs have vertical tangents.
        let margin = 0.02 * (hi - lo);
        for _ in 0..100 {
            let x = rng.gen_range(lo + margin..hi - margin);
            let j = eval_jet2(&e, x, &ps).unwrap();
            let f = |t: f64| eval_value(&e, t, &ps).unwrap();
            let d1 = (f(x + h) - f(x - h)) / (2.0 * h);
            let d2 = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
            assert!((j.d1 - d1).abs() <= 1e-6 * (1.0 + j.d1.abs()), "{e} at {x}: {} vs {d1}", j.d1);
            assert!((j.d2 - d2).abs() <= 1e-4 * (1.0 + j.d2.abs()), "{e} at {x}: {} vs {d2}", j.d2);
        }
    }
}

#[test]
fn exponents_in_x_are_rejected() {
    assert!(parse_expression("2^x").is_err());
    assert!(parse_expression("x^(p+1)").is_ok());
}
