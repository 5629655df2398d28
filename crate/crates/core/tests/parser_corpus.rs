use fixlab::builtin::{builtin_lookup, Builtin, EX31_SOURCE, EX32PHI_SOURCE, EX32_SOURCE};
use fixlab::expr::{parse, Arity, BinOp, Expr, Func, ParseErrorKind, RelOp, Var};
use fixlab::sampling::SplitMix64;
use proptest::prelude::*;

mod common;
use common::{CANONICAL_CASES, ERROR_CASES, VALUE_CASES};

fn ev1(src: &str, x: f64) -> f64 {
    parse(src, Arity::One)
        .unwrap_or_else(|e| panic!("{src}: {e}"))
        .eval(x, None)
        .unwrap_or_else(|e| panic!("{src}: {e}"))
}

#[test]
fn value_corpus() {
    for &(src, x, want) in VALUE_CASES {
        assert_eq!(ev1(src, x), want, "{src} at x = {x}");
    }
}

#[test]
fn two_variable_expressions() {
    let e = parse("pow(abs(x-y),2)", Arity::Two).unwrap();
    assert_eq!(e.eval(0.0, Some(1.0)).unwrap(), 1.0);
    assert!(e.uses_y());
    let e = parse("abs(x - y) / (1 + abs(x - y))", Arity::Two).unwrap();
    assert_eq!(e.eval(0.0, Some(1.0)).unwrap(), 0.5);
    assert!(!parse("x + 1", Arity::Two).unwrap().uses_y());
}

#[test]
fn tree_shapes() {
    let x = || Box::new(Expr::Var(Var::X));
    let n = |v: f64| Box::new(Expr::Num(v));
    assert_eq!(
        parse("x/4", Arity::One).unwrap(),
        Expr::Binary(BinOp::Div, x(), n(4.0))
    );
    assert_eq!(
        parse("x-1-2", Arity::One).unwrap(),
        Expr::Binary(
            BinOp::Sub,
            Box::new(Expr::Binary(BinOp::Sub, x(), n(1.0))),
            n(2.0)
        )
    );
    assert_eq!(
        parse("x^2^3", Arity::One).unwrap(),
        Expr::Binary(
            BinOp::Pow,
            x(),
            Box::new(Expr::Binary(BinOp::Pow, n(2.0), n(3.0)))
        )
    );
    assert_eq!(
        parse("-x^2", Arity::One).unwrap(),
        Expr::Binary(BinOp::Pow, Box::new(Expr::Neg(x())), n(2.0))
    );
    assert_eq!(
        parse("if(x<0.5, x/4, x/5)", Arity::One).unwrap(),
        Expr::If {
            op: RelOp::Lt,
            lhs: x(),
            rhs: n(0.5),
            then: Box::new(Expr::Binary(BinOp::Div, x(), n(4.0))),
            otherwise: Box::new(Expr::Binary(BinOp::Div, x(), n(5.0))),
        }
    );
    assert_eq!(
        parse("max(x, 2)", Arity::One).unwrap(),
        Expr::Call(Func::Max, vec![Expr::Var(Var::X), Expr::Num(2.0)])
    );
}

#[test]
fn error_corpus() {
    for &(src, offset) in ERROR_CASES {
        let err = parse(src, Arity::One).expect_err(src);
        assert_eq!(err.offset, offset, "{src}: {err}");
    }
}

#[test]
fn error_kinds() {
    let err = parse("1+", Arity::One).unwrap_err();
    for want in ["number", "variable", "function call"] {
        assert!(err.expected().contains(&want), "{err}");
    }
    assert!(err.to_string().contains("offset 3"), "{err}");
    assert!(matches!(
        parse("x + y", Arity::One).unwrap_err().kind,
        ParseErrorKind::VariableNotAllowed(_)
    ));
    assert!(matches!(
        parse("foo(x)", Arity::One).unwrap_err().kind,
        ParseErrorKind::UnknownIdentifier(_)
    ));
    assert!(matches!(
        parse("min(x)", Arity::One).unwrap_err().kind,
        ParseErrorKind::WrongArgCount {
            expected: 2,
            found: 1,
            ..
        }
    ));
    assert_eq!(
        parse(" ", Arity::One).unwrap_err().kind,
        ParseErrorKind::Empty
    );
}

#[test]
fn canonical_forms() {
    for &(src, want) in CANONICAL_CASES {
        let e = parse(src, Arity::One).unwrap();
        assert_eq!(e.to_string(), want);
        assert_eq!(parse(want, Arity::One).unwrap(), e, "{want}");
    }
}

#[test]
fn builtin_sources_match_builtins() {
    for (name, src) in [("ex31", EX31_SOURCE), ("ex32", EX32_SOURCE)] {
        let Ok(Builtin::Map(m)) = builtin_lookup(name) else {
            panic!("{name}")
        };
        assert_eq!(m.func().expr().unwrap(), &parse(src, Arity::One).unwrap());
    }
    let Ok(Builtin::Phi(p)) = builtin_lookup("ex32phi") else {
        panic!()
    };
    assert_eq!(
        p.func().expr().unwrap(),
        &parse(EX32PHI_SOURCE, Arity::One).unwrap()
    );
}

#[test]
fn ex31_text_agrees_bit_exactly_with_builtin() {
    let text = parse("if(x<0.5, x/4, x/5)", Arity::One).unwrap();
    let Ok(Builtin::Map(ex31)) = builtin_lookup("ex31") else {
        panic!()
    };
    let mut rng = SplitMix64::new(0);
    for _ in 0..10_000 {
        let t = rng.next_in(0.0, 1.0);
        let a = text.eval(t, None).unwrap();
        let b = ex31.eval(t).unwrap();
        assert_eq!(a.to_bits(), b.to_bits(), "t = {t}");
    }
}

fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0.0f64..1e6).prop_map(Expr::Num),
        prop::sample::select(vec![0.0, 0.5, 1e-7, 1e21, 0.1]).prop_map(Expr::Num),
        Just(Expr::Var(Var::X)),
        Just(Expr::Var(Var::Y)),
    ];
    leaf.prop_recursive(5, 48, 3, |inner| {
        let bin = prop::sample::select(vec![
            BinOp::Add,
            BinOp::Sub,
            BinOp::Mul,
            BinOp::Div,
            BinOp::Pow,
        ]);
        let rel = prop::sample::select(vec![RelOp::Lt, RelOp::Le, RelOp::Gt, RelOp::Ge]);
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
            (bin, inner.clone(), inner.clone()).prop_map(|(op, a, b)| Expr::Binary(
                op,
                Box::new(a),
                Box::new(b)
            )),
            inner.clone().prop_map(|a| Expr::Call(Func::Abs, vec![a])),
            inner.clone().prop_map(|a| Expr::Call(Func::Sqrt, vec![a])),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Call(Func::Min, vec![a, b])),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Call(Func::Pow, vec![a, b])),
            (rel, inner.clone(), inner.clone(), inner.clone(), inner).prop_map(
                |(op, l, r, t, o)| Expr::If {
                    op,
                    lhs: Box::new(l),
                    rhs: Box::new(r),
                    then: Box::new(t),
                    otherwise: Box::new(o),
                }
            ),
        ]
    })
}

proptest! {
    #[test]
    fn print_then_parse_is_identity(e in arb_expr()) {
        let text = e.to_string();
        let back = parse(&text, Arity::Two).map_err(|err| TestCaseError::fail(format!("{text}: {err}")))?;
        prop_assert_eq!(back, e, "{}", text);
    }

    #[test]
    fn printing_is_a_fixed_point(e in arb_expr()) {
        let once = e.to_string();
        let twice = parse(&once, Arity::Two).unwrap().to_string();
        prop_assert_eq!(once, twice);
    }
}
