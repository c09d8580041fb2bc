use orbsym::expr::{
    canonicalize, differentiate, equals, eval_numeric, substitute, Bindings, Env, Expr, Symbol,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn x() -> Symbol {
    Symbol::dependent("x")
}
fn y() -> Symbol {
    Symbol::dependent("y")
}
fn a() -> Symbol {
    Symbol::parameter("a")
}

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        Just(x().expr()),
        Just(y().expr()),
        Just(a().expr()),
        (-3i64..=3).prop_map(Expr::int),
        (1i64..=4).prop_map(|d| Expr::rat(1, d)),
    ]
}

fn tree() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(8, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(p, q)| p + q),
            (inner.clone(), inner.clone()).prop_map(|(p, q)| p * q),
            (inner.clone(), inner.clone()).prop_map(|(p, q)| p - q),
            inner.clone().prop_map(|p| p.powi(2)),
            inner.clone().prop_map(|p| p.sin()),
            inner.clone().prop_map(|p| p.cos()),
            inner.clone().prop_map(|p| (p * Expr::rat(1, 4)).exp()),
        ]
    })
}

/// Trees that may also divide, for numeric checks away from poles.
fn rational_tree() -> impl Strategy<Value = Expr> {
    tree().prop_flat_map(|t| {
        prop_oneof![
            Just(t.clone()),
            Just(t.clone() / (x().expr().powi(2) + Expr::one())),
            Just(t.clone() * y().expr().recip()),
        ]
    })
}

fn env_at(rng: &mut ChaCha8Rng) -> Env<f64> {
    [("x", rng.gen_range(0.5..1.5)), ("y", rng.gen_range(0.5..1.5)), ("a", rng.gen_range(-1.0..1.0))]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 96, ..ProptestConfig::default() })]

    #[test]
    fn canonicalize_is_idempotent(e in tree()) {
        let once = canonicalize(&e);
        prop_assert_eq!(canonicalize(&once), once);
    }

    #[test]
    fn canonical_form_preserves_value(e in rational_tree(), seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = canonicalize(&e);
        for _ in 0..5 {
            let env = env_at(&mut rng);
            let (Ok(v0), Ok(v1)) = (eval_numeric(&e, &env, 1e-12), eval_numeric(&c, &env, 1e-12)) else {
                continue;
            };
            if v0.abs() > 1e6 { continue; }
            prop_assert!(rel(v0, v1) < 1e-9, "{} vs {}", v0, v1);
        }
    }

    #[test]
    fn derivative_matches_central_differences(e in rational_tree(), seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = differentiate(&e, &x()).unwrap();
        let h = 1e-5;
        for _ in 0..100 {
            let env = env_at(&mut rng);
            let mut lo = env.clone();
            let mut hi = env.clone();
            *lo.get_mut("x").unwrap() -= h;
            *hi.get_mut("x").unwrap() += h;
            let (Ok(fl), Ok(fh), Ok(dv)) = (
                eval_numeric(&e, &lo, 1e-12),
                eval_numeric(&e, &hi, 1e-12),
                eval_numeric(&d, &env, 1e-12),
            ) else { continue };
            if dv.abs() > 1e4 || fl.abs() > 1e4 { continue; }
            let fd = (fh - fl) / (2.0 * h);
            prop_assert!(rel(fd, dv) < 1e-6, "fd {} vs {}", fd, dv);
        }
    }

    #[test]
    fn equal_expressions_agree_numerically(e in tree(), seed in 0u64..1000) {
        // e and an algebraically rearranged copy
        let other = (e.clone() + x().expr()) * Expr::int(2) / Expr::int(2) - x().expr();
        prop_assert!(equals(&e, &other));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..5 {
            let env = env_at(&mut rng);
            if let (Ok(p), Ok(q)) = (eval_numeric(&e, &env, 1e-12), eval_numeric(&other, &env, 1e-12)) {
                prop_assert!((p - q).abs() < 1e-9 * p.abs().max(1.0));
            }
        }
    }

    #[test]
    fn substitution_commutes_with_differentiation(e in tree(), c in -3i64..=3) {
        let binding = Bindings::from([(a(), Expr::int(c))]);
        let lhs = differentiate(&substitute(&e, &binding).unwrap(), &x()).unwrap();
        let rhs = substitute(&differentiate(&e, &x()).unwrap(), &binding).unwrap();
        prop_assert!(equals(&lhs, &rhs));
    }
}

#[test]
fn second_derivative_identity_behind_reciprocal_radius() {
    // u2²(w1''/w1² − 2w1'²/w1³) = −u2²·(1/w1)''  with w1 = w1(y)
    let yv = Symbol::independent("y");
    let w1 = Symbol::dependent("w1");
    let w1p = Symbol::dependent("w1_y");
    let w1pp = Symbol::dependent("w1_y_y");
    let u2 = Symbol::dependent("u2").expr();
    let chain = [(w1.clone(), w1p.expr()), (w1p.clone(), w1pp.expr())];
    let inv = w1.expr().recip();
    let d1 = orbsym::expr::total_derivative(&inv, &yv, &chain).unwrap();
    let d2 = orbsym::expr::total_derivative(&d1, &yv, &chain).unwrap();
    let lhs = u2.clone().powi(2)
        * (w1pp.expr() / w1.expr().powi(2) - Expr::int(2) * w1p.expr().powi(2) / w1.expr().powi(3));
    let rhs = -(u2.powi(2) * d2);
    assert!(equals(&lhs, &rhs));

    // numeric agreement at 100 random points
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let env: Env<f64> = [
            ("w1", rng.gen_range(0.2..3.0)),
            ("w1_y", rng.gen_range(-2.0..2.0)),
            ("w1_y_y", rng.gen_range(-2.0..2.0)),
            ("u2", rng.gen_range(-2.0..2.0)),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
        let p = eval_numeric(&lhs, &env, 1e-12).unwrap();
        let q = eval_numeric(&rhs, &env, 1e-12).unwrap();
        assert!((p - q).abs() < 1e-9 * p.abs().max(1.0));
    }
}

#[test]
fn integral_derivative_matches_quadrature_differences() {
    let th = Symbol::independent("theta");
    let s = Symbol::bound("s");
    let al = Symbol::parameter("alpha").expr();
    let be = Symbol::parameter("beta").expr();
    let e = Expr::integral(
        (th.expr() - s.expr()).sin() * (al * s.expr() + be).powi(-2),
        &s,
        Expr::zero(),
        &th,
    );
    let d = differentiate(&e, &th).unwrap();
    let at = |theta: f64| -> Env<f64> {
        [("alpha", 1.0), ("beta", 2.0), ("theta", theta)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect()
    };
    let h = 1e-4;
    let fd = (eval_numeric(&e, &at(1.0 + h), 1e-13).unwrap() - eval_numeric(&e, &at(1.0 - h), 1e-13).unwrap())
        / (2.0 * h);
    let dv = eval_numeric(&d, &at(1.0), 1e-13).unwrap();
    assert!((fd - dv).abs() < 1e-6, "{fd} vs {dv}");
}
