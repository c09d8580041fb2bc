use std::collections::BTreeMap;

use num_traits::{One, ToPrimitive};

use super::{canonicalize, is_integer, Expr, ExprError, Rational};
use crate::{quadrature, Real};

/// Numeric environment keyed by symbol name.
pub type Env<T> = BTreeMap<String, T>;

fn finite<T: Real>(x: T, what: &str) -> Result<T, ExprError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(ExprError::NonFinite(what.to_string()))
    }
}

fn rat<T: Real>(q: &Rational) -> T {
    T::lit(q.to_f64().unwrap_or(f64::NAN))
}

/// Evaluates `e` numerically. Integral nodes are computed by adaptive
/// quadrature to `quad_tol`; dependent symbols inside an integrand take their
/// values from `env` (frozen along the path).
pub fn eval_numeric<T: Real>(e: &Expr, env: &Env<T>, quad_tol: T) -> Result<T, ExprError> {
    match e {
        Expr::Num(c) => Ok(rat(c)),
        Expr::Sym(s) => env
            .get(s.name())
            .copied()
            .ok_or_else(|| ExprError::Unbound(s.name().to_string())),
        Expr::Add(xs) => {
            let mut acc = T::zero();
            for x in xs {
                acc = acc + eval_numeric(x, env, quad_tol)?;
            }
            finite(acc, "sum")
        }
        Expr::Mul(xs) => {
            let mut acc = T::one();
            for x in xs {
                acc = acc * eval_numeric(x, env, quad_tol)?;
            }
            finite(acc, "product")
        }
        Expr::Pow(b, q) => {
            let base = eval_numeric(b, env, quad_tol)?;
            let v = if is_integer(q) {
                base.powi(q.to_integer().to_i32().unwrap_or(i32::MAX))
            } else if q.denom() == &num_bigint::BigInt::from(2) && q.numer().is_one() {
                base.sqrt()
            } else {
                base.powf(rat(q))
            };
            finite(v, "power")
        }
        Expr::Sin(a) => finite(eval_numeric(a, env, quad_tol)?.sin(), "sin"),
        Expr::Cos(a) => finite(eval_numeric(a, env, quad_tol)?.cos(), "cos"),
        Expr::Exp(a) => finite(eval_numeric(a, env, quad_tol)?.exp(), "exp"),
        Expr::Derivative { .. } => eval_numeric(&canonicalize(e), env, quad_tol),
        Expr::Integral {
            integrand,
            bound,
            lower,
            upper,
        } => {
            let a = eval_numeric(lower, env, quad_tol)?;
            let b = env
                .get(upper.name())
                .copied()
                .ok_or_else(|| ExprError::Unbound(upper.name().to_string()))?;
            let mut local = env.clone();
            let key = bound.name().to_string();
            let mut f = |s: T| {
                local.insert(key.clone(), s);
                eval_numeric(integrand, &local, quad_tol)
            };
            match quadrature::integrate(&mut f, a, b, quad_tol)? {
                Some(v) => finite(v, "integral"),
                None => Err(ExprError::Quadrature(bound.name().to_string())),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Symbol;

    fn env(pairs: &[(&str, f64)]) -> Env<f64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn constant_over_square() {
        let mu = Symbol::parameter("mu").expr();
        let l = Symbol::parameter("L").expr();
        let v = eval_numeric(&(mu * l.powi(-2)), &env(&[("mu", 1.0), ("L", 2.0)]), 1e-12).unwrap();
        assert_eq!(v, 0.25);
    }

    #[test]
    fn singularity_is_reported() {
        let r = Symbol::dependent("r").expr();
        let err = eval_numeric(&r.recip(), &env(&[("r", 0.0)]), 1e-12).unwrap_err();
        assert!(matches!(err, ExprError::NonFinite(_)));
    }

    #[test]
    fn unbound_symbol() {
        let r = Symbol::dependent("r").expr();
        assert!(matches!(
            eval_numeric::<f64>(&r, &Env::new(), 1e-12),
            Err(ExprError::Unbound(_))
        ));
    }

    #[test]
    fn drag_integral_agrees_across_tolerances() {
        let th = Symbol::independent("theta");
        let eta = Symbol::bound("eta");
        let l0 = Symbol::parameter("L0").expr();
        let a = Symbol::parameter("alpha").expr();
        let f = (th.expr() - eta.expr()).sin() * (l0 - a * eta.expr()).powi(-2);
        let e = Expr::integral(f, &eta, Expr::zero(), &th);
        let en = env(&[("theta", 1.0), ("L0", 2.0), ("alpha", 0.1)]);
        let coarse = eval_numeric(&e, &en, 1e-10).unwrap();
        let fine = eval_numeric(&e, &en, 5e-11).unwrap();
        assert!((coarse - fine).abs() < 1e-10);
        // frozen from a 2000-panel composite Simpson rule
        let n = 2000;
        let h = 1.0 / n as f64;
        let g = |s: f64| (1.0 - s).sin() / (2.0 - 0.1 * s).powi(2);
        let mut simpson = g(0.0) + g(1.0);
        for i in 1..n {
            simpson += if i % 2 == 1 { 4.0 } else { 2.0 } * g(i as f64 * h);
        }
        simpson *= h / 3.0;
        assert!((fine - simpson).abs() < 1e-10);
    }
}
