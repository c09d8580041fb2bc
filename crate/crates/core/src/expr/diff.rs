use super::subst::replace;
use super::{canonicalize, product, sum, Expr, ExprError, Role, Symbol};
use std::collections::BTreeMap;

/// Exact partial derivative of `e` with respect to `v`, canonicalized.
///
/// Integral nodes follow the Leibniz rule with a constant lower limit. Inside
/// an integrand, dependent symbols and independent symbols other than the
/// upper limit stand for values along the integration path, so they
/// contribute no interior term.
pub fn differentiate(e: &Expr, v: &Symbol) -> Result<Expr, ExprError> {
    if v.role() == Role::Bound || e.bound_symbols().contains(v) {
        return Err(ExprError::BoundDifferentiation(v.name().to_string()));
    }
    Ok(canonicalize(&raw(e, v)?))
}

/// Total derivative `D = ∂_indep + Σ rate_k ∂_{sym_k}`.
pub fn total_derivative(
    e: &Expr,
    indep: &Symbol,
    chain: &[(Symbol, Expr)],
) -> Result<Expr, ExprError> {
    let mut terms = vec![differentiate(e, indep)?];
    for (s, rate) in chain {
        let d = differentiate(e, s)?;
        if !d.is_num_zero() {
            terms.push(d * rate.clone());
        }
    }
    Ok(canonicalize(&sum(terms)))
}

fn raw(e: &Expr, v: &Symbol) -> Result<Expr, ExprError> {
    Ok(match e {
        Expr::Num(_) => Expr::zero(),
        Expr::Sym(s) => {
            if s == v {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Expr::Add(xs) => sum(xs.iter().map(|x| raw(x, v)).collect::<Result<Vec<_>, _>>()?),
        Expr::Mul(xs) => {
            let mut terms = Vec::with_capacity(xs.len());
            for i in 0..xs.len() {
                let d = raw(&xs[i], v)?;
                if d.is_num_zero() {
                    continue;
                }
                let mut fs: Vec<Expr> = xs
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, x)| x.clone())
                    .collect();
                fs.push(d);
                terms.push(product(fs));
            }
            sum(terms)
        }
        Expr::Pow(b, q) => {
            let d = raw(b, v)?;
            if d.is_num_zero() {
                Expr::zero()
            } else {
                let one = super::Rational::from_integer(1.into());
                Expr::Num(q.clone()) * (**b).clone().pow(q - one) * d
            }
        }
        Expr::Sin(a) => (**a).clone().cos() * raw(a, v)?,
        Expr::Cos(a) => -((**a).clone().sin()) * raw(a, v)?,
        Expr::Exp(a) => (**a).clone().exp() * raw(a, v)?,
        Expr::Derivative { .. } => raw(&canonicalize(e), v)?,
        Expr::Integral {
            integrand,
            bound,
            lower,
            upper,
        } => {
            let mut terms = Vec::new();
            if upper == v {
                let at_limit = replace(
                    integrand,
                    &BTreeMap::from([(bound.clone(), upper.expr())]),
                )?;
                terms.push(at_limit);
            }
            if v.role() == Role::Parameter || v == upper {
                let inner = canonicalize(&raw(integrand, v)?);
                if !inner.is_num_zero() {
                    terms.push(Expr::Integral {
                        integrand: Box::new(inner),
                        bound: bound.clone(),
                        lower: lower.clone(),
                        upper: upper.clone(),
                    });
                }
            }
            sum(terms)
        }
    })
}

/// Solves `e = 0` for `x` when `e` is affine in `x`.
pub fn solve_linear(e: &Expr, x: &Symbol) -> Result<Option<Expr>, ExprError> {
    let a = differentiate(e, x)?;
    if a.is_num_zero() || !differentiate(&a, x)?.is_num_zero() {
        return Ok(None);
    }
    let b = super::substitute(e, &BTreeMap::from([(x.clone(), Expr::zero())]))?;
    Ok(Some(canonicalize(&(-(b / a)))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::equals;

    #[test]
    fn table_derivative() {
        let th = Symbol::independent("theta");
        assert_eq!(differentiate(&th.expr().sin(), &th).unwrap(), canonicalize(&th.expr().cos()));
    }

    #[test]
    fn power_rule_behind_kepler_u1() {
        let w1 = Symbol::dependent("w1");
        let u2 = Symbol::dependent("u2");
        let mu = Symbol::parameter("mu");
        let e = mu.expr() - u2.expr().powi(2) / w1.expr();
        let d = differentiate(&e, &w1).unwrap();
        assert!(equals(&d, &(u2.expr().powi(2) / w1.expr().powi(2))));
    }

    #[test]
    fn bound_variable_is_rejected() {
        let th = Symbol::independent("theta");
        let s = Symbol::bound("s");
        let e = Expr::integral(s.expr().sin(), &s, Expr::zero(), &th);
        assert!(matches!(
            differentiate(&e, &s),
            Err(ExprError::BoundDifferentiation(_))
        ));
    }

    #[test]
    fn leibniz_with_variable_upper_limit() {
        let th = Symbol::independent("theta");
        let s = Symbol::bound("s");
        let e = Expr::integral((th.expr() - s.expr()).sin(), &s, Expr::zero(), &th);
        let d = differentiate(&e, &th).unwrap();
        let expected = Expr::integral((th.expr() - s.expr()).cos(), &s, Expr::zero(), &th);
        assert!(equals(&d, &expected));
    }

    #[test]
    fn path_integral_total_time_derivative_is_integrand() {
        let t = Symbol::independent("t");
        let tau = Symbol::bound("tau");
        let r = Symbol::dependent("r");
        let rdot = Symbol::dependent("rdot");
        let e = Expr::integral(r.expr().powi(2), &tau, Expr::zero(), &t);
        let d = total_derivative(&e, &t, &[(r.clone(), rdot.expr())]).unwrap();
        assert!(equals(&d, &r.expr().powi(2)));
    }
}
