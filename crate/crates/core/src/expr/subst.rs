use std::collections::BTreeMap;

use super::{canonicalize, Expr, ExprError, Role, Symbol};

pub type Bindings = BTreeMap<Symbol, Expr>;

/// Simultaneous substitution followed by canonicalization.
pub fn substitute(e: &Expr, bindings: &Bindings) -> Result<Expr, ExprError> {
    let bound = e.bound_symbols();
    for (k, v) in bindings {
        if k.role() == Role::Bound || bound.contains(k) {
            return Err(ExprError::BoundSubstitution(k.name().to_string()));
        }
        if let Some(s) = v.free_symbols().intersection(&bound).next() {
            return Err(ExprError::BoundSubstitution(s.name().to_string()));
        }
    }
    Ok(canonicalize(&replace(e, bindings)?))
}

pub(crate) fn replace(e: &Expr, b: &Bindings) -> Result<Expr, ExprError> {
    Ok(match e {
        Expr::Num(_) => e.clone(),
        Expr::Sym(s) => b.get(s).cloned().unwrap_or_else(|| e.clone()),
        Expr::Add(xs) => Expr::Add(xs.iter().map(|x| replace(x, b)).collect::<Result<_, _>>()?),
        Expr::Mul(xs) => Expr::Mul(xs.iter().map(|x| replace(x, b)).collect::<Result<_, _>>()?),
        Expr::Pow(x, q) => Expr::Pow(Box::new(replace(x, b)?), q.clone()),
        Expr::Sin(a) => Expr::Sin(Box::new(replace(a, b)?)),
        Expr::Cos(a) => Expr::Cos(Box::new(replace(a, b)?)),
        Expr::Exp(a) => Expr::Exp(Box::new(replace(a, b)?)),
        Expr::Derivative { .. } => replace(&canonicalize(e), b)?,
        Expr::Integral {
            integrand,
            bound,
            lower,
            upper,
        } => {
            let mut inner = b.clone();
            inner.remove(bound);
            let upper = match b.get(upper) {
                None => upper.clone(),
                Some(Expr::Sym(s)) => s.clone(),
                Some(_) => return Err(ExprError::LimitSubstitution(upper.name().to_string())),
            };
            Expr::Integral {
                integrand: Box::new(replace(integrand, &inner)?),
                bound: bound.clone(),
                lower: Box::new(replace(lower, b)?),
                upper,
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::equals;

    #[test]
    fn linear_shift_of_oscillator() {
        let th = Symbol::independent("theta");
        let u = Symbol::dependent("u");
        let u_tt = Symbol::dependent("u_theta_theta");
        let u1 = Symbol::dependent("u1");
        let u1_tt = Symbol::dependent("u1_theta_theta");
        let mu = Symbol::parameter("mu").expr();
        let l = Symbol::parameter("L").expr();
        let _ = th;
        let e = u_tt.expr() + u.expr();
        let k = mu * l.powi(-2);
        let out = substitute(
            &e,
            &Bindings::from([(u.clone(), u1.expr() + k.clone()), (u_tt, u1_tt.expr())]),
        )
        .unwrap();
        assert!(equals(&out, &(u1_tt.expr() + u1.expr() + k)));
    }

    #[test]
    fn radius_to_inverse() {
        let r = Symbol::dependent("r");
        let u = Symbol::dependent("u");
        let thd = Symbol::dependent("thetadot").expr();
        let e = r.expr().powi(2) * thd.clone();
        let out = substitute(&e, &Bindings::from([(r, u.expr().recip())])).unwrap();
        assert!(equals(&out, &(thd / u.expr().powi(2))));
    }

    #[test]
    fn cone_angle_collapses() {
        let s = Symbol::parameter("S");
        let l = Symbol::parameter("L").expr();
        let lam = Symbol::parameter("lambda").expr();
        let e = s.expr().powi(2) * (Expr::one() + lam.clone().powi(2) * l.clone().powi(-2));
        let sv = l.clone() * (l.powi(2) + lam.powi(2)).pow(crate::expr::rational(-1, 2));
        let out = substitute(&e, &Bindings::from([(s, sv)])).unwrap();
        assert_eq!(out, Expr::one());
    }

    #[test]
    fn binding_bound_symbol_is_error() {
        let th = Symbol::independent("theta");
        let s = Symbol::bound("s");
        let e = Expr::integral(s.expr(), &s, Expr::zero(), &th);
        assert!(substitute(&e, &Bindings::from([(s.clone(), Expr::one())])).is_err());
        let x = Symbol::parameter("x");
        let e2 = e.clone() * x.expr();
        assert!(substitute(&e2, &Bindings::from([(x, s.expr())])).is_err());
    }
}
