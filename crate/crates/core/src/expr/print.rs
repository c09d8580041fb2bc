use num_traits::{One, Signed};

use super::{Expr, Rational};

fn rat(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub(super) fn prefix(e: &Expr) -> String {
    let list = |op: &str, xs: &[Expr]| {
        let mut s = format!("({op}");
        for x in xs {
            s.push(' ');
            s.push_str(&prefix(x));
        }
        s.push(')');
        s
    };
    match e {
        Expr::Num(c) => rat(c),
        Expr::Sym(s) => s.name().to_string(),
        Expr::Add(xs) => list("+", xs),
        Expr::Mul(xs) => list("*", xs),
        Expr::Pow(b, q) => format!("(^ {} {})", prefix(b), rat(q)),
        Expr::Sin(a) => format!("(sin {})", prefix(a)),
        Expr::Cos(a) => format!("(cos {})", prefix(a)),
        Expr::Exp(a) => format!("(exp {})", prefix(a)),
        Expr::Derivative { expr, var, order } => {
            format!("(d {} {} {})", prefix(expr), var.name(), order)
        }
        Expr::Integral {
            integrand,
            bound,
            lower,
            upper,
        } => format!(
            "(int {} {} {} {})",
            prefix(integrand),
            bound.name(),
            prefix(lower),
            upper.name()
        ),
    }
}

const GREEK: &[(&str, &str)] = &[
    ("alpha", "α"),
    ("beta", "β"),
    ("eta", "η"),
    ("lambda", "λ"),
    ("theta", "θ"),
    ("phi", "φ"),
    ("mu", "μ"),
    ("nu", "ν"),
    ("tau", "τ"),
];

const SUBSCRIPT: [char; 10] = ['₀', '₁', '₂', '₃', '₄', '₅', '₆', '₇', '₈', '₉'];

/// Display name: greek letters spelled out become glyphs, trailing digits
/// become subscripts, `dot`/`ddot` suffixes become accents, and `_x` jet
/// suffixes render as `,x`.
pub fn display_name(raw: &str) -> String {
    let mut parts = raw.split('_');
    let head = parts.next().unwrap_or_default();
    let mut out = display_head(head);
    let rest: Vec<String> = parts.map(display_head).collect();
    if !rest.is_empty() {
        out.push(',');
        out.push_str(&rest.concat());
    }
    out
}

fn display_head(head: &str) -> String {
    let (stem, accent) = if let Some(s) = head.strip_suffix("ddot") {
        (s, "\u{308}")
    } else if let Some(s) = head.strip_suffix("dot") {
        (s, "\u{307}")
    } else {
        (head, "")
    };
    let digits_at = stem
        .char_indices()
        .rev()
        .take_while(|(_, c)| c.is_ascii_digit())
        .last()
        .map(|(i, _)| i)
        .unwrap_or(stem.len());
    let (letters, digits) = stem.split_at(digits_at);
    let mut s = GREEK
        .iter()
        .find(|(k, _)| *k == letters)
        .map(|(_, g)| g.to_string())
        .unwrap_or_else(|| letters.to_string());
    s.push_str(accent);
    for d in digits.chars() {
        s.push(SUBSCRIPT[d.to_digit(10).unwrap_or(0) as usize]);
    }
    s
}

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Add(_) => 1,
        Expr::Mul(_) => 2,
        Expr::Num(c) if c.is_negative() || !c.denom().is_one() => 2,
        Expr::Pow(..) => 3,
        _ => 4,
    }
}

fn wrap(e: &Expr, min: u8) -> String {
    let s = infix(e);
    if prec(e) < min {
        format!("({s})")
    } else {
        s
    }
}

pub(super) fn infix(e: &Expr) -> String {
    match e {
        Expr::Num(c) => rat(c),
        Expr::Sym(s) => display_name(s.name()),
        Expr::Add(xs) => {
            let mut s = String::new();
            for (i, x) in xs.iter().enumerate() {
                let (neg, body) = split_sign(x);
                let body_s = wrap(&body, 1);
                match (i, neg) {
                    (0, false) => s.push_str(&body_s),
                    (0, true) => {
                        s.push('−');
                        s.push_str(&wrap(&body, 2));
                    }
                    (_, false) => {
                        s.push_str(" + ");
                        s.push_str(&body_s);
                    }
                    (_, true) => {
                        s.push_str(" − ");
                        s.push_str(&wrap(&body, 2));
                    }
                }
            }
            s
        }
        Expr::Mul(xs) => {
            let (neg, body) = split_sign(e);
            if neg {
                return format!("−{}", wrap(&body, 2));
            }
            xs.iter().map(|x| wrap(x, 2)).collect::<Vec<_>>().join("·")
        }
        Expr::Pow(b, q) => {
            if q == &Rational::new(1.into(), 2.into()) {
                format!("√({})", infix(b))
            } else if q.denom().is_one() && !q.is_negative() {
                format!("{}^{}", wrap(b, 4), rat(q))
            } else {
                format!("{}^({})", wrap(b, 4), rat(q))
            }
        }
        Expr::Sin(a) => format!("sin({})", infix(a)),
        Expr::Cos(a) => format!("cos({})", infix(a)),
        Expr::Exp(a) => format!("exp({})", infix(a)),
        Expr::Derivative { expr, var, order } => {
            format!("d^{order}/d{}^{order} ({})", display_name(var.name()), infix(expr))
        }
        Expr::Integral {
            integrand,
            bound,
            lower,
            upper,
        } => format!(
            "∫[{}..{}] {} d{}",
            infix(lower),
            display_name(upper.name()),
            wrap(integrand, 2),
            display_name(bound.name())
        ),
    }
}

fn split_sign(e: &Expr) -> (bool, Expr) {
    match e {
        Expr::Num(c) if c.is_negative() => (true, Expr::Num(-c.clone())),
        Expr::Mul(xs) => match xs.first() {
            Some(Expr::Num(c)) if c.is_negative() => {
                let c = -c.clone();
                let mut rest: Vec<Expr> = xs[1..].to_vec();
                if !c.is_one() {
                    rest.insert(0, Expr::Num(c));
                }
                let body = if rest.len() == 1 {
                    rest.pop().unwrap()
                } else {
                    Expr::Mul(rest)
                };
                (true, body)
            }
            _ => (false, e.clone()),
        },
        _ => (false, e.clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{canonicalize, Symbol};

    #[test]
    fn prefix_is_stable() {
        let mu = Symbol::parameter("mu").expr();
        let l = Symbol::parameter("L").expr();
        let e = canonicalize(&(Symbol::dependent("u").expr() - mu * l.powi(-2)));
        assert_eq!(e.to_prefix(), "(+ (* -1 (^ L -2) mu) u)");
    }

    #[test]
    fn display_names() {
        assert_eq!(display_name("u1"), "u₁");
        assert_eq!(display_name("u1_theta_theta"), "u₁,θθ");
        assert_eq!(display_name("thetadot"), "θ\u{307}");
        assert_eq!(display_name("L1"), "L₁");
        assert_eq!(display_name("lambda"), "λ");
    }

    #[test]
    fn infix_rendering() {
        let mu = Symbol::parameter("mu").expr();
        let l = Symbol::parameter("L").expr();
        let e = canonicalize(&(Symbol::dependent("u").expr() - mu * l.powi(-2)));
        assert_eq!(e.to_infix(), "−L^(-2)·μ + u");
    }
}
