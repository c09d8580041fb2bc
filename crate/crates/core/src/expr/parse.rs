//! Infix parser for user-supplied expressions such as `exp(-t)`.

use num_bigint::BigInt;
use num_traits::pow;

use super::{canonicalize, Expr, ExprError, Rational, Symbol};

struct Parser<'a, F> {
    src: &'a [u8],
    pos: usize,
    resolve: F,
}

/// Parses `+ - * / ^`, parentheses, decimal numbers, identifiers and the
/// functions `sin`, `cos`, `exp`, `sqrt`. Identifiers are mapped to symbols by
/// `resolve`. Exponents must reduce to rational constants.
pub fn parse_infix<F: Fn(&str) -> Symbol>(text: &str, resolve: F) -> Result<Expr, ExprError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        resolve,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

impl<F: Fn(&str) -> Symbol> Parser<'_, F> {
    fn err(&self, msg: &str) -> ExprError {
        ExprError::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = acc + self.term()?;
            } else if self.eat(b'-') {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc = acc * self.unary()?;
            } else if self.eat(b'/') {
                acc = acc / self.unary()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.eat(b'-') {
            return Ok(-self.unary()?);
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let at = self.pos;
            let exp = canonicalize(&self.unary()?);
            match exp {
                Expr::Num(q) => Ok(base.pow(q)),
                _ => Err(ExprError::Parse {
                    pos: at,
                    msg: "exponent must be a rational constant".into(),
                }),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default();
                let func: Option<fn(Expr) -> Expr> = match name {
                    "sin" => Some(Expr::sin),
                    "cos" => Some(Expr::cos),
                    "exp" => Some(Expr::exp),
                    "sqrt" => Some(Expr::sqrt),
                    _ => None,
                };
                if let Some(f) = func {
                    if !self.eat(b'(') {
                        return Err(self.err("expected `(` after function name"));
                    }
                    let arg = self.expr()?;
                    if !self.eat(b')') {
                        return Err(self.err("expected `)`"));
                    }
                    return Ok(f(arg));
                }
                Ok((self.resolve)(name).expr())
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        let mut int_part = String::new();
        let mut frac_part = String::new();
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            int_part.push(self.src[self.pos] as char);
            self.pos += 1;
        }
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                frac_part.push(self.src[self.pos] as char);
                self.pos += 1;
            }
        }
        if int_part.is_empty() && frac_part.is_empty() {
            self.pos = start;
            return Err(self.err("malformed number"));
        }
        let digits: BigInt = format!("{int_part}{frac_part}")
            .parse::<BigInt>()
            .map_err(|_| self.err("malformed number"))?;
        let scale = pow(BigInt::from(10), frac_part.len());
        Ok(Expr::Num(Rational::new(digits, scale)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::equals;

    fn param(name: &str) -> Symbol {
        if name == "t" {
            Symbol::independent(name)
        } else {
            Symbol::parameter(name)
        }
    }

    #[test]
    fn exponential_drag_profile() {
        let e = parse_infix("exp(-t)", param).unwrap();
        let t = Symbol::independent("t");
        assert!(equals(&e, &(-t.expr()).exp()));
    }

    #[test]
    fn precedence_and_decimals() {
        let e = parse_infix("1 + 2*x^2 - 0.5/x", param).unwrap();
        let x = Symbol::parameter("x").expr();
        let want = Expr::one() + Expr::int(2) * x.clone().powi(2) - Expr::rat(1, 2) / x;
        assert!(equals(&e, &want));
    }

    #[test]
    fn errors_carry_position() {
        assert!(matches!(parse_infix("exp(-t", param), Err(ExprError::Parse { .. })));
        assert!(matches!(parse_infix("x^y", param), Err(ExprError::Parse { pos: 2, .. })));
        assert!(parse_infix("2 $ 3", param).is_err());
    }
}
