use std::ops::{Add, Mul, Neg, Sub};

use super::{canonicalize, is_zero, Expr};

/// Formal complex pair `re + i·im` over real expressions.
///
/// Conjugate generator pairs such as those built on `e^{±iφ}` are carried in
/// this form; linear conditions hold for the pair iff they hold for both
/// components.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cx {
    pub re: Expr,
    pub im: Expr,
}

impl Cx {
    pub fn new(re: Expr, im: Expr) -> Self {
        Cx { re, im }
    }

    pub fn real(re: Expr) -> Self {
        Cx { re, im: Expr::zero() }
    }

    pub fn zero() -> Self {
        Cx::real(Expr::zero())
    }

    pub fn i() -> Self {
        Cx::new(Expr::zero(), Expr::one())
    }

    /// `e^{sign·i·arg} = cos(arg) + sign·i·sin(arg)`.
    pub fn exp_i(sign: i64, arg: Expr) -> Self {
        Cx::new(arg.clone().cos(), Expr::int(sign) * arg.sin())
    }

    pub fn conj(&self) -> Self {
        Cx::new(self.re.clone(), -self.im.clone())
    }

    pub fn scale(&self, k: &Expr) -> Self {
        Cx::new(k * &self.re, k * &self.im)
    }

    pub fn map<E>(&self, mut f: impl FnMut(&Expr) -> Result<Expr, E>) -> Result<Self, E> {
        Ok(Cx::new(f(&self.re)?, f(&self.im)?))
    }

    pub fn canonical(&self) -> Self {
        Cx::new(canonicalize(&self.re), canonicalize(&self.im))
    }

    pub fn is_real(&self) -> bool {
        is_zero(&self.im)
    }

    pub fn is_zero(&self) -> bool {
        is_zero(&self.re) && is_zero(&self.im)
    }

    pub fn equals(&self, other: &Cx) -> bool {
        (self.clone() - other.clone()).is_zero()
    }

    pub fn contains_integral(&self) -> bool {
        self.re.contains_integral() || self.im.contains_integral()
    }

    pub fn parts(&self) -> [&Expr; 2] {
        [&self.re, &self.im]
    }

    pub fn to_prefix(&self) -> String {
        if self.im.is_num_zero() {
            self.re.to_prefix()
        } else {
            format!("(complex {} {})", self.re.to_prefix(), self.im.to_prefix())
        }
    }

    pub fn to_infix(&self) -> String {
        if self.im.is_num_zero() {
            self.re.to_infix()
        } else if self.re.is_num_zero() {
            format!("i·({})", self.im.to_infix())
        } else {
            format!("({}) + i·({})", self.re.to_infix(), self.im.to_infix())
        }
    }
}

impl From<Expr> for Cx {
    fn from(e: Expr) -> Self {
        Cx::real(e)
    }
}

impl Add for Cx {
    type Output = Cx;
    fn add(self, o: Cx) -> Cx {
        Cx::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for Cx {
    type Output = Cx;
    fn sub(self, o: Cx) -> Cx {
        Cx::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for Cx {
    type Output = Cx;
    fn mul(self, o: Cx) -> Cx {
        Cx::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

impl Neg for Cx {
    type Output = Cx;
    fn neg(self) -> Cx {
        Cx::new(-self.re, -self.im)
    }
}

impl serde::Serialize for Cx {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_prefix())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Symbol;

    #[test]
    fn unit_modulus_and_double_angle() {
        let phi = Symbol::dependent("phi").expr();
        let z = Cx::exp_i(1, phi.clone());
        let m = (z.clone() * z.conj()).canonical();
        assert_eq!(m, Cx::real(Expr::one()));
        let sq = z.clone() * z;
        assert!(sq.equals(&Cx::exp_i(1, Expr::int(2) * phi)));
    }
}
