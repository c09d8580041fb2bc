//! Normal form.
//!
//! An expression is expanded into a sum of monomials over *atoms*: symbols,
//! `sin`/`cos`/`exp` of canonical arguments, integral nodes, numeric
//! constants under fractional powers, and sums raised to a negative or
//! fractional power. Each monomial carries a rational coefficient and each
//! atom a rational exponent. Rewrites applied while normalizing:
//!
//! * positive integer powers of sums are multiplied out;
//! * `sin²x → 1 − cos²x`, so sine appears at most linearly;
//! * `sin(nx)`, `cos(nx)` for integer `n ≥ 2` are expanded;
//! * odd/even symmetry of `sin`/`cos` fixes the sign of their argument;
//! * exponentials in one monomial merge into a single `exp`;
//! * sums under a negative integer power are cancelled against the rest of
//!   the expression when they divide it exactly.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{diff, is_integer, is_positive_integer, Expr, Rational, Role, Symbol};

type Mono = BTreeMap<Expr, Rational>;

#[derive(Clone, Debug, Default, PartialEq)]
struct Poly(BTreeMap<Mono, Rational>);

const MAX_MULTIPLE_ANGLE: i64 = 16;
const MAX_DIVISION_STEPS: usize = 2000;

impl Poly {
    fn zero() -> Self {
        Poly::default()
    }

    fn constant(c: Rational) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.0.insert(Mono::new(), c);
        }
        p
    }

    fn term(c: Rational, m: Mono) -> Self {
        let mut p = Poly::zero();
        p.add_term(c, m);
        p
    }

    fn atom(a: Expr, e: Rational) -> Self {
        let mut m = Mono::new();
        m.insert(a, e);
        Poly::term(Rational::one(), m)
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn add_term(&mut self, c: Rational, m: Mono) {
        if c.is_zero() {
            return;
        }
        match self.0.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.0.remove(&m);
                }
            }
            None => {
                self.0.insert(m, c);
            }
        }
    }

    fn add(mut self, other: &Poly) -> Poly {
        for (m, c) in &other.0 {
            self.add_term(c.clone(), m.clone());
        }
        self
    }

    fn scale(&self, k: &Rational) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly(self.0.iter().map(|(m, c)| (m.clone(), c * k)).collect())
    }

    fn mul_raw(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.0 {
            for (m2, c2) in &other.0 {
                out.add_term(c1 * c2, mono_mul(m1, m2));
            }
        }
        out
    }

    fn mul(&self, other: &Poly) -> Poly {
        normalize(self.mul_raw(other))
    }

    fn pow(&self, n: u32) -> Poly {
        let mut acc = Poly::constant(Rational::one());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    fn single(&self) -> Option<(&Mono, &Rational)> {
        if self.0.len() == 1 {
            self.0.iter().next()
        } else {
            None
        }
    }

    /// Coefficient of the first term in key order; used to fix the scale and
    /// sign of sums that become atoms.
    fn lead_coeff(&self) -> Rational {
        self.0.values().next().cloned().unwrap_or_else(Rational::zero)
    }
}

fn mono_mul(a: &Mono, b: &Mono) -> Mono {
    let mut out = a.clone();
    for (k, e) in b {
        let entry = out.entry(k.clone()).or_insert_with(Rational::zero);
        *entry += e;
    }
    out.retain(|_, e| !e.is_zero());
    out
}

fn mono_pow(m: &Mono, q: &Rational) -> Mono {
    m.iter().map(|(k, e)| (k.clone(), e * q)).collect()
}

fn is_sum_atom(a: &Expr) -> bool {
    matches!(a, Expr::Add(_))
}

fn floor_rat(q: &Rational) -> Rational {
    Rational::from_integer(q.floor().to_integer())
}

/// Exact `d`-th root of a non-negative integer, if it exists.
fn int_root(n: &BigInt, d: u32) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    if n.is_zero() || n.is_one() {
        return Some(n.clone());
    }
    let approx = n.to_f64()?.powf(1.0 / d as f64).round();
    if !approx.is_finite() {
        return None;
    }
    let base = BigInt::from(approx as i128);
    for cand in [base.clone() - 1, base.clone(), base + 1] {
        if cand.is_negative() {
            continue;
        }
        if num_traits::pow(cand.clone(), d as usize) == *n {
            return Some(cand);
        }
    }
    None
}

fn rational_root(c: &Rational, q: &Rational) -> Option<Rational> {
    // c^(p/d) exactly
    let d = q.denom().to_u32()?;
    let p = q.numer().to_i32()?;
    let rn = int_root(c.numer(), d)?;
    let rd = int_root(c.denom(), d)?;
    let base = Rational::new(rn, rd);
    Some(rat_powi(&base, p))
}

fn rat_powi(c: &Rational, p: i32) -> Rational {
    if p >= 0 {
        num_traits::pow(c.clone(), p as usize)
    } else {
        num_traits::pow(c.recip(), (-p) as usize)
    }
}

/// Normalizes every term, applying the rewrite set until no rule fires.
fn normalize(p: Poly) -> Poly {
    let mut out = Poly::zero();
    for (m, c) in p.0 {
        let t = normalize_term(c, m);
        out = out.add(&t);
    }
    out
}

fn normalize_term(mut c: Rational, mono: Mono) -> Poly {
    if c.is_zero() {
        return Poly::zero();
    }
    let mut m: Mono = mono.into_iter().filter(|(_, e)| !e.is_zero()).collect();

    // merge exponentials
    let exps: Vec<(Expr, Rational)> = m
        .iter()
        .filter(|(k, _)| matches!(k, Expr::Exp(_)))
        .map(|(k, e)| (k.clone(), e.clone()))
        .collect();
    if exps.len() > 1 || exps.iter().any(|(_, e)| !e.is_one()) {
        let mut arg = Poly::zero();
        for (k, e) in &exps {
            m.remove(k);
            if let Expr::Exp(inner) = k {
                arg = arg.add(&to_poly(inner).scale(e));
            }
        }
        if !arg.is_zero() {
            m.insert(Expr::Exp(Box::new(from_poly(&arg))), Rational::one());
        }
    }

    // numeric atoms
    let nums: Vec<(Expr, Rational)> = m
        .iter()
        .filter(|(k, _)| matches!(k, Expr::Num(_)))
        .map(|(k, e)| (k.clone(), e.clone()))
        .collect();
    for (k, e) in nums {
        let Expr::Num(b) = &k else { unreachable!() };
        if b.is_zero() {
            continue;
        }
        m.remove(&k);
        let whole = floor_rat(&e);
        let frac = &e - &whole;
        c *= rat_powi(b, whole.to_integer().to_i32().unwrap_or(0));
        if frac.is_zero() {
            continue;
        }
        if b.is_positive() {
            if let Some(r) = rational_root(b, &frac) {
                c *= r;
                continue;
            }
        }
        m.insert(k, frac);
    }

    // sums under positive powers are expanded
    let sums: Vec<(Expr, Rational)> = m
        .iter()
        .filter(|(k, e)| is_sum_atom(k) && *e >= &Rational::one())
        .map(|(k, e)| (k.clone(), e.clone()))
        .collect();
    if let Some((k, e)) = sums.into_iter().next() {
        m.remove(&k);
        let whole = floor_rat(&e);
        let frac = &e - &whole;
        if !frac.is_zero() {
            m.insert(k.clone(), frac);
        }
        let base = to_poly(&k);
        let n = whole.to_integer().to_u32().unwrap_or(0);
        let rest = Poly::term(c, m);
        return normalize(rest.mul_raw(&base.pow(n)));
    }

    // sin² → 1 − cos²
    let sin_sq = m
        .iter()
        .find(|(k, e)| matches!(k, Expr::Sin(_)) && is_integer(e) && *e >= &Rational::from_integer(2.into()))
        .map(|(k, e)| (k.clone(), e.clone()));
    if let Some((k, e)) = sin_sq {
        let Expr::Sin(arg) = &k else { unreachable!() };
        let cos_atom = Expr::Cos(arg.clone());
        let mut base = m.clone();
        let two = Rational::from_integer(2.into());
        base.insert(k.clone(), &e - &two);
        base.retain(|_, e| !e.is_zero());
        let mut with_cos = base.clone();
        *with_cos.entry(cos_atom).or_insert_with(Rational::zero) += &two;
        with_cos.retain(|_, e| !e.is_zero());
        let mut p = Poly::term(c.clone(), base);
        p.add_term(-c, with_cos);
        return normalize(p);
    }

    Poly::term(c, m)
}

fn to_poly(e: &Expr) -> Poly {
    match e {
        Expr::Num(c) => Poly::constant(c.clone()),
        Expr::Sym(_) => Poly::atom(e.clone(), Rational::one()),
        Expr::Add(xs) => xs.iter().fold(Poly::zero(), |acc, x| acc.add(&to_poly(x))),
        Expr::Mul(xs) => {
            let mut acc = Poly::constant(Rational::one());
            for x in xs {
                let px = to_poly(x);
                if px.is_zero() {
                    return Poly::zero();
                }
                acc = acc.mul(&px);
            }
            acc
        }
        Expr::Pow(b, q) => pow_poly(&to_poly(b), q),
        Expr::Sin(a) => trig(true, &to_poly(a)),
        Expr::Cos(a) => trig(false, &to_poly(a)),
        Expr::Exp(a) => {
            let pa = to_poly(a);
            if pa.is_zero() {
                Poly::constant(Rational::one())
            } else {
                Poly::atom(Expr::Exp(Box::new(from_poly(&pa))), Rational::one())
            }
        }
        Expr::Derivative { expr, var, order } => {
            let mut cur = (**expr).clone();
            for _ in 0..*order {
                match diff::differentiate(&cur, var) {
                    Ok(d) => cur = d,
                    Err(_) => {
                        return Poly::atom(
                            Expr::Derivative {
                                expr: Box::new(from_poly(&to_poly(expr))),
                                var: var.clone(),
                                order: *order,
                            },
                            Rational::one(),
                        )
                    }
                }
            }
            to_poly(&cur)
        }
        Expr::Integral {
            integrand,
            bound,
            lower,
            upper,
        } => integral_poly(&to_poly(integrand), bound, &to_poly(lower), upper),
    }
}

/// Integrals are linear: each monomial of the integrand becomes its own
/// integral, and factors constant along the path move outside.
fn integral_poly(pi: &Poly, bound: &Symbol, lower: &Poly, upper: &Symbol) -> Poly {
    let constant_along_path = |a: &Expr| {
        a.free_symbols()
            .iter()
            .all(|s| s.role() == Role::Parameter || s == upper)
            && !a.contains_integral()
    };
    let lower_e = from_poly(lower);
    let mut out = Poly::zero();
    for (m, c) in &pi.0 {
        let (outer, inner): (Mono, Mono) = m
            .iter()
            .map(|(a, e)| (a.clone(), e.clone()))
            .partition(|(a, _)| constant_along_path(a));
        let body = if inner.is_empty() {
            Poly::atom(upper.expr(), Rational::one()).add(&lower.scale(&-Rational::one()))
        } else {
            let node = Expr::Integral {
                integrand: Box::new(from_poly(&Poly::term(Rational::one(), inner))),
                bound: bound.clone(),
                lower: Box::new(lower_e.clone()),
                upper: upper.clone(),
            };
            Poly::atom(node, Rational::one())
        };
        out = out.add(&Poly::term(c.clone(), outer).mul(&body));
    }
    out
}

fn pow_poly(pb: &Poly, q: &Rational) -> Poly {
    if q.is_zero() {
        return Poly::constant(Rational::one());
    }
    if pb.is_zero() {
        if q.is_positive() {
            return Poly::zero();
        }
        return Poly::atom(Expr::zero(), q.clone());
    }
    if is_positive_integer(q) {
        return pb.pow(q.to_integer().to_u32().unwrap_or(0));
    }
    if let Some((m, c)) = pb.single() {
        let coeff = if is_integer(q) {
            Poly::constant(rat_powi(c, q.to_integer().to_i32().unwrap_or(0)))
        } else if c.is_one() {
            Poly::constant(Rational::one())
        } else {
            Poly::atom(Expr::Num(c.clone()), q.clone())
        };
        let body = Poly::term(Rational::one(), mono_pow(m, q));
        return normalize(coeff.mul_raw(&body));
    }
    // sum base: scale so that the leading coefficient is 1 (integer powers)
    // or ±1 (fractional powers)
    let lc = pb.lead_coeff();
    let (scale, outer) = if is_integer(q) {
        (lc.clone(), rat_powi(&lc, q.to_integer().to_i32().unwrap_or(0)))
    } else {
        let a = lc.abs();
        (a, Rational::one())
    };
    let base = pb.scale(&scale.recip());
    let mut out = Poly::atom(from_poly(&base), q.clone());
    if !is_integer(q) && !scale.is_one() {
        out = out.mul_raw(&Poly::atom(Expr::Num(scale), q.clone()));
    }
    normalize(out.scale(&outer))
}

fn trig(is_sin: bool, pa: &Poly) -> Poly {
    if pa.is_zero() {
        return if is_sin {
            Poly::zero()
        } else {
            Poly::constant(Rational::one())
        };
    }
    if pa.lead_coeff().is_negative() {
        let flipped = trig(is_sin, &pa.scale(&-Rational::one()));
        return if is_sin {
            flipped.scale(&-Rational::one())
        } else {
            flipped
        };
    }
    if let Some((m, c)) = pa.single() {
        if is_integer(c) && !c.is_one() {
            if let Some(n) = c.to_integer().to_i64().filter(|n| *n <= MAX_MULTIPLE_ANGLE) {
                let x = from_poly(&Poly::term(Rational::one(), m.clone()));
                let s = Poly::atom(Expr::Sin(Box::new(x.clone())), Rational::one());
                let co = Poly::atom(Expr::Cos(Box::new(x)), Rational::one());
                let (mut sk, mut ck) = (s.clone(), co.clone());
                for _ in 1..n {
                    let ns = sk.mul(&co).add(&ck.mul(&s));
                    let nc = ck.mul(&co).add(&sk.mul(&s).scale(&-Rational::one()));
                    sk = ns;
                    ck = nc;
                }
                return if is_sin { sk } else { ck };
            }
        }
    }
    let arg = Box::new(from_poly(pa));
    let atom = if is_sin { Expr::Sin(arg) } else { Expr::Cos(arg) };
    Poly::atom(atom, Rational::one())
}

fn from_poly(p: &Poly) -> Expr {
    let mut terms: Vec<Expr> = p
        .0
        .iter()
        .map(|(m, c)| {
            let mut factors: Vec<Expr> = Vec::with_capacity(m.len() + 1);
            if !c.is_one() || m.is_empty() {
                factors.push(Expr::Num(c.clone()));
            }
            for (a, e) in m {
                if e.is_one() {
                    factors.push(a.clone());
                } else {
                    factors.push(Expr::Pow(Box::new(a.clone()), e.clone()));
                }
            }
            if factors.len() == 1 {
                factors.pop().unwrap()
            } else {
                Expr::Mul(factors)
            }
        })
        .collect();
    match terms.len() {
        0 => Expr::zero(),
        1 => terms.pop().unwrap(),
        _ => Expr::Add(terms),
    }
}

// ---------------------------------------------------------------------------
// cancellation of sum denominators

fn mono_cmp(a: &Mono, b: &Mono) -> Ordering {
    let mut keys: Vec<&Expr> = a.keys().chain(b.keys()).collect();
    keys.sort();
    keys.dedup();
    let zero = Rational::zero();
    for k in keys {
        let ea = a.get(k).unwrap_or(&zero);
        let eb = b.get(k).unwrap_or(&zero);
        match ea.cmp(eb) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

fn leading(p: &Poly) -> Option<(&Mono, &Rational)> {
    p.0.iter().max_by(|x, y| mono_cmp(x.0, y.0))
}

fn lower_bounds(p: &Poly) -> BTreeMap<Expr, Rational> {
    let mut keys: Vec<&Expr> = p.0.keys().flat_map(|m| m.keys()).collect();
    keys.sort();
    keys.dedup();
    let zero = Rational::zero();
    keys.into_iter()
        .map(|k| {
            let lo = p
                .0
                .keys()
                .map(|m| m.get(k).unwrap_or(&zero).clone())
                .min()
                .unwrap_or_else(Rational::zero);
            (k.clone(), lo)
        })
        .collect()
}

/// Exact quotient `p / d`, if `d` divides `p`.
fn divide_exact(p: &Poly, d: &Poly) -> Option<Poly> {
    let (dm, dc) = leading(d)?;
    let lo_p = lower_bounds(p);
    let lo_d = lower_bounds(d);
    let zero = Rational::zero();
    let mut bound: BTreeMap<Expr, Rational> = BTreeMap::new();
    for k in lo_p.keys().chain(lo_d.keys()) {
        let v = lo_p.get(k).unwrap_or(&zero) - lo_d.get(k).unwrap_or(&zero);
        bound.insert(k.clone(), v);
    }
    let mut rem = p.clone();
    let mut quot = Poly::zero();
    for _ in 0..MAX_DIVISION_STEPS {
        let Some((rm, rc)) = leading(&rem) else {
            return Some(quot);
        };
        let mut qm = rm.clone();
        for (k, e) in dm {
            *qm.entry(k.clone()).or_insert_with(Rational::zero) -= e;
        }
        qm.retain(|_, e| !e.is_zero());
        for (k, lo) in &bound {
            if qm.get(k).unwrap_or(&zero) < lo {
                return None;
            }
        }
        if qm.keys().any(|k| !bound.contains_key(k)) {
            return None;
        }
        let qc = rc / dc;
        let qterm = Poly::term(qc, qm);
        rem = rem.add(&qterm.mul_raw(d).scale(&-Rational::one()));
        quot = quot.add(&qterm);
    }
    None
}

fn cancel_denominators(mut p: Poly) -> Poly {
    loop {
        let candidates: Vec<Expr> = {
            let mut v: Vec<Expr> = p
                .0
                .keys()
                .flat_map(|m| m.iter())
                .filter(|(k, e)| is_sum_atom(k) && is_integer(e) && e.is_negative())
                .map(|(k, _)| k.clone())
                .collect();
            v.sort();
            v.dedup();
            v
        };
        let mut changed = false;
        for b in candidates {
            if let Some(q) = try_cancel(&p, &b) {
                p = q;
                changed = true;
                break;
            }
        }
        if !changed {
            return p;
        }
    }
}

fn try_cancel(p: &Poly, b: &Expr) -> Option<Poly> {
    let zero = Rational::zero();
    let m = p
        .0
        .keys()
        .map(|mono| -mono.get(b).unwrap_or(&zero).clone())
        .max()?;
    if !m.is_positive() || !is_integer(&m) {
        return None;
    }
    let lifted = normalize(Poly(
        p.0.iter()
            .map(|(mono, c)| (mono_mul(mono, &BTreeMap::from([(b.clone(), m.clone())])), c.clone()))
            .collect(),
    ));
    let bp = to_poly(b);
    let mut cur = lifted;
    let mut k = 0u32;
    let mmax = m.to_integer().to_u32()?;
    while k < mmax {
        match divide_exact(&cur, &bp) {
            Some(q) => {
                cur = q;
                k += 1;
            }
            None => break,
        }
    }
    if k == 0 {
        return None;
    }
    let rest = Rational::from_integer(BigInt::from(mmax - k));
    let out = if rest.is_zero() {
        cur
    } else {
        cur.mul_raw(&Poly::atom(b.clone(), -rest))
    };
    Some(out)
}

fn canonical_poly(e: &Expr) -> Poly {
    cancel_denominators(to_poly(e))
}

/// Brings `e` to canonical form. Idempotent.
pub fn canonicalize(e: &Expr) -> Expr {
    let mut cur = from_poly(&canonical_poly(e));
    for _ in 0..8 {
        let next = from_poly(&canonical_poly(&cur));
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}

/// True when `e` is identically zero under the rewrite set, after clearing
/// denominators that are sums.
pub fn is_zero(e: &Expr) -> bool {
    let mut p = canonical_poly(e);
    for _ in 0..16 {
        if p.is_zero() {
            return true;
        }
        let mut worst: Option<(Expr, Rational)> = None;
        for mono in p.0.keys() {
            for (k, ex) in mono {
                if is_sum_atom(k) && ex.is_negative() {
                    let need = -ex.clone();
                    if worst.as_ref().map_or(true, |(_, w)| need > *w) {
                        worst = Some((k.clone(), need));
                    }
                }
            }
        }
        let Some((b, need)) = worst else {
            return false;
        };
        let lift = BTreeMap::from([(b, need)]);
        p = normalize(Poly(
            p.0.iter().map(|(m, c)| (mono_mul(m, &lift), c.clone())).collect(),
        ));
    }
    p.is_zero()
}

/// Symbolic equality: `a − b` canonicalizes to zero.
pub fn equals(a: &Expr, b: &Expr) -> bool {
    is_zero(&(a.clone() - b.clone()))
}

#[cfg(test)]
mod tests {
    use super::super::{Expr, Symbol};
    use super::*;

    fn th() -> Expr {
        Symbol::independent("theta").expr()
    }

    #[test]
    fn pythagorean_identity() {
        let e = th().sin().powi(2) + th().cos().powi(2);
        assert_eq!(canonicalize(&e), Expr::one());
    }

    #[test]
    fn additive_inverse() {
        let x = Symbol::dependent("x").expr();
        assert_eq!(canonicalize(&(x.clone() + (-x))), Expr::zero());
    }

    #[test]
    fn double_angle() {
        let e = (Expr::int(2) * th()).sin() - Expr::int(2) * th().sin() * th().cos();
        assert_eq!(canonicalize(&e), Expr::zero());
        let c = (Expr::int(2) * th()).cos() - (Expr::one() - Expr::int(2) * th().sin().powi(2));
        assert_eq!(canonicalize(&c), Expr::zero());
    }

    #[test]
    fn parity_of_trig() {
        let e = (-th()).sin() + th().sin();
        assert_eq!(canonicalize(&e), Expr::zero());
        assert_eq!(canonicalize(&(-th()).cos()), canonicalize(&th().cos()));
    }

    #[test]
    fn sum_denominator_cancels() {
        let l = Symbol::parameter("L").expr();
        let lam = Symbol::parameter("lambda").expr();
        let b = l.clone().powi(2) + lam.clone().powi(2);
        let e = l.powi(2) / b.clone() + lam.powi(2) / b;
        assert_eq!(canonicalize(&e), Expr::one());
    }

    #[test]
    fn power_collection() {
        let x = Symbol::dependent("x").expr();
        let e = x.clone().sqrt() * x.clone().sqrt() - x.clone();
        assert_eq!(canonicalize(&e), Expr::zero());
        let f = x.clone().powi(3) / x.clone().powi(5) - x.powi(-2);
        assert!(is_zero(&f));
    }

    #[test]
    fn exp_merge() {
        let t = Symbol::independent("t").expr();
        let e = (-t.clone()).exp() * t.clone().exp();
        assert_eq!(canonicalize(&e), Expr::one());
        let h = (-t.clone()).exp().sqrt() - (Expr::rat(-1, 2) * t).exp();
        assert_eq!(canonicalize(&h), Expr::zero());
    }

    #[test]
    fn numeric_roots() {
        assert_eq!(canonicalize(&Expr::int(4).sqrt()), Expr::int(2));
        let s2 = canonicalize(&Expr::int(2).sqrt());
        assert_eq!(canonicalize(&(s2.clone() * s2)), Expr::int(2));
    }

    #[test]
    fn rational_function_zero_test() {
        let u = Symbol::dependent("u").expr();
        let k = Symbol::parameter("K").expr();
        let b = u.clone() + k;
        let e = b.clone().powi(2) * b.clone().powi(-2) - Expr::one();
        assert!(is_zero(&e));
        let f = (u.clone() * b.clone().recip()) + (Symbol::parameter("K").expr() / b) - Expr::one();
        assert!(is_zero(&f));
    }
}
