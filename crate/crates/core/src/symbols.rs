//! Symbol inventory shared by every chart.

use crate::expr::Symbol;

macro_rules! syms {
    ($role:ident: $($f:ident = $name:literal),* $(,)?) => {$(
        pub fn $f() -> Symbol { Symbol::$role($name) }
    )*};
}

syms!(independent: t = "t", theta = "theta", phi = "phi", y = "y", x = "x");
syms!(dependent:
    r = "r", rdot = "rdot", rddot = "rddot",
    thetadot = "thetadot", thetaddot = "thetaddot",
    phidot = "phidot", phiddot = "phiddot",
    u = "u", u1 = "u1", u2 = "u2",
    w1 = "w1", w2 = "w2", w3 = "w3", w4 = "w4",
);
syms!(parameter:
    omega = "Omega", ang_mom1 = "L1", beta = "beta",
    mu = "mu", alpha = "alpha", lambda = "lambda", nu = "nu",
    ang_mom = "L", ang_mom0 = "L0", cone_const = "A", cone_sin = "S",
);
syms!(bound: eta = "eta", s = "s", tau = "tau");

/// Jet coordinate for the `order`-th derivative of `dep` with respect to
/// `indep`, e.g. `u1_theta_theta`.
pub fn jet(dep: &Symbol, indep: &Symbol, order: usize) -> Symbol {
    if order == 0 {
        return dep.clone();
    }
    let mut name = dep.name().to_string();
    for _ in 0..order {
        name.push('_');
        name.push_str(indep.name());
    }
    Symbol::dependent(&name)
}

/// `(rate, acceleration)` symbols of a polar angle.
pub fn angle_triplet(angle: &Symbol) -> (Symbol, Symbol) {
    match angle.name() {
        "phi" => (phidot(), phiddot()),
        _ => (thetadot(), thetaddot()),
    }
}
