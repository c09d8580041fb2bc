//! The five central-force families, their component equations of motion and
//! their conserved quantities.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{
    canonicalize, differentiate, eval_numeric, is_zero, solve_linear, total_derivative, Env, Expr,
    ExprError, Rational, Role, Symbol,
};
use crate::symbols as sym;
use crate::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Kepler,
    KeplerDrag,
    PowerLaw,
    ConeDrag,
    Micz,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::Kepler,
        Family::KeplerDrag,
        Family::PowerLaw,
        Family::ConeDrag,
        Family::Micz,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Kepler => "kepler",
            Family::KeplerDrag => "kepler_drag",
            Family::PowerLaw => "power_law",
            Family::ConeDrag => "cone_drag",
            Family::Micz => "micz",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("cone_drag requires a function g(t)")]
    MissingG,
    #[error("g may depend only on t and parameters, found `{0}`")]
    GDependence(String),
    #[error("g must be positive on the integration window (g({t}) = {value})")]
    GNotPositive { t: f64, value: f64 },
    #[error("power-law exponent must be a rational constant")]
    SymbolicExponent,
    #[error("parameter `{0}` must be numeric here")]
    NotNumeric(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// One problem family with its parameters.
///
/// `alpha` is the drag coefficient for `KeplerDrag` and the force exponent
/// for `PowerLaw`; it is unused by the other families. Parameters may stay
/// symbolic for the symbolic pipelines; numeric work needs constants.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec {
    pub family: Family,
    pub mu: Expr,
    pub alpha: Expr,
    pub lambda: Expr,
    pub nu: Expr,
    pub g: Option<Expr>,
}

impl ProblemSpec {
    fn base(family: Family) -> Self {
        ProblemSpec {
            family,
            mu: sym::mu().expr(),
            alpha: Expr::zero(),
            lambda: Expr::zero(),
            nu: Expr::zero(),
            g: None,
        }
    }

    pub fn kepler() -> Self {
        Self::base(Family::Kepler)
    }

    pub fn kepler_drag() -> Self {
        ProblemSpec {
            alpha: sym::alpha().expr(),
            ..Self::base(Family::KeplerDrag)
        }
    }

    pub fn power_law(alpha: Rational) -> Self {
        ProblemSpec {
            alpha: Expr::Num(alpha),
            ..Self::base(Family::PowerLaw)
        }
    }

    pub fn cone_drag(g: Expr) -> Self {
        ProblemSpec {
            g: Some(g),
            ..Self::base(Family::ConeDrag)
        }
    }

    /// MICZ with `2ν = −λ²`.
    pub fn micz() -> Self {
        let lambda = sym::lambda().expr();
        ProblemSpec {
            nu: canonicalize(&(Expr::rat(-1, 2) * lambda.clone().powi(2))),
            lambda,
            ..Self::base(Family::Micz)
        }
    }

    /// MICZ with independent `ν`.
    pub fn micz_general() -> Self {
        ProblemSpec {
            lambda: sym::lambda().expr(),
            nu: sym::nu().expr(),
            ..Self::base(Family::Micz)
        }
    }

    pub fn with_mu(mut self, mu: Expr) -> Self {
        self.mu = canonicalize(&mu);
        self
    }

    pub fn with_alpha(mut self, alpha: Expr) -> Self {
        self.alpha = canonicalize(&alpha);
        self
    }

    /// Replaces `λ`; a spec in the special case `2ν = −λ²` stays in it.
    pub fn with_lambda(mut self, lambda: Expr) -> Self {
        let special = self.special_case();
        self.lambda = canonicalize(&lambda);
        if special {
            self.nu = canonicalize(&(Expr::rat(-1, 2) * self.lambda.clone().powi(2)));
        }
        self
    }

    pub fn with_nu(mut self, nu: Expr) -> Self {
        self.nu = canonicalize(&nu);
        self
    }

    pub fn validate(&self) -> Result<(), ProblemError> {
        match self.family {
            Family::PowerLaw if self.alpha.as_num().is_none() => {
                Err(ProblemError::SymbolicExponent)
            }
            Family::ConeDrag => {
                let g = self.g.as_ref().ok_or(ProblemError::MissingG)?;
                match g
                    .free_symbols()
                    .into_iter()
                    .find(|s| s.role() != Role::Parameter && *s != sym::t())
                {
                    Some(s) => Err(ProblemError::GDependence(s.name().to_string())),
                    None => Ok(()),
                }
            }
            _ => Ok(()),
        }
    }

    /// MICZ special case `2ν = −λ²`.
    pub fn special_case(&self) -> bool {
        self.family == Family::Micz
            && is_zero(&(Expr::int(2) * self.nu.clone() + self.lambda.clone().powi(2)))
    }

    /// `k = α + 3` for power laws.
    pub fn power_k(&self) -> Option<Rational> {
        match self.family {
            Family::PowerLaw => self.alpha.as_num().map(|a| a + Rational::from_integer(3.into())),
            _ => None,
        }
    }

    /// Numeric values of the parameters this family uses, keyed by symbol name.
    pub fn numeric_params<T: Real>(&self) -> Result<Env<T>, ProblemError> {
        let mut used = vec![("mu", &self.mu)];
        match self.family {
            Family::KeplerDrag | Family::PowerLaw => used.push(("alpha", &self.alpha)),
            Family::Micz => {
                used.push(("lambda", &self.lambda));
                used.push(("nu", &self.nu));
            }
            _ => {}
        }
        let mut env = Env::new();
        for (name, e) in used {
            let v = eval_numeric::<T>(e, &env, T::lit(1e-12))
                .map_err(|_| ProblemError::NotNumeric(name.to_string()))?;
            env.insert(name.to_string(), v);
        }
        Ok(env)
    }

    /// `g` and `ġ` as expressions in `t`.
    pub fn g_and_rate(&self) -> Result<(Expr, Expr), ProblemError> {
        let g = self.g.clone().ok_or(ProblemError::MissingG)?;
        let gdot = differentiate(&g, &sym::t())?;
        Ok((canonicalize(&g), gdot))
    }

    /// Checks `g > 0` at `samples` evenly spaced times in `[0, t_end]`.
    pub fn check_g_positive(&self, t_end: f64, samples: usize) -> Result<(), ProblemError> {
        let Some(g) = &self.g else {
            return Ok(());
        };
        let mut env = self.numeric_params::<f64>()?;
        for i in 0..=samples {
            let t = t_end * i as f64 / samples.max(1) as f64;
            env.insert("t".into(), t);
            let value = eval_numeric(g, &env, 1e-12)?;
            if value <= 0.0 {
                return Err(ProblemError::GNotPositive { t, value });
            }
        }
        Ok(())
    }
}

/// Radial and transverse components, each `= 0`, over the chart `(t, r, ψ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentEquations {
    pub radial: Expr,
    pub transverse: Expr,
    pub chart: Vec<Symbol>,
}

impl ComponentEquations {
    pub fn angle(&self) -> &Symbol {
        &self.chart[2]
    }

    /// `(r̈, ψ̈)` solved from the two components.
    pub fn accelerations(&self) -> Result<(Expr, Expr), ExprError> {
        let (_, acc) = sym::angle_triplet(self.angle());
        let rdd = solve_linear(&self.radial, &sym::rddot())?.ok_or_else(|| {
            ExprError::Unbound("radial equation is not affine in rddot".into())
        })?;
        let add = solve_linear(&self.transverse, &acc)?.ok_or_else(|| {
            ExprError::Unbound("transverse equation is not affine in the angular acceleration".into())
        })?;
        Ok((rdd, add))
    }

    /// Chain for the total time derivative along the motion.
    pub fn time_chain(&self) -> Result<Vec<(Symbol, Expr)>, ExprError> {
        let (rdd, add) = self.accelerations()?;
        let (rate, _) = sym::angle_triplet(self.angle());
        Ok(vec![
            (sym::r(), sym::rdot().expr()),
            (sym::rdot(), rdd),
            (self.angle().clone(), rate.expr()),
            (rate, add),
        ])
    }

    /// `d/dt` of a phase-space expression along the equations of motion.
    pub fn on_shell_rate(&self, e: &Expr) -> Result<Expr, ExprError> {
        total_derivative(e, &sym::t(), &self.time_chain()?)
    }
}

pub fn equations_of_motion(spec: &ProblemSpec) -> Result<ComponentEquations, ProblemError> {
    spec.validate()?;
    let (r, rd, rdd) = (sym::r().expr(), sym::rdot().expr(), sym::rddot().expr());
    let mu = spec.mu.clone();
    let planar = |angle: Symbol| {
        let (rate, acc) = sym::angle_triplet(&angle);
        (angle, rate.expr(), acc.expr())
    };
    let (angle, w, wdd) = planar(if spec.family == Family::Micz {
        sym::phi()
    } else {
        sym::theta()
    });
    let kepler_radial = rdd.clone() - r.clone() * w.clone().powi(2) + mu.clone() * r.clone().powi(-2);
    let kepler_transverse = r.clone() * wdd.clone() + Expr::int(2) * rd.clone() * w.clone();

    let (radial, transverse) = match spec.family {
        Family::Kepler => (kepler_radial, kepler_transverse),
        Family::KeplerDrag => {
            let a = spec.alpha.clone();
            (
                kepler_radial + a.clone() * rd.clone() * r.clone().powi(-2),
                kepler_transverse + a * w.clone() / r.clone(),
            )
        }
        Family::PowerLaw => {
            let exp = spec.alpha.as_num().ok_or(ProblemError::SymbolicExponent)?.clone()
                + Rational::from_integer(1.into());
            (
                rdd.clone() - r.clone() * w.clone().powi(2) + mu * r.clone().pow(exp),
                kepler_transverse,
            )
        }
        Family::ConeDrag => {
            let (g, gdot) = spec.g_and_rate()?;
            let h = gdot / (Expr::int(2) * g.clone()) + Expr::rat(3, 2) * rd.clone() / r.clone();
            (
                rdd.clone() - r.clone() * w.clone().powi(2) - h.clone() * rd.clone()
                    + mu * g * r.clone(),
                kepler_transverse - h * r.clone() * w.clone(),
            )
        }
        Family::Micz => {
            let s2 = sym::cone_sin().expr().powi(2);
            (
                rdd.clone() - r.clone() * s2 * w.clone().powi(2)
                    + mu * r.clone().powi(-2)
                    + Expr::int(2) * spec.nu.clone() * r.clone().powi(-3),
                kepler_transverse,
            )
        }
    };
    Ok(ComponentEquations {
        radial: canonicalize(&radial),
        transverse: canonicalize(&transverse),
        chart: vec![sym::t(), sym::r(), angle],
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConservedQuantity {
    pub name: String,
    pub expr: Expr,
}

impl ConservedQuantity {
    fn new(name: &str, expr: Expr) -> Self {
        ConservedQuantity {
            name: name.to_string(),
            expr: canonicalize(&expr),
        }
    }
}

/// `r²ψ̇`, with the cone factor `S` for MICZ.
pub fn angular_momentum(spec: &ProblemSpec) -> Expr {
    let r2 = sym::r().expr().powi(2);
    match spec.family {
        Family::Micz => canonicalize(&(r2 * sym::cone_sin().expr() * sym::phidot().expr())),
        _ => canonicalize(&(r2 * sym::thetadot().expr())),
    }
}

pub fn conserved_quantities(spec: &ProblemSpec) -> Result<Vec<ConservedQuantity>, ProblemError> {
    let l = angular_momentum(spec);
    Ok(match spec.family {
        Family::Kepler | Family::PowerLaw => vec![ConservedQuantity::new("L", l)],
        Family::KeplerDrag => vec![ConservedQuantity::new(
            "L + alpha*theta",
            l + spec.alpha.clone() * sym::theta().expr(),
        )],
        Family::ConeDrag => {
            let (g, _) = spec.g_and_rate()?;
            vec![ConservedQuantity::new(
                "A",
                l * (g * sym::r().expr().powi(3)).pow(crate::expr::rational(-1, 2)),
            )]
        }
        Family::Micz => vec![
            ConservedQuantity::new("L", l.clone()),
            ConservedQuantity::new("P", (l.powi(2) + spec.lambda.clone().powi(2)).sqrt()),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{equals, rational};

    fn kepler_printed() -> (Expr, Expr) {
        let (r, rd, w) = (sym::r().expr(), sym::rdot().expr(), sym::thetadot().expr());
        (
            sym::rddot().expr() - r.clone() * w.clone().powi(2) + sym::mu().expr() / r.clone().powi(2),
            r * sym::thetaddot().expr() + Expr::int(2) * rd * w,
        )
    }

    #[test]
    fn kepler_components() {
        let eq = equations_of_motion(&ProblemSpec::kepler()).unwrap();
        let (radial, transverse) = kepler_printed();
        assert!(equals(&eq.radial, &radial));
        assert!(equals(&eq.transverse, &transverse));
        assert_eq!(eq.chart, vec![sym::t(), sym::r(), sym::theta()]);
    }

    #[test]
    fn family_coincidences() {
        let kepler = equations_of_motion(&ProblemSpec::kepler()).unwrap();
        for other in [
            ProblemSpec::power_law(rational(-3, 1)),
            ProblemSpec::kepler_drag().with_alpha(Expr::zero()),
        ] {
            let eq = equations_of_motion(&other).unwrap();
            assert!(equals(&eq.radial, &kepler.radial));
            assert!(equals(&eq.transverse, &kepler.transverse));
        }
    }

    #[test]
    fn drag_components() {
        let eq = equations_of_motion(&ProblemSpec::kepler_drag()).unwrap();
        let (r, w) = (sym::r().expr(), sym::thetadot().expr());
        let a = sym::alpha().expr();
        let (radial, transverse) = kepler_printed();
        assert!(equals(
            &eq.radial,
            &(radial + a.clone() * sym::rdot().expr() / r.clone().powi(2))
        ));
        assert!(equals(&eq.transverse, &(transverse + a * w / r)));
    }

    #[test]
    fn every_conserved_quantity_is_conserved_on_shell() {
        let specs = [
            ProblemSpec::kepler(),
            ProblemSpec::kepler_drag(),
            ProblemSpec::power_law(rational(-4, 1)),
            ProblemSpec::power_law(rational(-5, 2)),
            ProblemSpec::cone_drag((Expr::int(-1) * sym::t().expr()).exp()),
            ProblemSpec::cone_drag(Expr::one() + sym::t().expr().powi(2)),
            ProblemSpec::micz(),
            ProblemSpec::micz_general(),
        ];
        for spec in specs {
            let eq = equations_of_motion(&spec).unwrap();
            for q in conserved_quantities(&spec).unwrap() {
                let rate = eq.on_shell_rate(&q.expr).unwrap();
                assert!(is_zero(&rate), "{:?} {}: {}", spec.family, q.name, rate.to_prefix());
            }
        }
    }

    #[test]
    fn plain_angular_momentum_is_not_conserved_with_drag() {
        let spec = ProblemSpec::kepler_drag();
        let eq = equations_of_motion(&spec).unwrap();
        assert!(!is_zero(&eq.on_shell_rate(&angular_momentum(&spec)).unwrap()));
    }

    #[test]
    fn poincare_magnitude() {
        let spec = ProblemSpec::micz();
        let qs = conserved_quantities(&spec).unwrap();
        let l = &qs[0].expr;
        let p = &qs[1].expr;
        assert!(equals(
            &p.clone().powi(2),
            &(l.clone().powi(2) + sym::lambda().expr().powi(2))
        ));
    }

    #[test]
    fn validation() {
        let mut spec = ProblemSpec::cone_drag(sym::r().expr());
        assert!(matches!(spec.validate(), Err(ProblemError::GDependence(_))));
        spec.g = None;
        assert_eq!(spec.validate(), Err(ProblemError::MissingG));
        let mut pl = ProblemSpec::power_law(rational(-4, 1));
        pl.alpha = sym::alpha().expr();
        assert_eq!(pl.validate(), Err(ProblemError::SymbolicExponent));
        assert!(ProblemSpec::micz().special_case());
        assert!(!ProblemSpec::micz_general().special_case());
        let numeric = ProblemSpec::micz_general()
            .with_lambda(Expr::rat(1, 2))
            .with_nu(Expr::rat(-1, 8));
        assert!(numeric.special_case());
    }

    #[test]
    fn numeric_params_need_constants() {
        assert!(matches!(
            ProblemSpec::kepler().numeric_params::<f64>(),
            Err(ProblemError::NotNumeric(_))
        ));
        let env = ProblemSpec::kepler().with_mu(Expr::int(2)).numeric_params::<f32>().unwrap();
        assert_eq!(env["mu"], 2.0f32);
    }

    #[test]
    fn g_positivity() {
        let spec = ProblemSpec::cone_drag(Expr::one() - sym::t().expr()).with_mu(Expr::one());
        assert!(matches!(
            spec.check_g_positive(2.0, 20),
            Err(ProblemError::GNotPositive { .. })
        ));
    }
}
