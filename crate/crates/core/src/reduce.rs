//! Reduction of the equations of motion to `u₁″ + Ω²u₁ = 0, u₂′ = 0`.
//!
//! Two pipelines are provided. [`reduce_direct`] substitutes `u = 1/r` and
//! uses the angle as independent variable. The w-variable pipeline
//! ([`nucci_w_system`], [`change_independent`], [`nucci_eliminate`]) rewrites
//! the system in first-order form, trades time for the ignorable angle and
//! eliminates down to the same pair. Every step lands in the trace together
//! with the outcome of its symbolic check.

use serde::Serialize;
use thiserror::Error;

use crate::expr::{
    canonicalize, is_zero, rational, solve_linear, substitute, total_derivative, Bindings, Expr,
    ExprError, Rational, Symbol,
};
use crate::problems::{equations_of_motion, ComponentEquations, Family, ProblemError, ProblemSpec};
use crate::symbols::{self as sym, jet};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReduceError {
    #[error("the {pipeline} pipeline does not handle family `{family}`")]
    Unsupported {
        pipeline: &'static str,
        family: &'static str,
    },
    #[error("elimination failed at step `{0}`")]
    Elimination(String),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Pipeline {
    Direct,
    Nucci,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceStep {
    pub label: String,
    pub expr: Expr,
    pub verified: bool,
}

/// One reading of the frequency of the general-`ν` MICZ oscillator in the
/// angle chart, together with the outcome of its symbolic check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OmegaCandidate {
    pub label: String,
    pub omega_sq: Expr,
    pub symbolic_residual: Expr,
    pub verified: bool,
}

/// A named constant of integration and its value in chart variables.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Constant {
    pub symbol: Symbol,
    pub value: Expr,
}

/// Reduced pair `u₁″ + Ω²u₁ = 0`, `u₂′ = 0`.
///
/// `omega_sq` and `forcing` describe the equation `u″ + Ω²u = K` satisfied
/// by the reciprocal radius before the shift to `u₁`. `u1_def` and `u2_def`
/// are written in the pipeline's own chart; `phase_map` carries that chart to
/// the phase variables `(t, r, ṙ, ψ, ψ̇)`. `constants` name the conserved
/// values that appear as parameters, and `closure` lists relations (such as
/// the cone angle) that hold on every orbit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReducedSystem {
    pub family: Family,
    pub pipeline: Pipeline,
    pub independent: Symbol,
    pub omega_sq: Expr,
    pub forcing: Expr,
    pub u1_def: Expr,
    pub u2_def: Expr,
    pub particular_solution: Option<Expr>,
    pub linearizable: bool,
    pub nonlinear_equation: Option<Expr>,
    pub angle_scale: Expr,
    pub constants: Vec<Constant>,
    pub closure: Vec<Constant>,
    #[serde(serialize_with = "ser_bindings")]
    pub phase_map: Bindings,
    pub omega_candidates: Vec<OmegaCandidate>,
    pub assumptions: Vec<String>,
    pub trace: Vec<TraceStep>,
}

fn ser_bindings<S: serde::Serializer>(b: &Bindings, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut m = s.serialize_map(Some(b.len()))?;
    for (k, v) in b {
        m.serialize_entry(k.name(), v)?;
    }
    m.end()
}

impl ReducedSystem {
    /// `u₁″ + Ω²u₁` in jet symbols of the independent variable.
    pub fn oscillator(&self) -> Expr {
        let u1 = sym::u1();
        canonicalize(
            &(jet(&u1, &self.independent, 2).expr() + self.omega_sq.clone() * u1.expr()),
        )
    }

    /// `u₂′` in jet symbols.
    pub fn conservation(&self) -> Expr {
        jet(&sym::u2(), &self.independent, 1).expr()
    }

    pub fn trace_step(&self, label: &str) -> Option<&TraceStep> {
        self.trace.iter().find(|s| s.label == label)
    }

    pub fn all_verified(&self) -> bool {
        self.trace.iter().all(|s| s.verified)
    }

    /// `u1_def` and `u2_def` in phase variables.
    pub fn phase_definitions(&self) -> Result<(Expr, Expr), ExprError> {
        Ok((
            substitute(&self.u1_def, &self.phase_map)?,
            substitute(&self.u2_def, &self.phase_map)?,
        ))
    }
}

/// Derivatives with respect to the reduced independent variable, taken along
/// the motion and evaluated on the level set of the first constant.
struct Shell {
    chain: Vec<(Symbol, Expr)>,
    per_time: Expr,
    level: Vec<Bindings>,
}

impl Shell {
    fn new(
        eq: &ComponentEquations,
        scale: &Expr,
        constants: &[Constant],
        closure: &[Constant],
        phase_map: &Bindings,
    ) -> Result<Self, ExprError> {
        let (rate, _) = sym::angle_triplet(eq.angle());
        let mut level = Vec::new();
        if let Some(c) = constants.first() {
            let value = substitute(&c.value, phase_map)?;
            if let Some(sol) = solve_linear(&(value - c.symbol.expr()), &rate)? {
                level.push(Bindings::from([(rate.clone(), sol)]));
            }
        }
        for c in closure {
            level.push(Bindings::from([(c.symbol.clone(), c.value.clone())]));
        }
        Ok(Shell {
            chain: eq.time_chain()?,
            per_time: canonicalize(&(scale.clone() * rate.expr())),
            level,
        })
    }

    fn d(&self, f: &Expr) -> Result<Expr, ExprError> {
        let dt = total_derivative(f, &sym::t(), &self.chain)?;
        Ok(canonicalize(&(dt / self.per_time.clone())))
    }

    fn d2(&self, f: &Expr) -> Result<Expr, ExprError> {
        self.d(&self.d(f)?)
    }

    fn on_level(&self, e: &Expr) -> Result<Expr, ExprError> {
        let mut out = canonicalize(e);
        for b in &self.level {
            out = substitute(&out, b)?;
        }
        Ok(out)
    }
}

/// Residuals of the reduced pair after substituting `u1_def`, `u2_def` and
/// the equations of motion. Both vanish identically for a correct reduction.
pub fn pair_residuals(spec: &ProblemSpec, rs: &ReducedSystem) -> Result<(Expr, Expr), ReduceError> {
    let eq = equations_of_motion(spec)?;
    let shell = Shell::new(&eq, &rs.angle_scale, &rs.constants, &rs.closure, &rs.phase_map)?;
    let (u1, u2) = rs.phase_definitions()?;
    let mut osc = shell.d2(&u1)? + rs.omega_sq.clone() * u1.clone();
    if !rs.linearizable {
        osc = osc - substitute(&rs.forcing, &rs.phase_map)?;
    }
    let osc = shell.on_level(&osc)?;
    let cons = shell.on_level(&eq.on_shell_rate(&u2)?)?;
    Ok((osc, cons))
}

fn step(label: &str, expr: Expr, verified: bool) -> TraceStep {
    TraceStep {
        label: label.to_string(),
        expr: canonicalize(&expr),
        verified,
    }
}

fn reciprocal_map() -> Bindings {
    Bindings::from([(sym::u(), sym::r().expr().recip())])
}

/// `μ∫₀^ψ sin(ψ − η)·f(η)⁻² dη`.
fn drag_particular(mu: &Expr, angle: &Symbol, bound: &Symbol, base: Expr) -> Expr {
    let integrand =
        (angle.expr() - bound.expr()).sin() * base.powi(-2);
    canonicalize(&(mu.clone() * Expr::integral(integrand, bound, Expr::zero(), angle)))
}

/// Particular solution of the reciprocal-radius equation.
pub fn particular_solution(spec: &ProblemSpec) -> Result<Expr, ReduceError> {
    let mu = &spec.mu;
    let l = sym::ang_mom().expr();
    Ok(canonicalize(&match spec.family {
        Family::Kepler => mu.clone() * l.powi(-2),
        Family::KeplerDrag => {
            let eta = sym::eta();
            let base = sym::ang_mom0().expr() - spec.alpha.clone() * eta.expr();
            drag_particular(mu, &sym::theta(), &eta, base)
        }
        Family::ConeDrag => mu.clone() * sym::cone_const().expr().powi(-2),
        Family::Micz if spec.special_case() => {
            mu.clone() / (l.powi(2) + spec.lambda.clone().powi(2))
        }
        f => {
            return Err(ReduceError::Unsupported {
                pipeline: "particular-solution",
                family: f.name(),
            })
        }
    }))
}

/// Direct reduction through `u = 1/r`.
pub fn reduce_direct(spec: &ProblemSpec) -> Result<ReducedSystem, ReduceError> {
    let eq = equations_of_motion(spec)?;
    let angle = eq.angle().clone();
    let l = sym::ang_mom();
    let u = sym::u().expr();
    let lam2 = spec.lambda.clone().powi(2);
    let mut trace = vec![
        step("radial component", eq.radial.clone(), true),
        step("transverse component", eq.transverse.clone(), true),
    ];
    let mut closure = Vec::new();
    let mut candidates = Vec::new();
    let mut independent = angle.clone();
    let mut scale = Expr::one();
    let mut linearizable = true;
    let mut nonlinear_equation = None;
    let mut particular = particular_solution(spec).ok();

    let (omega_sq, forcing, u2_def, constant) = match spec.family {
        Family::Kepler => {
            let q = crate::problems::angular_momentum(spec);
            (Expr::one(), spec.mu.clone() * l.expr().powi(-2), q.clone(), (l.clone(), q))
        }
        Family::KeplerDrag => {
            let q = canonicalize(
                &(crate::problems::angular_momentum(spec) + spec.alpha.clone() * angle.expr()),
            );
            let l0 = sym::ang_mom0();
            let current = l0.expr() - spec.alpha.clone() * angle.expr();
            (Expr::one(), spec.mu.clone() * current.powi(-2), q.clone(), (l0, q))
        }
        Family::PowerLaw => {
            let q = crate::problems::angular_momentum(spec);
            let k = spec.power_k().expect("validated power law");
            let kterm = spec.mu.clone() * l.expr().powi(-2);
            let general = u.clone().pow(-k.clone()) * kterm.clone();
            let (om, f) = if k == Rational::from_integer(0.into()) {
                (Expr::one(), kterm)
            } else if k == Rational::from_integer((-1).into()) {
                (Expr::one() - kterm, Expr::zero())
            } else {
                linearizable = false;
                nonlinear_equation = Some(canonicalize(
                    &(jet(&sym::u(), &angle, 2).expr() + u.clone() - general.clone()),
                ));
                (Expr::one(), general)
            };
            (om, f, q.clone(), (l.clone(), q))
        }
        Family::ConeDrag => {
            let a = sym::cone_const();
            let q = crate::problems::conserved_quantities(spec)?[0].expr.clone();
            (Expr::one(), spec.mu.clone() * a.expr().powi(-2), q.clone(), (a, q))
        }
        Family::Micz => {
            let q = crate::problems::angular_momentum(spec);
            let l1sq = l.expr().powi(2) + lam2.clone();
            closure.push(Constant {
                symbol: sym::cone_sin(),
                value: canonicalize(&(l.expr() * l1sq.clone().pow(rational(-1, 2)))),
            });
            let k = spec.mu.clone() / l1sq.clone();
            if spec.special_case() {
                (Expr::one(), k, q.clone(), (l.clone(), q))
            } else {
                let two_nu = Expr::int(2) * spec.nu.clone();
                let raw = [
                    ("a", sym::cone_sin().expr().powi(2) * (l.expr().powi(2) - two_nu.clone())),
                    ("b", (l.expr().powi(2) - two_nu) / l1sq.clone()),
                ];
                let consts = [Constant { symbol: l.clone(), value: q.clone() }];
                let shell = Shell::new(&eq, &Expr::one(), &consts, &closure, &reciprocal_map())?;
                let u_phase = sym::r().expr().recip();
                let upp = shell.d2(&u_phase)?;
                for (label, om) in raw {
                    let om = canonicalize(&om);
                    let res = shell.on_level(&(upp.clone() + om.clone() * u_phase.clone() - k.clone()))?;
                    let ok = is_zero(&res);
                    if ok && !closure.iter().any(|c| c.symbol == sym::omega()) {
                        let om_on_level = shell.on_level(&om)?;
                        closure.push(Constant { symbol: sym::omega(), value: om_on_level.sqrt() });
                    }
                    candidates.push(OmegaCandidate {
                        label: label.to_string(),
                        omega_sq: om,
                        symbolic_residual: res,
                        verified: ok,
                    });
                }
                independent = sym::x();
                scale = sym::omega().expr();
                particular = None;
                let omega = sym::omega().expr();
                (Expr::one(), omega.powi(-2) * k, q.clone(), (l.clone(), q))
            }
        }
    };
    let omega_sq = canonicalize(&omega_sq);
    let forcing = canonicalize(&forcing);
    let constants = vec![Constant { symbol: constant.0, value: canonicalize(&constant.1) }];
    let phase_map = reciprocal_map();
    let u1_def = if linearizable {
        match &particular {
            Some(v) if spec.family != Family::PowerLaw => canonicalize(&(u.clone() - v.clone())),
            _ => canonicalize(&(u.clone() - forcing.clone() / omega_sq.clone())),
        }
    } else {
        u.clone()
    };

    let shell = Shell::new(&eq, &scale, &constants, &closure, &phase_map)?;
    let cons = shell.on_level(&eq.on_shell_rate(&u2_def)?)?;
    trace.push(step("conserved quantity", u2_def.clone(), is_zero(&cons)));
    let u_phase = sym::r().expr().recip();
    let u_eq = shell.on_level(
        &(shell.d2(&u_phase)? + omega_sq.clone() * u_phase.clone()
            - substitute(&forcing, &phase_map)?),
    )?;
    let u_eq_printed = jet(&sym::u(), &independent, 2).expr() + omega_sq.clone() * u.clone() - forcing.clone();
    if spec.family == Family::Micz && spec.special_case() {
        // the same equation before the cone angle is eliminated
        let bare = Shell::new(&eq, &scale, &constants, &[], &phase_map)?;
        let s2 = sym::cone_sin().expr().powi(2);
        let lm2 = l.expr().powi(-2);
        let cone_form = s2.clone() * (Expr::one() + lam2.clone() * lm2.clone());
        let res = bare.on_level(
            &(bare.d2(&u_phase)? + cone_form.clone() * u_phase.clone() - spec.mu.clone() * s2.clone() * lm2.clone()),
        )?;
        trace.push(step(
            "reciprocal-radius equation on the cone",
            jet(&sym::u(), &independent, 2).expr() + cone_form * u.clone() - spec.mu.clone() * s2 * lm2,
            is_zero(&res),
        ));
    }
    trace.push(step("reciprocal-radius equation", u_eq_printed, is_zero(&u_eq)));
    if let Some(v) = &particular {
        trace.push(step("particular solution", v.clone(), true));
    }

    let mut rs = ReducedSystem {
        family: spec.family,
        pipeline: Pipeline::Direct,
        independent,
        omega_sq,
        forcing,
        u1_def,
        u2_def,
        particular_solution: particular,
        linearizable,
        nonlinear_equation,
        angle_scale: scale,
        constants,
        closure,
        phase_map,
        omega_candidates: candidates,
        assumptions: vec!["u2 != 0".into()],
        trace,
    };
    let (osc, cons) = pair_residuals(spec, &rs)?;
    let label = if rs.linearizable { "reduced oscillator" } else { "reduced nonlinear equation" };
    let printed = rs.nonlinear_equation.clone().unwrap_or_else(|| rs.oscillator());
    rs.trace.push(step(label, printed, is_zero(&osc)));
    rs.trace.push(step("reduced conservation law", rs.conservation(), is_zero(&cons)));
    Ok(rs)
}

/// First-order system in `w₁ = r, w₂ = θ, w₃ = ṙ, w₄ = θ̇`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WSystem {
    pub variables: Vec<Symbol>,
    pub rates: Vec<Expr>,
    pub ignorable: Symbol,
}

impl WSystem {
    pub fn rate(&self, w: &Symbol) -> Option<&Expr> {
        self.variables.iter().position(|v| v == w).map(|i| &self.rates[i])
    }
}

fn w_map() -> Bindings {
    Bindings::from([
        (sym::r(), sym::w1().expr()),
        (sym::theta(), sym::w2().expr()),
        (sym::rdot(), sym::w3().expr()),
        (sym::thetadot(), sym::w4().expr()),
    ])
}

fn nucci_phase_map() -> Bindings {
    Bindings::from([
        (sym::w1(), sym::r().expr()),
        (sym::w2(), sym::theta().expr()),
        (sym::w3(), sym::rdot().expr()),
        (sym::w4(), sym::thetadot().expr()),
        (sym::y(), sym::theta().expr()),
    ])
}

fn nucci_supported(spec: &ProblemSpec) -> Result<(), ReduceError> {
    match spec.family {
        Family::Kepler | Family::KeplerDrag => Ok(()),
        f => Err(ReduceError::Unsupported { pipeline: "w-variable", family: f.name() }),
    }
}

pub fn nucci_w_system(spec: &ProblemSpec) -> Result<WSystem, ReduceError> {
    nucci_supported(spec)?;
    let eq = equations_of_motion(spec)?;
    let (rdd, tdd) = eq.accelerations()?;
    let map = w_map();
    let rates = vec![
        sym::w3().expr(),
        sym::w4().expr(),
        substitute(&rdd, &map)?,
        substitute(&tdd, &map)?,
    ];
    if rates.iter().any(|e| e.contains_symbol(&sym::t())) {
        return Err(ReduceError::Elimination("autonomous w-system".into()));
    }
    Ok(WSystem {
        variables: vec![sym::w1(), sym::w2(), sym::w3(), sym::w4()],
        rates,
        ignorable: sym::w2(),
    })
}

/// First-order equations in `y = w₂` for `w₁, w₃, w₄`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AngleSystem {
    pub independent: Symbol,
    pub variables: Vec<Symbol>,
    pub rates: Vec<Expr>,
    pub assumptions: Vec<String>,
}

impl AngleSystem {
    pub fn rate(&self, w: &Symbol) -> Option<&Expr> {
        self.variables.iter().position(|v| v == w).map(|i| &self.rates[i])
    }
}

pub fn change_independent(ws: &WSystem) -> Result<AngleSystem, ReduceError> {
    let speed = ws.rate(&ws.ignorable).cloned().unwrap_or_else(Expr::zero);
    let to_y = Bindings::from([(ws.ignorable.clone(), sym::y().expr())]);
    let mut variables = Vec::new();
    let mut rates = Vec::new();
    for (v, rate) in ws.variables.iter().zip(&ws.rates) {
        if *v == ws.ignorable {
            continue;
        }
        variables.push(v.clone());
        rates.push(substitute(&(rate.clone() / speed.clone()), &to_y)?);
    }
    Ok(AngleSystem {
        independent: sym::y(),
        variables,
        rates,
        assumptions: vec![format!("{} != 0", speed.to_prefix())],
    })
}

pub fn nucci_eliminate(sys: &AngleSystem, spec: &ProblemSpec) -> Result<ReducedSystem, ReduceError> {
    nucci_supported(spec)?;
    let y = sys.independent.clone();
    let (w1, w3, w4) = (sym::w1(), sym::w3(), sym::w4());
    let w1p = jet(&w1, &y, 1);
    let w1pp = jet(&w1, &y, 2);
    let rate = |w: &Symbol| {
        sys.rate(w)
            .cloned()
            .ok_or_else(|| ReduceError::Elimination(format!("missing equation for {}", w.name())))
    };
    let fail = |label: &str| ReduceError::Elimination(label.to_string());
    let drag = spec.family == Family::KeplerDrag;
    let alpha = if drag { spec.alpha.clone() } else { Expr::zero() };
    let beta = sym::beta();
    let mut trace = Vec::new();

    // w₃ from the first equation
    let label = "w3 from dw1/dy";
    let w3_sol = solve_linear(&(rate(&w1)? - w1p.expr()), &w3)?.ok_or_else(|| fail(label))?;
    trace.push(step(label, w3.expr() - w3_sol.clone(), true));
    let elim_w3 = Bindings::from([(w3.clone(), w3_sol.clone())]);

    let label = "dw4/dy without w3";
    let w4p = substitute(&rate(&w4)?, &elim_w3)?;
    let expected = Expr::int(-2) * w4.expr() * w1p.expr() / w1.expr() - alpha.clone() * w1.expr().powi(-2);
    trace.push(step(label, w4p.clone(), is_zero(&(w4p.clone() - expected))));

    // differentiate w₃ = w₄w₁′ and match the third equation
    let label = "second-order equation for w1";
    let chain = [(w1.clone(), w1p.expr()), (w1p.clone(), w1pp.expr()), (w4.clone(), w4p.clone())];
    let w3p_lhs = total_derivative(&w3_sol, &y, &chain)?;
    let w3p_rhs = substitute(&rate(&w3)?, &elim_w3)?;
    let second = canonicalize(&(w3p_lhs - w3p_rhs));
    let w1pp_sol = solve_linear(&second, &w1pp)?.ok_or_else(|| fail(label))?;
    trace.push(step(label, second, true));

    let label = "integrating factor";
    let exact = total_derivative(&(w1.expr().powi(2) * w4.expr()), &y, &chain)?;
    trace.push(step(label, exact.clone(), is_zero(&(exact + alpha.clone()))));

    // with drag the printed combination w₁²w₄ + αy + β vanishes on every
    // orbit, so u₂ carries the conserved value −β instead
    let u2_def = if drag {
        canonicalize(&(-(w1.expr().powi(2) * w4.expr() + alpha.clone() * y.expr())))
    } else {
        canonicalize(&(w1.expr().powi(2) * w4.expr()))
    };
    let label = "conserved quantity";
    let u2_rate = total_derivative(&u2_def, &y, &chain)?;
    trace.push(step(label, u2_def.clone(), is_zero(&u2_rate)));

    let on_second = Bindings::from([(w1pp.clone(), w1pp_sol)]);
    let recip = w1.expr().recip();
    let recip_pp = substitute(&total_derivative(
        &total_derivative(&recip, &y, &chain)?,
        &y,
        &chain,
    )?, &on_second)?;
    let l_now = w1.expr().powi(2) * w4.expr();
    let recip_eq = recip_pp.clone() + recip.clone() - spec.mu.clone() * l_now.clone().powi(-2);
    trace.push(step("reciprocal-radius equation", recip_eq.clone(), is_zero(&recip_eq)));

    let u2 = sym::u2();
    let (u1_def, forcing, particular, level, constant) = if drag {
        // on the level set w₁²w₄ = −(αy + β)
        let level = Bindings::from([(
            w4.clone(),
            canonicalize(&(-(alpha.clone() * y.expr() + beta.expr()) / w1.expr().powi(2))),
        )]);
        let base = alpha.clone() * sym::s().expr() + beta.expr();
        let v = drag_particular(&spec.mu, &y, &sym::s(), base);
        let forcing = canonicalize(&(spec.mu.clone() * (alpha.clone() * y.expr() + beta.expr()).powi(-2)));
        let on_level = substitute(&(recip_pp.clone() + recip.clone() - forcing.clone()), &level)?;
        trace.push(step("level set of the constant", w1.expr().powi(2) * w4.expr() + alpha.clone() * y.expr() + beta.expr(), true));
        trace.push(step("reciprocal-radius equation on the level set", recip_pp.clone() + recip.clone() - forcing.clone(), is_zero(&on_level)));
        let constant = Constant {
            symbol: beta.clone(),
            value: canonicalize(&(-(w1.expr().powi(2) * w4.expr() + alpha.clone() * y.expr()))),
        };
        (canonicalize(&(recip.clone() - v.clone())), forcing, Some(v), level, constant)
    } else {
        // u₂²((1/w₁)″ + 1/w₁) = μ
        let scaled = canonicalize(&(l_now.clone().powi(2) * (recip_pp.clone() + recip.clone()) - spec.mu.clone()));
        trace.push(step("scaled reciprocal-radius equation", scaled.clone(), is_zero(&scaled)));
        let level = Bindings::from([(u2.clone(), l_now.clone())]);
        let constant = Constant { symbol: u2.clone(), value: canonicalize(&l_now) };
        (
            canonicalize(&(spec.mu.clone() - u2.expr().powi(2) / w1.expr())),
            canonicalize(&(spec.mu.clone() * u2.expr().powi(-2))),
            Some(canonicalize(&(spec.mu.clone() * u2.expr().powi(-2)))),
            level,
            constant,
        )
    };
    trace.push(step("u1", u1_def.clone(), true));
    let osc = total_derivative(&total_derivative(&u1_def, &y, &chain)?, &y, &chain)? + u1_def.clone();
    let osc = substitute(&substitute(&osc, &on_second)?, &level)?;
    let mut rs = ReducedSystem {
        family: spec.family,
        pipeline: Pipeline::Nucci,
        independent: y,
        omega_sq: Expr::one(),
        forcing,
        u1_def,
        u2_def,
        particular_solution: particular,
        linearizable: true,
        nonlinear_equation: None,
        angle_scale: Expr::one(),
        constants: vec![constant],
        closure: vec![],
        phase_map: nucci_phase_map(),
        omega_candidates: vec![],
        assumptions: sys.assumptions.clone(),
        trace,
    };
    rs.trace.push(step("reduced oscillator", rs.oscillator(), is_zero(&osc)));
    rs.trace.push(step("reduced conservation law", rs.conservation(), is_zero(&u2_rate)));
    if let Some(bad) = rs.trace.iter().find(|s| !s.verified) {
        return Err(ReduceError::Elimination(bad.label.clone()));
    }
    Ok(rs)
}

/// The whole w-variable pipeline.
pub fn reduce_nucci(spec: &ProblemSpec) -> Result<ReducedSystem, ReduceError> {
    nucci_eliminate(&change_independent(&nucci_w_system(spec)?)?, spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::equals;

    fn w(i: usize) -> Expr {
        [sym::w1, sym::w2, sym::w3, sym::w4][i - 1]().expr()
    }

    #[test]
    fn kepler_w_system() {
        let ws = nucci_w_system(&ProblemSpec::kepler()).unwrap();
        let mu = sym::mu().expr();
        assert!(equals(&ws.rates[2], &(w(1) * w(4).powi(2) - mu / w(1).powi(2))));
        assert!(equals(&ws.rates[3], &(Expr::int(-2) * w(3) * w(4) / w(1))));
    }

    #[test]
    fn drag_w_system_and_zero_drag_limit() {
        let ws = nucci_w_system(&ProblemSpec::kepler_drag()).unwrap();
        let a = sym::alpha().expr();
        assert!(equals(
            &ws.rates[3],
            &(Expr::int(-2) * w(3) * w(4) / w(1) - a * w(4) / w(1).powi(2))
        ));
        let zero = nucci_w_system(&ProblemSpec::kepler_drag().with_alpha(Expr::zero())).unwrap();
        let kepler = nucci_w_system(&ProblemSpec::kepler()).unwrap();
        for (p, q) in zero.rates.iter().zip(&kepler.rates) {
            assert!(equals(p, q));
        }
    }

    #[test]
    fn angle_as_independent_variable() {
        let sys = change_independent(&nucci_w_system(&ProblemSpec::kepler()).unwrap()).unwrap();
        let mu = sym::mu().expr();
        assert!(equals(sys.rate(&sym::w1()).unwrap(), &(w(3) / w(4))));
        assert!(equals(
            sys.rate(&sym::w3()).unwrap(),
            &(w(1) * w(4) - mu / (w(1).powi(2) * w(4)))
        ));
        assert!(equals(sys.rate(&sym::w4()).unwrap(), &(Expr::int(-2) * w(3) / w(1))));
        assert_eq!(sys.assumptions, vec!["w4 != 0".to_string()]);
    }

    #[test]
    fn nucci_kepler() {
        let rs = reduce_nucci(&ProblemSpec::kepler()).unwrap();
        let mu = sym::mu().expr();
        assert!(equals(&rs.u1_def, &(mu - sym::u2().expr().powi(2) / w(1))));
        assert!(equals(&rs.u2_def, &(w(1).powi(2) * w(4))));
        assert!(rs.all_verified());
    }

    #[test]
    fn nucci_drag() {
        let rs = reduce_nucci(&ProblemSpec::kepler_drag()).unwrap();
        let a = sym::alpha().expr();
        let b = sym::beta().expr();
        assert!(equals(&rs.u2_def, &-(w(1).powi(2) * w(4) + a.clone() * sym::y().expr())));
        assert!(rs.trace_step("level set of the constant").is_some_and(|s| equals(&s.expr, &(w(1).powi(2) * w(4) + a * sym::y().expr() + b))));
        assert!(rs.u1_def.contains_integral());
        assert!(rs.all_verified(), "{:#?}", rs.trace);
    }

    #[test]
    fn unsupported_family_for_w_pipeline() {
        assert!(matches!(
            nucci_w_system(&ProblemSpec::micz()),
            Err(ReduceError::Unsupported { .. })
        ));
    }

    #[test]
    fn direct_reductions_verify() {
        let specs = [
            ProblemSpec::kepler(),
            ProblemSpec::kepler_drag(),
            ProblemSpec::power_law(rational(-3, 1)),
            ProblemSpec::power_law(rational(-4, 1)),
            ProblemSpec::power_law(rational(-2, 1)),
            ProblemSpec::cone_drag((-sym::t().expr()).exp()),
            ProblemSpec::micz(),
            ProblemSpec::micz_general(),
        ];
        for spec in specs {
            let rs = reduce_direct(&spec).unwrap();
            for s in &rs.trace {
                assert!(s.verified, "{:?} step `{}`: {}", spec.family, s.label, s.expr.to_infix());
            }
        }
    }

    #[test]
    fn micz_general_candidates() {
        let rs = reduce_direct(&ProblemSpec::micz_general()).unwrap();
        let verdict: Vec<_> = rs.omega_candidates.iter().map(|c| (c.label.as_str(), c.verified)).collect();
        assert_eq!(verdict, vec![("a", false), ("b", true)]);
        assert_eq!(rs.independent, sym::x());
    }

    #[test]
    fn non_linearizable_power_law_is_flagged() {
        let rs = reduce_direct(&ProblemSpec::power_law(rational(-2, 1))).unwrap();
        assert!(!rs.linearizable);
        let printed = jet(&sym::u(), &sym::theta(), 2).expr() + sym::u().expr()
            - sym::mu().expr() * sym::ang_mom().expr().powi(-2) * sym::u().expr().powi(-1);
        assert!(equals(rs.nonlinear_equation.as_ref().unwrap(), &printed));
    }

    #[test]
    fn limits_share_frequency_and_forcing() {
        let kepler = reduce_direct(&ProblemSpec::kepler()).unwrap();
        for other in [
            ProblemSpec::kepler_drag().with_alpha(Expr::zero()),
            ProblemSpec::micz_general().with_lambda(Expr::zero()).with_nu(Expr::zero()),
        ] {
            let rs = reduce_direct(&other).unwrap();
            assert!(equals(&rs.omega_sq, &kepler.omega_sq));
            let f = substitute(
                &rs.forcing,
                &Bindings::from([(sym::ang_mom0(), sym::ang_mom().expr())]),
            )
            .unwrap();
            assert!(equals(&f, &kepler.forcing), "{}", rs.forcing.to_infix());
        }
    }

    #[test]
    fn particular_solutions() {
        let mu = sym::mu().expr();
        let l = sym::ang_mom().expr();
        assert!(equals(
            &particular_solution(&ProblemSpec::kepler()).unwrap(),
            &(mu * l.powi(-2))
        ));
        assert!(particular_solution(&ProblemSpec::kepler_drag()).unwrap().contains_integral());
        assert!(particular_solution(&ProblemSpec::power_law(rational(-4, 1))).is_err());
    }
}
