//! Point symmetries of the reduced pair and their counterparts in the
//! original `(t, r, φ)` chart.
//!
//! Coefficients are [`Cx`] pairs so that the conjugate families built on
//! `e^{±iφ}` can be written once; every linear condition is checked on both
//! components.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::expr::{
    canonicalize, differentiate, eval_numeric, substitute, total_derivative, Bindings, Cx, Env,
    Expr, ExprError, Role, Symbol,
};
use crate::problems::{equations_of_motion, Family, ProblemError, ProblemSpec};
use crate::reduce::ReducedSystem;
use crate::symbols::{self as sym, jet};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymmetryError {
    #[error("chart mismatch: expected [{expected}], found [{found}]")]
    ChartMismatch { expected: String, found: String },
    #[error("generator has {found} dependent coefficients for {expected} dependent variables")]
    CoefficientCount { expected: usize, found: usize },
    #[error("chart must start with an independent variable")]
    NoIndependent,
    #[error("reduced system is not a linear oscillator")]
    NotLinearizable,
    #[error("no catalog for {0}")]
    Unsupported(String),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Vector field `ξ ∂_x + Σ ηᵢ ∂_{uᵢ}` over `chart = [x, u₁, …]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Generator {
    pub name: String,
    pub chart: Vec<Symbol>,
    pub xi: Cx,
    pub etas: Vec<Cx>,
    pub nonlocal: bool,
}

impl Generator {
    pub fn new(name: &str, chart: Vec<Symbol>, xi: Cx, etas: Vec<Cx>) -> Result<Self, SymmetryError> {
        if chart.first().map(Symbol::role) != Some(Role::Independent) {
            return Err(SymmetryError::NoIndependent);
        }
        if etas.len() + 1 != chart.len() {
            return Err(SymmetryError::CoefficientCount { expected: chart.len() - 1, found: etas.len() });
        }
        let xi = xi.canonical();
        let etas: Vec<Cx> = etas.iter().map(Cx::canonical).collect();
        let nonlocal = xi.contains_integral() || etas.iter().any(Cx::contains_integral);
        Ok(Generator { name: name.to_string(), chart, xi, etas, nonlocal })
    }

    fn real(name: &str, chart: &[Symbol], xi: Expr, etas: Vec<Expr>) -> Result<Self, SymmetryError> {
        Self::new(name, chart.to_vec(), Cx::real(xi), etas.into_iter().map(Cx::real).collect())
    }

    pub fn independent(&self) -> &Symbol {
        &self.chart[0]
    }

    pub fn dependents(&self) -> &[Symbol] {
        &self.chart[1..]
    }

    /// All coefficients, `ξ` first.
    pub fn coefficients(&self) -> impl Iterator<Item = &Cx> {
        std::iter::once(&self.xi).chain(&self.etas)
    }

    pub fn is_real(&self) -> bool {
        self.coefficients().all(Cx::is_real)
    }

    /// Real and imaginary parts as separate real fields.
    pub fn components(&self) -> [(Expr, Vec<Expr>); 2] {
        let part = |k: usize| {
            (self.xi.parts()[k].clone(), self.etas.iter().map(|e| e.parts()[k].clone()).collect())
        };
        [part(0), part(1)]
    }

    pub fn equals(&self, other: &Generator) -> bool {
        self.chart == other.chart
            && self.xi.equals(&other.xi)
            && self.etas.len() == other.etas.len()
            && self.etas.iter().zip(&other.etas).all(|(a, b)| a.equals(b))
    }

    pub fn substitute(&self, b: &Bindings) -> Result<Self, SymmetryError> {
        let s = |c: &Cx| c.map(|e| substitute(e, b));
        Generator::new(&self.name, self.chart.clone(), s(&self.xi)?, self.etas.iter().map(s).collect::<Result<_, _>>()?)
    }
}

/// Second prolongation of a generator.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProlongedField {
    pub base: Generator,
    pub phi1: Vec<Cx>,
    pub phi2: Vec<Cx>,
}

/// Total derivative on the jet space of a chart, up to third-order jets.
fn jet_chain(chart: &[Symbol]) -> Vec<(Symbol, Expr)> {
    let x = &chart[0];
    let mut chain = Vec::new();
    for u in &chart[1..] {
        for k in 0..3 {
            chain.push((jet(u, x, k), jet(u, x, k + 1).expr()));
        }
    }
    chain
}

fn prolong_with(
    g: &Generator,
    d: &dyn Fn(&Expr) -> Result<Expr, ExprError>,
    jets: &[(Expr, Expr)],
) -> Result<(Vec<Cx>, Vec<Cx>), ExprError> {
    let dxi = g.xi.map(d)?;
    let mut phi1 = Vec::new();
    let mut phi2 = Vec::new();
    for (eta, (u1, u2)) in g.etas.iter().zip(jets) {
        let p1 = eta.map(d)? - dxi.scale(u1);
        let p2 = p1.map(d)? - dxi.scale(u2);
        phi1.push(p1.canonical());
        phi2.push(p2.canonical());
    }
    Ok((phi1, phi2))
}

pub fn prolong2(g: &Generator) -> Result<ProlongedField, SymmetryError> {
    let x = g.independent().clone();
    let chain = jet_chain(&g.chart);
    let d = |e: &Expr| total_derivative(e, &x, &chain);
    let jets: Vec<_> = g.dependents().iter().map(|u| (jet(u, &x, 1).expr(), jet(u, &x, 2).expr())).collect();
    let (phi1, phi2) = prolong_with(g, &d, &jets)?;
    Ok(ProlongedField { base: g.clone(), phi1, phi2 })
}

fn reduced_chart(rs: &ReducedSystem) -> Vec<Symbol> {
    vec![rs.independent.clone(), sym::u1(), sym::u2()]
}

fn names(chart: &[Symbol]) -> String {
    chart.iter().map(|s| s.name().to_string()).collect::<Vec<_>>().join(", ")
}

fn expect_chart(found: &[Symbol], expected: &[Symbol]) -> Result<(), SymmetryError> {
    if found == expected {
        Ok(())
    } else {
        Err(SymmetryError::ChartMismatch { expected: names(expected), found: names(found) })
    }
}

/// `V^{[2]}` applied to `u₁″ + Ω²u₁` and `u₂′`, reduced on shell.
///
/// Both entries are identically zero exactly when `g` is a point symmetry of
/// the reduced pair.
pub fn determining_residual(g: &Generator, rs: &ReducedSystem) -> Result<[Cx; 2], SymmetryError> {
    let chart = reduced_chart(rs);
    expect_chart(&g.chart, &chart)?;
    let x = &chart[0];
    let (u1, u2) = (sym::u1(), sym::u2());
    let f1 = rs.oscillator();
    let f2 = rs.conservation();
    let pf = prolong2(g)?;
    let apply = |f: &Expr| -> Result<Cx, ExprError> {
        let mut out = g.xi.scale(&differentiate(f, x)?);
        for (i, u) in [&u1, &u2].into_iter().enumerate() {
            out = out + g.etas[i].scale(&differentiate(f, u)?);
            out = out + pf.phi1[i].scale(&differentiate(f, &jet(u, x, 1))?);
            out = out + pf.phi2[i].scale(&differentiate(f, &jet(u, x, 2))?);
        }
        Ok(out)
    };
    let shell = Bindings::from([
        (jet(&u1, x, 2), canonicalize(&(-rs.omega_sq.clone() * u1.expr()))),
        (jet(&u1, x, 3), canonicalize(&(-rs.omega_sq.clone() * jet(&u1, x, 1).expr()))),
        (jet(&u2, x, 1), Expr::zero()),
        (jet(&u2, x, 2), Expr::zero()),
        (jet(&u2, x, 3), Expr::zero()),
    ]);
    let on_shell = |c: Cx| c.map(|e| substitute(e, &shell));
    Ok([on_shell(apply(&f1)?)?, on_shell(apply(&f2)?)?])
}

pub fn is_symmetry(g: &Generator, rs: &ReducedSystem) -> Result<bool, SymmetryError> {
    Ok(determining_residual(g, rs)?.iter().all(Cx::is_zero))
}

/// The eight point symmetries of `u₁″ + Ω²u₁ = 0` and `∂_{u₂}`.
pub fn reduced_catalog(rs: &ReducedSystem) -> Result<Vec<Generator>, SymmetryError> {
    if !rs.linearizable || rs.omega_sq.free_symbols().iter().any(|s| s.role() != Role::Parameter) {
        return Err(SymmetryError::NotLinearizable);
    }
    let chart = reduced_chart(rs);
    let x = chart[0].expr();
    let u = sym::u1().expr();
    let w = canonicalize(&rs.omega_sq.clone().sqrt());
    let (s, c) = ((w.clone() * x.clone()).sin(), (w.clone() * x.clone()).cos());
    let (s2, c2) = ((Expr::int(2) * w.clone() * x.clone()).sin(), (Expr::int(2) * w.clone() * x.clone()).cos());
    let z = Expr::zero;
    let x_name = chart[0].name();
    let d_x = format!("d_{x_name}");
    [
        (d_x.as_str(), Expr::one(), vec![z(), z()]),
        ("u1 d_u1", z(), vec![u.clone(), z()]),
        ("sin d_u1", z(), vec![s.clone(), z()]),
        ("cos d_u1", z(), vec![c.clone(), z()]),
        ("quadratic sin", s2.clone(), vec![w.clone() * u.clone() * c2.clone(), z()]),
        ("quadratic cos", c2, vec![-w.clone() * u.clone() * s2, z()]),
        ("projective cos", u.clone() * c.clone(), vec![-w.clone() * u.clone().powi(2) * s.clone(), z()]),
        ("projective sin", u.clone() * s, vec![w * u.clone().powi(2) * c, z()]),
        ("d_u2", z(), vec![z(), Expr::one()]),
    ]
    .into_iter()
    .map(|(name, xi, etas)| Generator::real(name, &chart, xi, etas))
    .collect()
}

/// Numeric rank of the coefficient vectors `(ξ, η₁, η₂)` of `gens`, each
/// part of a complex coefficient counted separately, sampled at `points`
/// random chart points. Parameters take the values in `params`.
pub fn numeric_rank(gens: &[Generator], params: &Env<f64>, points: usize, seed: u64) -> Result<usize, SymmetryError> {
    let Some(first) = gens.first() else { return Ok(0) };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for _ in 0..points {
        let mut env = params.clone();
        for s in &first.chart {
            env.insert(s.name().to_string(), rng.gen_range(0.3..1.7));
        }
        for part in 0..2 {
            for k in 0..first.chart.len() {
                let mut row = Vec::with_capacity(gens.len());
                for g in gens {
                    let c = g.coefficients().nth(k).expect("chart length checked");
                    row.push(eval_numeric(c.parts()[part], &env, 1e-12)?);
                }
                rows.push(row);
            }
        }
    }
    Ok(matrix_rank(rows, 1e-9))
}

fn matrix_rank(mut a: Vec<Vec<f64>>, rel_tol: f64) -> usize {
    let cols = a.first().map_or(0, Vec::len);
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..a.len()).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())) else { break };
        if a[p][col].abs() <= rel_tol * scale {
            continue;
        }
        a.swap(rank, p);
        for i in rank + 1..a.len() {
            let f = a[i][col] / a[rank][col];
            for j in col..cols {
                a[i][j] -= f * a[rank][j];
            }
        }
        rank += 1;
    }
    rank
}

fn original_chart() -> Vec<Symbol> {
    vec![sym::t(), sym::r(), sym::phi()]
}

/// `2∫ f dt` with the time integral kept unevaluated.
fn time_integral(f: Expr) -> Expr {
    Expr::int(2) * Expr::integral(f, &sym::tau(), Expr::zero(), &sym::t())
}

fn cx_time_integral(f: &Cx) -> Cx {
    Cx::new(time_integral(f.re.clone()), time_integral(f.im.clone()))
}

/// Builds the nine fields from a squared angular momentum `l2` and the
/// scaling field's correction coefficient `k` (zero for Kepler).
fn lambda_family(l2: &Expr, k: &Expr) -> Result<Vec<Generator>, SymmetryError> {
    let chart = original_chart();
    let (t, r, rd, phi) = (sym::t().expr(), sym::r().expr(), sym::rdot().expr(), sym::phi().expr());
    let mu = sym::mu().expr();
    let l = canonicalize(&l2.clone().sqrt());
    let l3 = canonicalize(&(l2.clone() * l.clone()));
    let z = || Cx::zero();
    let re = Cx::real;
    let mut out = vec![
        Generator::new(
            "Λ1",
            chart.clone(),
            re(Expr::int(-3) * t.clone() + time_integral(k.clone() * r.clone())),
            vec![re(Expr::int(-2) * r.clone() + k.clone() * r.clone().powi(2)), z()],
        )?,
        Generator::new("Λ2", chart.clone(), z(), vec![z(), re(Expr::one())])?,
        Generator::new(
            "Λ3",
            chart.clone(),
            re(time_integral(mu.clone() * r.clone()) - Expr::int(2) * l2.clone() * t),
            vec![re(mu.clone() * r.clone() - l2.clone()), z()],
        )?,
    ];
    for (sign, tag) in [(1, "+"), (-1, "-")] {
        let e1 = Cx::exp_i(sign, phi.clone());
        let e2 = Cx::exp_i(sign, Expr::int(2) * phi.clone());
        let i = Cx::i().scale(&Expr::int(sign));
        out.push(Generator::new(
            &format!("Λ4{tag}"),
            chart.clone(),
            cx_time_integral(&e1.scale(&r)),
            vec![e1.scale(&r.clone().powi(2)), z()],
        )?);
        let m6 = mu.clone() * r.clone() + Expr::int(3) * l2.clone();
        out.push(Generator::new(
            &format!("Λ6{tag}"),
            chart.clone(),
            cx_time_integral(&e1.scale(&m6)),
            vec![e2.scale(&(r.clone() * m6.clone())), e2.scale(l2)],
        )?);
        let minus = mu.clone() - l.clone() / r.clone();
        let plus = mu.clone() + l.clone() / r.clone();
        let bracket = re(Expr::int(2) * rd.clone() * l3.clone()) + i.scale(&(r.clone() * minus.clone() * plus));
        out.push(Generator::new(
            &format!("Λ8{tag}"),
            chart.clone(),
            cx_time_integral(&(bracket.clone() * e1.clone())),
            vec![bracket.scale(&r), e1.scale(&(l2.clone() * minus))],
        )?);
    }
    // Λ1 Λ2 Λ3 Λ4+ Λ6+ Λ8+ Λ4- Λ6- Λ8- → Λ1 Λ2 Λ3 Λ4± Λ6± Λ8±
    let order = [0, 1, 2, 3, 6, 4, 7, 5, 8];
    Ok(order.iter().map(|&k| out[k].clone()).collect())
}

/// Nine-field catalog of the MICZ problem on its cone, with
/// `L₁² = L² + λ²` carried by the parameter `L1`.
///
/// For the Kepler family `λ = 0` and `L1` is replaced by `L`.
pub fn micz_catalog(spec: &ProblemSpec) -> Result<Vec<Generator>, SymmetryError> {
    match spec.family {
        Family::Micz if spec.special_case() => {
            let l1sq = sym::ang_mom1().expr().powi(2);
            let k = canonicalize(&(Expr::int(2) * spec.mu.clone() * spec.lambda.clone().powi(2) / l1sq.clone()));
            let gens = lambda_family(&l1sq, &k)?;
            let mu = Bindings::from([(sym::mu(), spec.mu.clone())]);
            gens.iter().map(|g| g.substitute(&mu)).collect()
        }
        Family::Kepler => {
            let l_for_l1 = Bindings::from([(sym::ang_mom1(), sym::ang_mom().expr())]);
            let micz = ProblemSpec::micz().with_mu(spec.mu.clone()).with_lambda(Expr::zero());
            micz_catalog(&micz)?.iter().map(|g| g.substitute(&l_for_l1)).collect()
        }
        f => Err(SymmetryError::Unsupported(format!("{} (general ν)", f.name()))),
    }
}

/// Catalog of the Kepler problem in the `(t, r, φ)` chart.
pub fn kepler_catalog() -> Result<Vec<Generator>, SymmetryError> {
    lambda_family(&sym::ang_mom().expr().powi(2), &Expr::zero())
}

/// MICZ motion on the cone, with the level set `r²φ̇ = L₁` (`L` for Kepler).
struct ConeShell {
    chain: Vec<(Symbol, Expr)>,
    level: Bindings,
    closure: Bindings,
    lambda: Expr,
    mu: Expr,
}

impl ConeShell {
    fn new(spec: &ProblemSpec) -> Result<Self, SymmetryError> {
        let lambda = match spec.family {
            Family::Kepler => Expr::zero(),
            Family::Micz if spec.special_case() => spec.lambda.clone(),
            f => return Err(SymmetryError::Unsupported(f.name().to_string())),
        };
        let cone = ProblemSpec::micz().with_mu(spec.mu.clone()).with_lambda(lambda.clone());
        let l1 = match spec.family {
            Family::Kepler => sym::ang_mom().expr(),
            _ => sym::ang_mom1().expr(),
        };
        let level = Bindings::from([(sym::phidot(), canonicalize(&(l1.clone() * sym::r().expr().powi(-2))))]);
        let closure = Bindings::from([(
            sym::cone_sin(),
            canonicalize(&((l1.clone().powi(2) - lambda.clone().powi(2)).sqrt() / l1)),
        )]);
        Ok(ConeShell {
            chain: equations_of_motion(&cone)?.time_chain()?,
            level,
            closure,
            lambda,
            mu: spec.mu.clone(),
        })
    }

    fn dt(&self, e: &Expr) -> Result<Expr, ExprError> {
        total_derivative(e, &sym::t(), &self.chain)
    }

    fn dphi(&self, e: &Expr) -> Result<Expr, ExprError> {
        Ok(canonicalize(&(self.dt(e)? / sym::phidot().expr())))
    }

    fn on_level(&self, e: &Expr) -> Result<Expr, ExprError> {
        substitute(&substitute(e, &self.level)?, &self.closure)
    }

    fn u2(&self) -> Expr {
        canonicalize(&(sym::cone_sin().expr() * sym::r().expr().powi(2) * sym::phidot().expr()))
    }

    fn u1(&self) -> Expr {
        let u2 = self.u2();
        canonicalize(&(sym::r().expr().recip() - self.mu.clone() / (u2.powi(2) + self.lambda.clone().powi(2))))
    }
}

/// Maps a `(t, r, φ)` field of the MICZ (or Kepler) problem to the reduced
/// chart `(φ, u₁, u₂)` with `u₂ = Sr²φ̇ = L` and `u₁ = 1/r − μ/(u₂² + λ²)`.
///
/// `σ = ξ^φ`, `Σ = S(2ξ^r rφ̇ + r²(σ̇ − φ̇ξ̇^t))` and
/// `η₁ = −ξ^r/r² + 2μu₂(u₂² + λ²)^{-2} Σ`, with dots taken along the motion.
/// The result is expressed in phase variables.
pub fn back_transform(g: &Generator, spec: &ProblemSpec) -> Result<Generator, SymmetryError> {
    expect_chart(&g.chart, &original_chart())?;
    let sh = ConeShell::new(spec)?;
    let (r, w) = (sym::r().expr(), sym::phidot().expr());
    let (xt, xr, sigma) = (&g.xi, &g.etas[0], &g.etas[1]);
    let dsigma = sigma.map(|e| sh.dt(e))?;
    let dxt = xt.map(|e| sh.dt(e))?;
    let big_sigma = (xr.scale(&(Expr::int(2) * r.clone() * w.clone()))
        + (dsigma - dxt.scale(&w)).scale(&r.clone().powi(2)))
    .scale(&sym::cone_sin().expr());
    let u2 = sh.u2();
    let lam2 = sh.lambda.clone().powi(2);
    let coupling = Expr::int(2) * sh.mu.clone() * u2.clone() * (u2.powi(2) + lam2).powi(-2);
    let eta1 = xr.scale(&(-r.powi(-2))) + big_sigma.scale(&coupling);
    let close = |c: &Cx| c.map(|e| substitute(e, &sh.closure));
    Generator::new(
        &g.name,
        vec![sym::phi(), sym::u1(), sym::u2()],
        close(sigma)?,
        vec![close(&eta1)?, close(&big_sigma)?],
    )
}

/// Determining residuals of a back-transformed field on the reduced MICZ
/// pair `u₁″ + u₁ = 0`, `u₂′ = 0`, evaluated along the motion on the level
/// set `u₂ = L₁`.
pub fn cone_residual(w: &Generator, spec: &ProblemSpec) -> Result<[Cx; 2], SymmetryError> {
    expect_chart(&w.chart, &[sym::phi(), sym::u1(), sym::u2()])?;
    let sh = ConeShell::new(spec)?;
    let d = |e: &Expr| sh.dphi(e);
    let u1p = d(&sh.u1())?;
    let u1pp = d(&u1p)?;
    let u2p = d(&sh.u2())?;
    let u2pp = d(&u2p)?;
    let (phi1, phi2) = prolong_with(w, &d, &[(u1p, u1pp), (u2p, u2pp)])?;
    let r1 = phi2[0].clone() + w.etas[0].clone();
    let r2 = phi1[1].clone();
    let lv = |c: Cx| c.map(|e| sh.on_level(e));
    Ok([lv(r1)?, lv(r2)?])
}

/// Alternative readings of the catalog entries whose printed form is
/// ambiguous, obtained by mapping the corresponding reduced-chart fields back
/// to `(t, r, φ)`. Entries without an alternative are omitted.
pub fn amended_readings(spec: &ProblemSpec) -> Result<Vec<Generator>, SymmetryError> {
    let (l2, lambda) = match spec.family {
        Family::Micz if spec.special_case() => (sym::ang_mom1().expr().powi(2), spec.lambda.clone()),
        Family::Kepler => (sym::ang_mom().expr().powi(2), Expr::zero()),
        f => return Err(SymmetryError::Unsupported(format!("{} (general ν)", f.name()))),
    };
    let chart = original_chart();
    let (t, r, rd, phi) = (sym::t().expr(), sym::r().expr(), sym::rdot().expr(), sym::phi().expr());
    let mu = spec.mu.clone();
    let l = canonicalize(&l2.clone().sqrt());
    let re = Cx::real;
    let z = Cx::zero;
    let mut out = Vec::new();
    if !crate::expr::is_zero(&lambda) {
        let k = Expr::int(2) * mu.clone() * lambda.powi(2) / l2.clone().powi(2);
        out.push(Generator::new(
            "Λ1",
            chart.clone(),
            re(Expr::int(-3) * t.clone() + time_integral(k.clone() * r.clone())),
            vec![re(Expr::int(-2) * r.clone() + k * r.clone().powi(2)), z()],
        )?);
    }
    out.push(Generator::new(
        "Λ3",
        chart.clone(),
        re(time_integral(mu.clone() * r.clone()) - Expr::int(2) * l2.clone() * t),
        vec![re(r.clone() * (mu.clone() * r.clone() - l2.clone())), z()],
    )?);
    let mut sixes = Vec::new();
    let mut eights = Vec::new();
    for (sign, tag) in [(1, "+"), (-1, "-")] {
        let e1 = Cx::exp_i(sign, phi.clone());
        let e2 = Cx::exp_i(sign, Expr::int(2) * phi.clone());
        let i = Cx::i().scale(&Expr::int(sign));
        sixes.push(Generator::new(
            &format!("Λ6{tag}"),
            chart.clone(),
            cx_time_integral(&(i.clone() * e2.scale(&(mu.clone() * r.clone())))),
            vec![(i.clone() * e2.clone()).scale(&(r.clone() * (mu.clone() * r.clone() - l2.clone()))), e2.scale(&l2)],
        )?);
        let rate = re(l2.clone() * l.clone() * rd.clone())
            + i.scale(&((l2.clone() / r.clone() - mu.clone()) * (l2.clone() - Expr::int(2) * mu.clone() * r.clone())));
        let half = Cx::real(Expr::rat(1, 2));
        eights.push(Generator::new(
            &format!("Λ8{tag}"),
            chart.clone(),
            cx_time_integral(&(half * rate * e1.clone())),
            vec![
                (i * e1.clone()).scale(&(l2.clone() - mu.clone() * r.clone()).powi(2)),
                e1.scale(&(l2.clone() * (mu.clone() - l2.clone() / r.clone()))),
            ],
        )?);
    }
    out.extend(sixes);
    out.extend(eights);
    Ok(out)
}

/// Catalog field with its back-transformation and certification.
#[derive(Clone, Debug, Serialize)]
pub struct CertifiedGenerator {
    pub original: Generator,
    pub reduced: Generator,
    pub residual: [Cx; 2],
    pub verified: bool,
}

impl CertifiedGenerator {
    pub fn new(original: Generator, spec: &ProblemSpec) -> Result<Self, SymmetryError> {
        let reduced = back_transform(&original, spec)?;
        let residual = cone_residual(&reduced, spec)?;
        let verified = residual.iter().all(Cx::is_zero);
        Ok(CertifiedGenerator { original, reduced, residual, verified })
    }
}

/// A named catalog entry: the printed reading and, where one exists, the
/// amended reading. An entry is accepted when either reading certifies.
#[derive(Clone, Debug, Serialize)]
pub struct CatalogEntry {
    pub name: String,
    pub printed: CertifiedGenerator,
    pub amended: Option<CertifiedGenerator>,
}

impl CatalogEntry {
    pub fn accepted(&self) -> Option<&CertifiedGenerator> {
        if self.printed.verified {
            Some(&self.printed)
        } else {
            self.amended.as_ref().filter(|a| a.verified)
        }
    }
}

pub fn certify_micz_catalog(spec: &ProblemSpec) -> Result<Vec<CatalogEntry>, SymmetryError> {
    let mut amended = amended_readings(spec)?;
    micz_catalog(spec)?
        .into_iter()
        .map(|g| {
            let alt = amended.iter().position(|a| a.name == g.name).map(|k| amended.remove(k));
            let printed = CertifiedGenerator::new(g, spec)?;
            let amended = match alt {
                Some(a) if !printed.verified => Some(CertifiedGenerator::new(a, spec)?),
                _ => None,
            };
            Ok(CatalogEntry { name: printed.original.name.clone(), printed, amended })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::rational;
    use crate::reduce::reduce_direct;

    fn kepler_rs() -> ReducedSystem {
        reduce_direct(&ProblemSpec::kepler()).unwrap()
    }

    fn gen(rs: &ReducedSystem, xi: Expr, e1: Expr) -> Generator {
        Generator::real("g", &reduced_chart(rs), xi, vec![e1, Expr::zero()]).unwrap()
    }

    #[test]
    fn prolongation_examples() {
        let rs = kepler_rs();
        let th = sym::theta().expr();
        let pf = prolong2(&gen(&rs, Expr::one(), Expr::zero())).unwrap();
        assert!(pf.phi1.iter().chain(&pf.phi2).all(Cx::is_zero));
        let pf = prolong2(&gen(&rs, Expr::zero(), sym::u1().expr())).unwrap();
        assert_eq!(pf.phi1[0].re, jet(&sym::u1(), &sym::theta(), 1).expr());
        assert_eq!(pf.phi2[0].re, jet(&sym::u1(), &sym::theta(), 2).expr());
        let pf = prolong2(&gen(&rs, Expr::zero(), th.clone().sin())).unwrap();
        assert!(crate::expr::equals(&pf.phi1[0].re, &th.clone().cos()));
        assert!(crate::expr::equals(&pf.phi2[0].re, &-th.sin()));
    }

    #[test]
    fn negative_control_is_not_a_symmetry() {
        let rs = kepler_rs();
        let g = gen(&rs, sym::u1().expr(), Expr::zero());
        assert!(!is_symmetry(&g, &rs).unwrap());
    }

    #[test]
    fn chart_mismatch_is_reported() {
        let rs = kepler_rs();
        let g = Generator::real("g", &[sym::phi(), sym::u1(), sym::u2()], Expr::one(), vec![Expr::zero(), Expr::zero()]).unwrap();
        assert!(matches!(determining_residual(&g, &rs), Err(SymmetryError::ChartMismatch { .. })));
    }

    #[test]
    fn catalogs_certify() {
        let specs = [
            ProblemSpec::kepler(),
            ProblemSpec::power_law(rational(-4, 1)),
            ProblemSpec::micz(),
        ];
        for spec in specs {
            let rs = reduce_direct(&spec).unwrap();
            let cat = reduced_catalog(&rs).unwrap();
            assert_eq!(cat.len(), 9);
            for g in &cat {
                let res = determining_residual(g, &rs).unwrap();
                assert!(res.iter().all(Cx::is_zero), "{} {}: {:?}", spec.family.name(), g.name, res);
            }
            let params = Env::from([("mu".into(), 0.5), ("L".into(), 1.3), ("lambda".into(), 0.4), ("S".into(), 0.9)]);
            assert_eq!(numeric_rank(&cat, &params, 5, 7).unwrap(), 9);
        }
    }

    #[test]
    fn rotation_back_transforms_to_rotation() {
        let spec = ProblemSpec::micz();
        let cat = micz_catalog(&spec).unwrap();
        let w = back_transform(&cat[1], &spec).unwrap();
        assert_eq!(cat[1].name, "Λ2");
        assert!(w.xi.equals(&Cx::real(Expr::one())));
        assert!(w.etas.iter().all(Cx::is_zero));
    }

    #[test]
    fn kepler_entries_are_accepted() {
        let entries = certify_micz_catalog(&ProblemSpec::kepler()).unwrap();
        let printed: Vec<_> = entries.iter().filter(|e| e.printed.verified).map(|e| e.name.as_str()).collect();
        assert_eq!(printed, ["Λ1", "Λ2", "Λ4+", "Λ4-"]);
        assert!(entries.iter().all(|e| e.accepted().is_some()));
        let w = &entries[3].printed.reduced;
        assert!(w.etas[0].equals(&Cx::exp_i(1, sym::phi().expr()).scale(&Expr::int(-1))));
    }

    #[test]
    fn nonlocal_flags() {
        let cat = micz_catalog(&ProblemSpec::micz()).unwrap();
        let flags: Vec<_> = cat.iter().map(|g| (g.name.as_str(), g.nonlocal)).collect();
        assert_eq!(
            flags,
            [("Λ1", true), ("Λ2", false), ("Λ3", true), ("Λ4+", true), ("Λ4-", true), ("Λ6+", true), ("Λ6-", true), ("Λ8+", true), ("Λ8-", true)]
        );
    }

    #[test]
    fn lambda_zero_limit() {
        let spec = ProblemSpec::micz().with_lambda(Expr::zero());
        let l = Bindings::from([(sym::ang_mom1(), sym::ang_mom().expr())]);
        let kep = kepler_catalog().unwrap();
        for (m, k) in micz_catalog(&spec).unwrap().iter().zip(&kep) {
            assert!(m.substitute(&l).unwrap().equals(k), "{}", m.name);
        }
        let t = sym::t().expr();
        assert!(kep[0].xi.equals(&Cx::real(Expr::int(-3) * t)));
    }
}
