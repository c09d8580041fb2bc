//! Numerical oracle: orbit integration and quantitative checks of the
//! symbolic results.
//!
//! The equations of motion are coded here by hand, independently of
//! [`crate::problems`], so that agreement between the two is evidence rather
//! than a tautology.

mod defect;
pub mod fit;
pub mod rk;

use serde::Serialize;
use thiserror::Error;

pub use defect::{symmetry_defect, DefectMeasure, DefectOptions, RATIO_BAND};

use crate::expr::{eval_numeric, substitute, Env, Expr, ExprError};
use crate::problems::{ConservedQuantity, Family, ProblemError, ProblemSpec};
use crate::reduce::ReducedSystem;
use crate::Real;
use fit::{fit_frequency, harmonic_basis, lstsq, Pchip};
use rk::{dopri5, Halt, Solution, StepControl};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumError {
    #[error("invalid initial state: {0}")]
    InvalidState(String),
    #[error("step size underflow at t = {0}")]
    StepUnderflow(f64),
    #[error("non-finite state at t = {0}")]
    NonFinite(f64),
    #[error("step budget exhausted at t = {0}")]
    TooManySteps(f64),
    #[error("degenerate orbit: {0}")]
    Degenerate(String),
    #[error("angle is not monotone along the orbit")]
    NonMonotone,
    #[error("fit failed: {0}")]
    Fit(String),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OrbitState<T> {
    pub t: T,
    pub r: T,
    pub r_dot: T,
    pub angle: T,
    pub angle_dot: T,
}

impl<T: Real> OrbitState<T> {
    pub fn new(r: T, r_dot: T, angle: T, angle_dot: T) -> Self {
        OrbitState { t: T::zero(), r, r_dot, angle, angle_dot }
    }

    fn from_vec(t: T, y: &[T; 4]) -> Self {
        OrbitState { t, r: y[0], r_dot: y[1], angle: y[2], angle_dot: y[3] }
    }

    fn to_vec(self) -> [T; 4] {
        [self.r, self.r_dot, self.angle, self.angle_dot]
    }

    fn is_valid(&self, r_min: T) -> bool {
        [self.t, self.r, self.r_dot, self.angle, self.angle_dot].iter().all(|v| v.is_finite())
            && self.r > r_min
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct OrbitOptions<T> {
    pub tol: T,
    pub r_min: T,
    pub t_end: T,
    pub max_steps: usize,
}

impl<T: Real> Default for OrbitOptions<T> {
    fn default() -> Self {
        OrbitOptions {
            tol: T::lit(1e-10),
            r_min: T::lit(1e-6),
            t_end: T::lit(50.0),
            max_steps: 2_000_000,
        }
    }
}

/// Integrated orbit with continuous output.
#[derive(Clone, Debug)]
pub struct Trajectory<T> {
    pub samples: Vec<OrbitState<T>>,
    pub spec: ProblemSpec,
    pub options: OrbitOptions<T>,
    /// The orbit came within `r_min` of the origin and was cut short.
    pub singular: bool,
    /// Numeric parameters, including the cone sine `S` for MICZ.
    pub params: Env<T>,
    solution: Solution<T, 4>,
}

impl<T: Real> Trajectory<T> {
    pub fn initial(&self) -> OrbitState<T> {
        self.samples[0]
    }

    pub fn t_end(&self) -> T {
        self.samples.last().map(|s| s.t).unwrap_or_else(T::zero)
    }

    /// State at any time inside the integrated window.
    pub fn state_at(&self, t: T) -> Option<OrbitState<T>> {
        self.solution.at(t).map(|y| OrbitState::from_vec(t, &y))
    }

    pub fn angle_name(&self) -> &'static str {
        if self.spec.family == Family::Micz {
            "phi"
        } else {
            "theta"
        }
    }

    /// Evaluation environment at a state: phase variables under their
    /// symbol names and w-chart aliases, `u = 1/r`, and the parameters.
    pub fn env_at(&self, s: &OrbitState<T>) -> Env<T> {
        let mut env = self.params.clone();
        let angle = self.angle_name();
        for (k, v) in [
            ("t", s.t),
            ("r", s.r),
            ("rdot", s.r_dot),
            (angle, s.angle),
            (if angle == "phi" { "phidot" } else { "thetadot" }, s.angle_dot),
            ("w1", s.r),
            ("w2", s.angle),
            ("w3", s.r_dot),
            ("w4", s.angle_dot),
            ("y", s.angle),
            ("u", s.r.recip()),
        ] {
            env.insert(k.to_string(), v);
        }
        env
    }
}

fn cone_sine<T: Real>(lambda: T, s0: &OrbitState<T>) -> Result<T, NumError> {
    let planar = s0.r * s0.r * s0.angle_dot;
    let s2 = T::one() - (lambda / planar).powi(2);
    if !(s2 > T::zero()) {
        return Err(NumError::InvalidState(
            "MICZ needs |r²φ̇| > |λ| to lie on a cone".into(),
        ));
    }
    Ok(s2.sqrt())
}

/// Integrates the family's equations of motion from `s0`.
///
/// For MICZ the state `(r, ṙ, φ, φ̇)` lives on the cone of motion; its sine
/// `S` follows from `r²φ̇ = (L² + λ²)^{1/2}` and is stored in `params`.
pub fn integrate_orbit<T: Real>(
    spec: &ProblemSpec,
    s0: OrbitState<T>,
    opts: OrbitOptions<T>,
) -> Result<Trajectory<T>, NumError> {
    spec.validate()?;
    if !s0.is_valid(opts.r_min) || !(opts.tol > T::zero()) {
        return Err(NumError::InvalidState(format!("{s0:?}")));
    }
    let mut params = spec.numeric_params::<T>()?;
    let p = |k: &str| params.get(k).copied().unwrap_or_else(T::zero);
    let (mu, alpha, lambda, nu) = (p("mu"), p("alpha"), p("lambda"), p("nu"));
    let mut s_cone = T::one();
    if spec.family == Family::Micz {
        s_cone = cone_sine(lambda, &s0)?;
        params.insert("S".into(), s_cone);
    }
    let g = match spec.family {
        Family::ConeDrag => Some(spec.g_and_rate()?),
        _ => None,
    };
    let g_env = params.clone();
    let two = T::lit(2.0);
    let rhs = |t: T, y: &[T; 4]| -> [T; 4] {
        let [r, rd, _, w] = *y;
        let (rdd, wdd) = match spec.family {
            Family::Kepler => (r * w * w - mu / (r * r), -two * rd * w / r),
            Family::KeplerDrag => (
                r * w * w - alpha * rd / (r * r) - mu / (r * r),
                -two * rd * w / r - alpha * w / (r * r),
            ),
            Family::PowerLaw => (r * w * w - mu * r.powf(alpha + T::one()), -two * rd * w / r),
            Family::ConeDrag => {
                let (ge, gde) = g.as_ref().expect("cone drag has g");
                let mut env = g_env.clone();
                env.insert("t".into(), t);
                let gv = eval_numeric(ge, &env, T::lit(1e-12)).unwrap_or_else(|_| T::nan());
                let gd = eval_numeric(gde, &env, T::lit(1e-12)).unwrap_or_else(|_| T::nan());
                let h = gd / (two * gv) + T::lit(1.5) * rd / r;
                (r * w * w + h * rd - mu * gv * r, -two * rd * w / r + h * w)
            }
            Family::Micz => (
                r * s_cone * s_cone * w * w - mu / (r * r) - two * nu / (r * r * r),
                -two * rd * w / r,
            ),
        };
        [rd, rdd, w, wdd]
    };
    let ctl = StepControl { tol: opts.tol, h_init: None, h_max: None, max_steps: opts.max_steps };
    let r_min = opts.r_min;
    let solution = dopri5(rhs, s0.t, s0.to_vec(), opts.t_end, ctl, |y| y[0] < r_min);
    let singular = match solution.halt {
        Halt::Finished => false,
        Halt::Stopped(_) => true,
        Halt::StepUnderflow(t) => return Err(NumError::StepUnderflow(t.to_f64().unwrap_or(f64::NAN))),
        Halt::NonFinite(t) => return Err(NumError::NonFinite(t.to_f64().unwrap_or(f64::NAN))),
        Halt::TooManySteps(t) => return Err(NumError::TooManySteps(t.to_f64().unwrap_or(f64::NAN))),
    };
    let samples = solution
        .times
        .iter()
        .zip(&solution.states)
        .map(|(t, y)| OrbitState::from_vec(*t, y))
        .collect();
    Ok(Trajectory { samples, spec: spec.clone(), options: opts, singular, params, solution })
}

/// `max |q(s) − q(s₀)| / max(1, |q(s₀)|)` over the samples.
pub fn conserved_drift<T: Real>(traj: &Trajectory<T>, q: &Expr) -> Result<T, NumError> {
    let tol = T::lit(1e-12);
    let q0 = eval_numeric(q, &traj.env_at(&traj.initial()), tol)?;
    let scale = q0.abs().max(T::one());
    let mut worst = T::zero();
    for s in &traj.samples {
        let v = eval_numeric(q, &traj.env_at(s), tol)?;
        worst = worst.max((v - q0).abs() / scale);
    }
    Ok(worst)
}

pub fn quantity_drift<T: Real>(traj: &Trajectory<T>, q: &ConservedQuantity) -> Result<T, NumError> {
    conserved_drift(traj, &q.expr)
}

/// `½(ṙ² + r²ψ̇²) − μ/r`.
pub fn kepler_energy() -> Expr {
    use crate::symbols as sym;
    let (r, rd, w) = (sym::r().expr(), sym::rdot().expr(), sym::thetadot().expr());
    Expr::rat(1, 2) * (rd.powi(2) + r.clone().powi(2) * w.powi(2)) - sym::mu().expr() / r
}

/// Values of the reduced system's constants (and closure relations) fixed by
/// the initial state.
pub fn reduced_env<T: Real>(traj: &Trajectory<T>, rs: &ReducedSystem) -> Result<Env<T>, NumError> {
    let tol = T::lit(1e-12);
    let mut env = traj.env_at(&traj.initial());
    for c in &rs.constants {
        let value = substitute(&c.value, &rs.phase_map)?;
        let v = eval_numeric(&value, &env, tol)?;
        env.insert(c.symbol.name().to_string(), v);
    }
    for c in &rs.closure {
        if !env.contains_key(c.symbol.name()) {
            let v = eval_numeric(&c.value, &env, tol)?;
            env.insert(c.symbol.name().to_string(), v);
        }
    }
    Ok(env)
}

/// Reduced solution sampled on a uniform grid of the independent variable.
#[derive(Clone, Debug)]
pub struct ReducedSamples<T> {
    /// Independent variable (angle times the chart scale).
    pub x: Vec<T>,
    pub u1: Vec<T>,
    pub u2: Vec<T>,
    /// Reciprocal radius at the same points.
    pub u: Vec<T>,
    /// Raw polar angle at the same points.
    pub angle: Vec<T>,
    pub env: Env<T>,
}

/// Resamples `u₁`, `u₂` on `n` uniformly spaced angles.
///
/// `t(ψ)` is first interpolated monotonically through the accepted steps and
/// then refined by safeguarded Newton iteration on the continuous solution.
pub fn sample_reduced<T: Real>(
    traj: &Trajectory<T>,
    rs: &ReducedSystem,
    n: usize,
) -> Result<ReducedSamples<T>, NumError> {
    let env0 = reduced_env(traj, rs)?;
    let tol = T::lit(1e-12);
    let (u1_phase, u2_phase) = rs.phase_definitions()?;
    let u2_0 = eval_numeric(&u2_phase, &env0, tol)?;
    if !(u2_0.abs() > T::lit(1e-12)) {
        return Err(NumError::Degenerate("u2 = 0".into()));
    }
    let sign = traj.initial().angle_dot.signum();
    if traj.samples.iter().any(|s| !(s.angle_dot * sign > T::zero())) {
        return Err(NumError::NonMonotone);
    }
    let scale = eval_numeric(&rs.angle_scale, &env0, tol)?;
    let angles: Vec<T> = traj.samples.iter().map(|s| s.angle * sign).collect();
    let times: Vec<T> = traj.samples.iter().map(|s| s.t).collect();
    let t_of = Pchip::new(angles.clone(), times.clone())
        .ok_or_else(|| NumError::Fit("angle samples are not strictly increasing".into()))?;
    let (a0, a1) = (angles[0], *angles.last().unwrap());
    let margin = (a1 - a0) * T::lit(1e-3);
    let mut out = ReducedSamples {
        x: vec![],
        u1: vec![],
        u2: vec![],
        u: vec![],
        angle: vec![],
        env: env0.clone(),
    };
    for k in 0..n {
        let target = a0 + margin + (a1 - a0 - margin - margin) * T::lit(k as f64 / (n - 1).max(1) as f64);
        let t = solve_time(traj, &angles, &times, t_of.eval(target), target, sign);
        let s = traj.state_at(t).ok_or_else(|| NumError::Fit("time outside window".into()))?;
        let mut env = traj.env_at(&s);
        for (k, v) in &env0 {
            if !env.contains_key(k) || rs.constants.iter().any(|c| c.symbol.name() == k) {
                env.insert(k.clone(), *v);
            }
        }
        out.x.push(scale * s.angle);
        out.angle.push(s.angle);
        out.u.push(s.r.recip());
        out.u1.push(eval_numeric(&u1_phase, &env, tol)?);
        out.u2.push(eval_numeric(&u2_phase, &env, tol)?);
    }
    Ok(out)
}

fn solve_time<T: Real>(traj: &Trajectory<T>, angles: &[T], times: &[T], guess: T, target: T, sign: T) -> T {
    let i = angles.partition_point(|&a| a < target).clamp(1, angles.len() - 1);
    let (mut lo, mut hi) = (times[i - 1], times[i]);
    let mut t = guess.max(lo).min(hi);
    for _ in 0..60 {
        let Some(s) = traj.state_at(t) else { break };
        let f = s.angle * sign - target;
        if f.abs() <= T::epsilon() * T::lit(4.0) * target.abs().max(T::one()) {
            break;
        }
        if f > T::zero() {
            hi = t;
        } else {
            lo = t;
        }
        let newton = t - f / (s.angle_dot * sign);
        t = if newton > lo && newton < hi { newton } else { (lo + hi) / T::lit(2.0) };
    }
    t
}

fn omega_value<T: Real>(rs: &ReducedSystem, env: &Env<T>) -> Result<T, NumError> {
    let w2 = eval_numeric(&rs.omega_sq, env, T::lit(1e-12))?;
    if !(w2 > T::zero()) {
        return Err(NumError::Degenerate(format!("Ω² = {w2} is not positive")));
    }
    Ok(w2.sqrt())
}

#[derive(Clone, Debug, Serialize)]
pub struct OscillatorFit<T> {
    pub residual: T,
    pub omega: T,
    pub cos_coef: T,
    pub sin_coef: T,
    pub u2_spread: T,
}

/// Least-squares fit `u₁ ≈ A cos Ωx + B sin Ωx` with `Ω` from the reduced
/// system; `residual` is the largest pointwise deviation.
pub fn oscillator_fit<T: Real>(
    traj: &Trajectory<T>,
    rs: &ReducedSystem,
    n: usize,
) -> Result<OscillatorFit<T>, NumError> {
    if !rs.linearizable {
        return Err(NumError::Fit("reduced system is not linear".into()));
    }
    let smp = sample_reduced(traj, rs, n)?;
    let omega = omega_value(rs, &smp.env)?;
    let (coef, fit) = lstsq(&harmonic_basis(&smp.x, omega, false), &smp.u1)
        .ok_or_else(|| NumError::Fit("rank-deficient basis".into()))?;
    let residual = smp.u1.iter().zip(&fit).fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()));
    let (lo, hi) = smp.u2.iter().fold((T::infinity(), T::neg_infinity()), |(l, h), v| (l.min(*v), h.max(*v)));
    Ok(OscillatorFit { residual, omega, cos_coef: coef[0], sin_coef: coef[1], u2_spread: hi - lo })
}

pub fn oscillator_residual<T: Real>(traj: &Trajectory<T>, rs: &ReducedSystem) -> Result<T, NumError> {
    Ok(oscillator_fit(traj, rs, 400)?.residual)
}

#[derive(Clone, Debug, Serialize)]
pub struct CandidateCheck<T> {
    pub label: String,
    pub omega: T,
    pub relative_error: T,
    pub matches: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FrequencyEstimate<T> {
    /// Fitted angular frequency of `u` in the polar angle.
    pub fitted: T,
    pub candidates: Vec<CandidateCheck<T>>,
    /// The unique matching candidate, if exactly one matches.
    pub verdict: Option<String>,
}

pub const CANDIDATE_TOLERANCE: f64 = 1e-4;

/// Fits the angular frequency of `u(ψ)` (of `u₁(ψ)` under angle-dependent
/// forcing) and compares it with each candidate
/// `Ω²` of the reduced system (or with its single `Ω²` when there are none).
pub fn estimate_frequency<T: Real>(traj: &Trajectory<T>, rs: &ReducedSystem) -> Result<FrequencyEstimate<T>, NumError> {
    let smp = sample_reduced(traj, rs, 600)?;
    let span = (*smp.angle.last().unwrap() - smp.angle[0]).abs();
    let lo = T::lit(0.25 * std::f64::consts::PI) / span;
    // an angle-dependent forcing is removed by fitting u₁ instead of u
    let varying = rs.forcing.free_symbols().contains(&rs.independent);
    let (data, with_constant) = if varying { (&smp.u1, false) } else { (&smp.u, !crate::expr::is_zero(&rs.forcing)) };
    let fitted = fit_frequency(&smp.angle, data, lo, T::lit(10.0), with_constant)
        .ok_or_else(|| NumError::Fit("frequency scan failed".into()))?;
    let listed: Vec<(String, Expr)> = if rs.omega_candidates.is_empty() {
        vec![("omega_sq".into(), crate::expr::canonicalize(&(rs.omega_sq.clone() * rs.angle_scale.clone().powi(2))))]
    } else {
        rs.omega_candidates.iter().map(|c| (c.label.clone(), c.omega_sq.clone())).collect()
    };
    let mut candidates = Vec::new();
    for (label, w2) in listed {
        let v = eval_numeric(&w2, &smp.env, T::lit(1e-12))?;
        let omega = if v > T::zero() { v.sqrt() } else { T::nan() };
        let rel = ((omega - fitted) / fitted).abs();
        candidates.push(CandidateCheck {
            label,
            omega,
            relative_error: rel,
            matches: rel < T::lit(CANDIDATE_TOLERANCE),
        });
    }
    let matching: Vec<_> = candidates.iter().filter(|c| c.matches).collect();
    let verdict = (matching.len() == 1).then(|| matching[0].label.clone());
    Ok(FrequencyEstimate { fitted, candidates, verdict })
}

/// Residual of `v″ + v − f(ψ)` at `n` points in `[a, b]`, using five-point
/// differences of `v` evaluated by quadrature.
pub fn particular_residual<T: Real>(
    v: &Expr,
    forcing: &Expr,
    angle: &str,
    env: &Env<T>,
    a: T,
    b: T,
    n: usize,
    h: T,
) -> Result<T, NumError> {
    let quad = T::lit(1e-14);
    let mut worst = T::zero();
    for k in 0..n {
        let x = a + (b - a) * T::lit(k as f64 / (n - 1).max(1) as f64);
        let mut err = None;
        let mut eval_at = |p: T| {
            let mut e = env.clone();
            e.insert(angle.to_string(), p);
            eval_numeric(v, &e, quad).unwrap_or_else(|x| {
                err = Some(x);
                T::nan()
            })
        };
        let (_, d2) = fit::central5(&mut eval_at, x, h);
        let v0 = eval_at(x);
        if let Some(e) = err {
            return Err(e.into());
        }
        let mut e = env.clone();
        e.insert(angle.to_string(), x);
        let f = eval_numeric(forcing, &e, quad)?;
        worst = worst.max((d2 + v0 - f).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::rational;
    use crate::problems::conserved_quantities;
    use crate::reduce::reduce_direct;

    fn kepler() -> ProblemSpec {
        ProblemSpec::kepler().with_mu(Expr::one())
    }

    #[test]
    fn circular_orbit_stays_circular() {
        let traj = integrate_orbit(&kepler(), OrbitState::new(1.0f64, 0.0, 0.0, 1.0), OrbitOptions { t_end: 20.0, ..Default::default() }).unwrap();
        let worst = traj.samples.iter().fold(0.0f64, |m, s| m.max((s.r - 1.0).abs()));
        assert!(worst < 1e-8, "{worst}");
    }

    #[test]
    fn ellipse_conserves_angular_momentum_and_energy() {
        let opts = OrbitOptions { t_end: 100.0, ..Default::default() };
        let traj = integrate_orbit(&kepler(), OrbitState::new(1.0, 0.0, 0.0, 1.2), opts).unwrap();
        let q = &conserved_quantities(&kepler()).unwrap()[0];
        assert!(quantity_drift(&traj, q).unwrap() < 1e-8);
        let energy = substitute(&kepler_energy(), &[(crate::symbols::mu(), Expr::one())].into()).unwrap();
        assert!(conserved_drift(&traj, &energy).unwrap() < 1e-8);
    }

    #[test]
    fn radial_fall_hits_the_guard_and_skips_reduction() {
        let traj = integrate_orbit(&kepler(), OrbitState::new(1.0, 0.0, 0.0, 0.0), OrbitOptions::default()).unwrap();
        assert!(traj.singular);
        let rs = reduce_direct(&kepler()).unwrap();
        assert_eq!(sample_reduced(&traj, &rs, 10).unwrap_err(), NumError::Degenerate("u2 = 0".into()));
    }

    #[test]
    fn conic_in_the_angle() {
        let traj = integrate_orbit(&kepler(), OrbitState::new(1.0, 0.0, 0.0, 1.2), OrbitOptions::default()).unwrap();
        let rs = reduce_direct(&kepler()).unwrap();
        let fit = oscillator_fit(&traj, &rs, 400).unwrap();
        assert!(fit.residual < 1e-8, "{}", fit.residual);
        // closed form: u = μ/L² + (1 − μ/L²) cos θ
        let l2: f64 = 1.44;
        assert!((fit.cos_coef - (1.0 - 1.0 / l2)).abs() < 1e-8);
        assert!(fit.sin_coef.abs() < 1e-8);
    }

    #[test]
    fn inverse_cube_frequency() {
        let spec = ProblemSpec::power_law(rational(-4, 1)).with_mu(Expr::one());
        let traj = integrate_orbit(&spec, OrbitState::new(1.0, 0.0, 0.0, 1.2), OrbitOptions::default()).unwrap();
        let rs = reduce_direct(&spec).unwrap();
        let est = estimate_frequency(&traj, &rs).unwrap();
        let expected = (1.0f64 - 1.0 / 1.44).sqrt();
        assert!((est.fitted - expected).abs() / expected < 1e-5, "{}", est.fitted);
        assert_eq!(est.verdict.as_deref(), Some("omega_sq"));
    }

    #[test]
    fn drag_changes_angular_momentum() {
        let spec = ProblemSpec::kepler_drag().with_mu(Expr::one()).with_alpha(Expr::rat(1, 100));
        let traj = integrate_orbit(&spec, OrbitState::new(1.0, 0.0, 0.0, 1.1), OrbitOptions::default()).unwrap();
        let q = &conserved_quantities(&spec).unwrap()[0];
        assert!(quantity_drift(&traj, q).unwrap() < 1e-7);
        let bare = crate::problems::angular_momentum(&spec);
        assert!(conserved_drift(&traj, &bare).unwrap() > 1e-4);
    }

    #[test]
    fn micz_needs_a_cone() {
        let spec = ProblemSpec::micz().with_mu(Expr::one()).with_lambda(Expr::int(2));
        let err = integrate_orbit(&spec, OrbitState::new(1.0, 0.0, 0.0, 1.0), OrbitOptions::default()).unwrap_err();
        assert!(matches!(err, NumError::InvalidState(_)), "{err:?}");
    }

    #[test]
    fn single_precision_orbit() {
        let opts = OrbitOptions { tol: 1e-6f32, t_end: 10.0, ..Default::default() };
        let traj = integrate_orbit(&kepler(), OrbitState::new(1.0f32, 0.0, 0.0, 1.0), opts).unwrap();
        assert!(traj.samples.iter().all(|s| (s.r - 1.0).abs() < 1e-3));
    }
}
