//! Flow test for reduced-chart generators: push a solution through the
//! first-order transformation and measure how far the image is from solving
//! the reduced pair.

use serde::Serialize;

use super::fit::{central5, harmonic_basis, lstsq};
use super::{sample_reduced, NumError, Trajectory};
use crate::expr::{eval_numeric, Env, Expr};
use crate::reduce::ReducedSystem;
use crate::symmetry::Generator;
use crate::Real;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DefectOptions<T> {
    pub eps: T,
    pub points: usize,
    /// Step of the five-point difference along the curve parameter.
    pub step: T,
    /// Defects below this level count as exact.
    pub floor: T,
}

impl<T: Real> Default for DefectOptions<T> {
    fn default() -> Self {
        DefectOptions { eps: T::lit(1e-3), points: 200, step: T::lit(1e-2), floor: T::lit(1e-9) }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DefectMeasure<T> {
    pub generator: String,
    pub eps: T,
    pub defect: T,
    pub defect_half: T,
    pub ratio: T,
    /// Both defects sit at the numerical floor: the first-order image is
    /// itself a solution and the ratio carries no information.
    pub exact: bool,
    pub accepted: bool,
}

pub const RATIO_BAND: (f64, f64) = (3.5, 4.5);

/// Transforms the oscillator fitted to `traj` by `g` at `ε` and `ε/2` and
/// returns the largest residual of `u₁″ + Ω²u₁` and `u₂′` along each image.
pub fn symmetry_defect<T: Real>(
    traj: &Trajectory<T>,
    rs: &ReducedSystem,
    g: &Generator,
    opts: DefectOptions<T>,
) -> Result<DefectMeasure<T>, NumError> {
    if !g.is_real() || g.chart != [rs.independent.clone(), crate::symbols::u1(), crate::symbols::u2()] {
        return Err(NumError::Fit(format!("{} is not a real field on the reduced chart", g.name)));
    }
    let smp = sample_reduced(traj, rs, 400)?;
    let w2 = eval_numeric(&rs.omega_sq, &smp.env, T::lit(1e-12))?;
    let omega = w2.sqrt();
    let (coef, _) = lstsq(&harmonic_basis(&smp.x, omega, false), &smp.u1)
        .ok_or_else(|| NumError::Fit("rank-deficient basis".into()))?;
    let v = smp.u2.iter().fold(T::zero(), |a, b| a + *b) / T::lit(smp.u2.len() as f64);
    let curve = Curve {
        env: smp.env.clone(),
        x_name: rs.independent.name().to_string(),
        a: coef[0],
        b: coef[1],
        omega,
        v,
        xi: g.xi.re.clone(),
        eta1: g.etas[0].re.clone(),
        eta2: g.etas[1].re.clone(),
    };
    let h = opts.step;
    let lo = smp.x[0] + h * T::lit(3.0);
    let hi = *smp.x.last().unwrap() - h * T::lit(3.0);
    let measure = |eps: T| -> Result<T, NumError> {
        let mut worst = T::zero();
        for k in 0..opts.points {
            let s = lo + (hi - lo) * T::lit(k as f64 / (opts.points - 1).max(1) as f64);
            worst = worst.max(curve.defect_at(s, eps, h, w2)?);
        }
        Ok(worst)
    };
    let defect = measure(opts.eps)?;
    let defect_half = measure(opts.eps / T::lit(2.0))?;
    let ratio = defect / defect_half;
    let exact = defect < opts.floor && defect_half < opts.floor;
    let in_band = ratio >= T::lit(RATIO_BAND.0) && ratio <= T::lit(RATIO_BAND.1);
    Ok(DefectMeasure { generator: g.name.clone(), eps: opts.eps, defect, defect_half, ratio, exact, accepted: exact || in_band })
}

struct Curve<T> {
    env: Env<T>,
    x_name: String,
    a: T,
    b: T,
    omega: T,
    v: T,
    xi: Expr,
    eta1: Expr,
    eta2: Expr,
}

impl<T: Real> Curve<T> {
    /// Image `(X, U, W)` of the solution point at parameter `s`.
    fn image(&self, s: T, eps: T) -> Result<[T; 3], NumError> {
        let u = self.a * (self.omega * s).cos() + self.b * (self.omega * s).sin();
        let mut env = self.env.clone();
        env.insert(self.x_name.clone(), s);
        env.insert("u1".into(), u);
        env.insert("u2".into(), self.v);
        let q = T::lit(1e-12);
        Ok([
            s + eps * eval_numeric(&self.xi, &env, q)?,
            u + eps * eval_numeric(&self.eta1, &env, q)?,
            self.v + eps * eval_numeric(&self.eta2, &env, q)?,
        ])
    }

    fn defect_at(&self, s: T, eps: T, h: T, w2: T) -> Result<T, NumError> {
        let mut err = None;
        let mut comp = |k: usize| {
            let mut f = |p: T| match self.image(p, eps) {
                Ok(v) => v[k],
                Err(e) => {
                    err = Some(e);
                    T::nan()
                }
            };
            let d = central5(&mut f, s, h);
            (f(s), d)
        };
        let (_, (x1, x2)) = comp(0);
        let (u, (u1, u2)) = comp(1);
        let (_, (w1, _)) = comp(2);
        if let Some(e) = err {
            return Err(e);
        }
        let upp = (u2 * x1 - u1 * x2) / (x1 * x1 * x1);
        Ok((upp + w2 * u).abs().max((w1 / x1).abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numverify::{integrate_orbit, OrbitOptions, OrbitState};
    use crate::problems::ProblemSpec;
    use crate::reduce::reduce_direct;
    use crate::symbols as sym;
    use crate::symmetry::reduced_catalog;

    #[test]
    fn kepler_catalog_and_negative_control() {
        let spec = ProblemSpec::kepler().with_mu(Expr::one());
        let rs = reduce_direct(&spec).unwrap();
        let traj = integrate_orbit(&spec, OrbitState::new(1.0, 0.0, 0.0, 1.2), OrbitOptions::default()).unwrap();
        for g in reduced_catalog(&rs).unwrap() {
            let m = symmetry_defect(&traj, &rs, &g, DefectOptions::default()).unwrap();
            assert!(m.accepted, "{m:?}");
        }
        let ctl = Generator::new(
            "u1 d_theta",
            vec![sym::theta(), sym::u1(), sym::u2()],
            sym::u1().expr().into(),
            vec![crate::expr::Cx::zero(), crate::expr::Cx::zero()],
        )
        .unwrap();
        let m = symmetry_defect(&traj, &rs, &ctl, DefectOptions::default()).unwrap();
        assert!(!m.accepted && m.ratio < 3.0, "{m:?}");
    }
}
