//! Dormand–Prince 5(4) with PI step control and continuous output.

use crate::Real;

#[derive(Clone, Copy, Debug)]
pub struct StepControl<T> {
    pub tol: T,
    pub h_init: Option<T>,
    pub h_max: Option<T>,
    pub max_steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Halt<T> {
    Finished,
    /// The stop predicate fired on the state reached at this time.
    Stopped(T),
    StepUnderflow(T),
    NonFinite(T),
    TooManySteps(T),
}

/// One accepted step with its continuous-extension coefficients.
#[derive(Clone, Debug)]
pub struct DenseStep<T, const N: usize> {
    pub t0: T,
    pub h: T,
    coef: [[T; N]; 5],
}

impl<T: Real, const N: usize> DenseStep<T, N> {
    pub fn contains(&self, t: T) -> bool {
        t >= self.t0 && t <= self.t0 + self.h
    }

    pub fn eval(&self, t: T) -> [T; N] {
        let th = (t - self.t0) / self.h;
        let th1 = T::one() - th;
        let c = &self.coef;
        std::array::from_fn(|i| {
            c[0][i] + th * (c[1][i] + th1 * (c[2][i] + th * (c[3][i] + th1 * c[4][i])))
        })
    }
}

#[derive(Clone, Debug)]
pub struct Solution<T, const N: usize> {
    pub times: Vec<T>,
    pub states: Vec<[T; N]>,
    pub steps: Vec<DenseStep<T, N>>,
    pub halt: Halt<T>,
}

impl<T: Real, const N: usize> Solution<T, N> {
    /// Continuous solution on `[times[0], times.last()]`.
    pub fn at(&self, t: T) -> Option<[T; N]> {
        let i = self.steps.partition_point(|s| s.t0 + s.h < t);
        self.steps.get(i).filter(|s| s.contains(t)).map(|s| s.eval(t))
    }
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// Integrates `y′ = f(t, y)` from `t0` to `t_end`.
///
/// The local error estimate is measured in the mixed norm
/// `|e_i| / (tol·(1 + max(|y_i|, |y_i,new|)))`; a step is accepted when its
/// RMS is at most one. `stop` is checked on every accepted state.
pub fn dopri5<T: Real, const N: usize>(
    mut f: impl FnMut(T, &[T; N]) -> [T; N],
    t0: T,
    y0: [T; N],
    t_end: T,
    ctl: StepControl<T>,
    mut stop: impl FnMut(&[T; N]) -> bool,
) -> Solution<T, N> {
    let lit = T::lit;
    let mut sol = Solution {
        times: vec![t0],
        states: vec![y0],
        steps: Vec::new(),
        halt: Halt::Finished,
    };
    let span = t_end - t0;
    let h_max = ctl.h_max.unwrap_or(span.abs());
    let mut h = ctl.h_init.unwrap_or(span.abs() * lit(1e-4)).min(h_max);
    let (mut t, mut y) = (t0, y0);
    let mut k1 = f(t, &y);
    let mut err_old = lit(1e-4);
    let mut rejected = false;
    let eps = T::epsilon() * lit(16.0);
    for _ in 0..ctl.max_steps {
        if t >= t_end {
            return sol;
        }
        if t + h > t_end {
            h = t_end - t;
        }
        if h <= eps * t.abs().max(T::one()) {
            sol.halt = Halt::StepUnderflow(t);
            return sol;
        }
        let mut k = [[T::zero(); N]; 7];
        k[0] = k1;
        for s in 1..7 {
            let ys: [T; N] = std::array::from_fn(|i| {
                y[i] + h * (0..s).fold(T::zero(), |acc, j| acc + lit(A[s][j]) * k[j][i])
            });
            k[s] = f(t + lit(C[s]) * h, &ys);
        }
        let y_new: [T; N] = std::array::from_fn(|i| {
            y[i] + h * (0..6).fold(T::zero(), |acc, j| acc + lit(A[6][j]) * k[j][i])
        });
        let mut acc = T::zero();
        for i in 0..N {
            let e = h * (0..7).fold(T::zero(), |a, j| a + lit(E[j]) * k[j][i]);
            let sc = ctl.tol * (T::one() + y[i].abs().max(y_new[i].abs()));
            acc = acc + (e / sc) * (e / sc);
        }
        let err = (acc / lit(N as f64)).sqrt();
        if !err.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
            if h <= eps * t.abs().max(T::one()) * lit(1e3) {
                sol.halt = Halt::NonFinite(t);
                return sol;
            }
            h = h * lit(0.1);
            rejected = true;
            continue;
        }
        if err <= T::one() {
            let diff: [T; N] = std::array::from_fn(|i| y_new[i] - y[i]);
            let bspl: [T; N] = std::array::from_fn(|i| h * k[0][i] - diff[i]);
            let coef = [
                y,
                diff,
                bspl,
                std::array::from_fn(|i| diff[i] - h * k[6][i] - bspl[i]),
                std::array::from_fn(|i| h * (0..7).fold(T::zero(), |a, j| a + lit(D[j]) * k[j][i])),
            ];
            sol.steps.push(DenseStep { t0: t, h, coef });
            t = t + h;
            y = y_new;
            k1 = k[6];
            sol.times.push(t);
            sol.states.push(y);
            if stop(&y) {
                sol.halt = Halt::Stopped(t);
                return sol;
            }
            let err_c = err.max(lit(1e-10));
            let mut fac = lit(0.9) * err_c.powf(lit(-0.17)) * err_old.powf(lit(0.04));
            fac = fac.min(lit(5.0)).max(lit(0.2));
            if rejected {
                fac = fac.min(T::one());
            }
            h = (h * fac).min(h_max);
            err_old = err_c.max(lit(1e-4));
            rejected = false;
        } else {
            h = h * (lit(0.9) * err.powf(lit(-0.2))).max(lit(0.2));
            rejected = true;
        }
    }
    sol.halt = Halt::TooManySteps(t);
    sol
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctl(tol: f64) -> StepControl<f64> {
        StepControl {
            tol,
            h_init: None,
            h_max: None,
            max_steps: 100_000,
        }
    }

    #[test]
    fn harmonic_oscillator_endpoint_and_dense_output() {
        let sol = dopri5(|_, y: &[f64; 2]| [y[1], -y[0]], 0.0, [0.0, 1.0], 10.0, ctl(1e-11), |_| false);
        assert_eq!(sol.halt, Halt::Finished);
        let end = sol.states.last().unwrap();
        assert!((end[0] - 10f64.sin()).abs() < 1e-9);
        for i in 0..200 {
            let t = 0.05 * i as f64 + 0.0123;
            let y = sol.at(t).unwrap();
            assert!((y[0] - t.sin()).abs() < 1e-9, "t={t}: {}", y[0] - t.sin());
            assert!((y[1] - t.cos()).abs() < 1e-9);
        }
    }

    #[test]
    fn error_shrinks_with_tolerance() {
        let run = |tol| {
            let sol = dopri5(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], 5.0, ctl(tol), |_| false);
            (sol.states.last().unwrap()[0] - 5f64.exp()).abs() / 5f64.exp()
        };
        assert!(run(1e-6) > 5.0 * run(1e-9));
    }

    #[test]
    fn stop_predicate() {
        let sol = dopri5(|_, _y: &[f64; 1]| [-1.0], 0.0, [1.0], 5.0, ctl(1e-8), |y| y[0] < 0.5);
        assert!(matches!(sol.halt, Halt::Stopped(_)));
        assert!(sol.states.last().unwrap()[0] < 0.5);
    }

    #[test]
    fn single_precision() {
        let c = StepControl {
            tol: 1e-5f32,
            h_init: None,
            h_max: None,
            max_steps: 10_000,
        };
        let sol = dopri5(|_, y: &[f32; 2]| [y[1], -y[0]], 0.0, [0.0, 1.0], 3.0, c, |_| false);
        assert!((sol.states.last().unwrap()[0] - 3f32.sin()).abs() < 1e-3);
    }
}
