//! Adaptive Gauss–Kronrod (7/15) quadrature.

use crate::Real;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_DEPTH: u32 = 40;

fn kronrod_pair<T: Real, E>(
    f: &mut impl FnMut(T) -> Result<T, E>,
    a: T,
    b: T,
) -> Result<(T, T), E> {
    let half = T::lit(0.5);
    let c = (a + b) * half;
    let h = (b - a) * half;
    let fc = f(c)?;
    let mut k = fc * T::lit(WGK[7]);
    let mut g = fc * T::lit(WG[3]);
    for i in 0..7 {
        let dx = h * T::lit(XGK[i]);
        let s = f(c - dx)? + f(c + dx)?;
        k = k + s * T::lit(WGK[i]);
        if i % 2 == 1 {
            g = g + s * T::lit(WG[i / 2]);
        }
    }
    Ok((k * h, (k - g).abs() * h))
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
///
/// Returns `Ok(None)` when the interval cannot be refined further without
/// meeting the tolerance.
pub fn integrate<T: Real, E>(
    f: &mut impl FnMut(T) -> Result<T, E>,
    a: T,
    b: T,
    tol: T,
) -> Result<Option<T>, E> {
    if a == b {
        return Ok(Some(T::zero()));
    }
    recurse(f, a, b, tol, MAX_DEPTH)
}

fn recurse<T: Real, E>(
    f: &mut impl FnMut(T) -> Result<T, E>,
    a: T,
    b: T,
    tol: T,
    depth: u32,
) -> Result<Option<T>, E> {
    let (val, err) = kronrod_pair(f, a, b)?;
    if err <= tol || err <= T::epsilon() * T::lit(50.0) * val.abs() {
        return Ok(Some(val));
    }
    if depth == 0 {
        return Ok(None);
    }
    let mid = (a + b) * T::lit(0.5);
    let half_tol = tol * T::lit(0.5);
    let Some(left) = recurse(f, a, mid, half_tol, depth - 1)? else {
        return Ok(None);
    };
    let Some(right) = recurse(f, mid, b, half_tol, depth - 1)? else {
        return Ok(None);
    };
    Ok(Some(left + right))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;

    #[test]
    fn polynomial_is_exact() {
        let mut f = |x: f64| -> Result<f64, Infallible> { Ok(x.powi(5) - 3.0 * x) };
        let v = integrate(&mut f, 0.0, 2.0, 1e-12).unwrap().unwrap();
        assert!((v - (64.0 / 6.0 - 6.0)).abs() < 1e-13);
    }

    #[test]
    fn oscillatory_integrand() {
        let mut f = |x: f64| -> Result<f64, Infallible> { Ok((10.0 * x).sin()) };
        let v = integrate(&mut f, 0.0, 3.0, 1e-12).unwrap().unwrap();
        let exact = (1.0 - 30f64.cos()) / 10.0;
        assert!((v - exact).abs() < 1e-11);
    }

    #[test]
    fn works_in_single_precision() {
        let mut f = |x: f32| -> Result<f32, Infallible> { Ok(x.exp()) };
        let v = integrate(&mut f, 0.0f32, 1.0, 1e-5).unwrap().unwrap();
        assert!((v - (std::f32::consts::E - 1.0)).abs() < 1e-5);
    }
}
