//! Interpolation and least-squares helpers for the numeric checks.

use crate::Real;

/// Monotone piecewise-cubic Hermite interpolant (Fritsch–Carlson slopes).
#[derive(Clone, Debug)]
pub struct Pchip<T> {
    x: Vec<T>,
    y: Vec<T>,
    d: Vec<T>,
}

impl<T: Real> Pchip<T> {
    /// `x` must be strictly increasing with at least two points.
    pub fn new(x: Vec<T>, y: Vec<T>) -> Option<Self> {
        let n = x.len();
        if n < 2 || y.len() != n || x.windows(2).any(|w| w[1] <= w[0]) {
            return None;
        }
        let h: Vec<T> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let del: Vec<T> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut d = vec![T::zero(); n];
        if n == 2 {
            d = vec![del[0]; 2];
        } else {
            for i in 1..n - 1 {
                if del[i - 1] * del[i] > T::zero() {
                    let w1 = T::lit(2.0) * h[i] + h[i - 1];
                    let w2 = h[i] + T::lit(2.0) * h[i - 1];
                    d[i] = (w1 + w2) / (w1 / del[i - 1] + w2 / del[i]);
                }
            }
            d[0] = end_slope(h[0], h[1], del[0], del[1]);
            d[n - 1] = end_slope(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
        }
        Some(Pchip { x, y, d })
    }

    pub fn eval(&self, t: T) -> T {
        let n = self.x.len();
        let i = self.x.partition_point(|&v| v <= t).clamp(1, n - 1) - 1;
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let h00 = (T::one() + two * s) * (T::one() - s) * (T::one() - s);
        let h10 = s * (T::one() - s) * (T::one() - s);
        let h01 = s * s * (three - two * s);
        let h11 = s * s * (s - T::one());
        h00 * self.y[i] + h10 * h * self.d[i] + h01 * self.y[i + 1] + h11 * h * self.d[i + 1]
    }
}

fn end_slope<T: Real>(h0: T, h1: T, del0: T, del1: T) -> T {
    let d = ((T::lit(2.0) * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if d.signum() != del0.signum() {
        T::zero()
    } else if del0.signum() != del1.signum() && d.abs() > (T::lit(3.0) * del0).abs() {
        T::lit(3.0) * del0
    } else {
        d
    }
}

/// Linear least squares by twice-applied modified Gram–Schmidt.
///
/// Returns the coefficients and the fitted values, or `None` for a
/// rank-deficient basis.
pub fn lstsq<T: Real>(cols: &[Vec<T>], y: &[T]) -> Option<(Vec<T>, Vec<T>)> {
    let m = cols.len();
    let mut q: Vec<Vec<T>> = cols.to_vec();
    let mut r = vec![vec![T::zero(); m]; m];
    for j in 0..m {
        for _ in 0..2 {
            for i in 0..j {
                let p = dot(&q[i], &q[j]);
                r[i][j] = r[i][j] + p;
                let qi = q[i].clone();
                for (a, b) in q[j].iter_mut().zip(&qi) {
                    *a = *a - p * *b;
                }
            }
        }
        let nrm = dot(&q[j], &q[j]).sqrt();
        let scale = dot(&cols[j], &cols[j]).sqrt();
        if !(nrm > scale * T::lit(1e-12)) {
            return None;
        }
        r[j][j] = nrm;
        for a in q[j].iter_mut() {
            *a = *a / nrm;
        }
    }
    let qty: Vec<T> = q.iter().map(|c| dot(c, y)).collect();
    let mut coef = vec![T::zero(); m];
    for j in (0..m).rev() {
        let s = (j + 1..m).fold(qty[j], |acc, k| acc - r[j][k] * coef[k]);
        coef[j] = s / r[j][j];
    }
    let fit = (0..y.len())
        .map(|i| (0..m).fold(T::zero(), |acc, j| acc + coef[j] * cols[j][i]))
        .collect();
    Some((coef, fit))
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + *x * *y)
}

/// Harmonic basis `cos ωx, sin ωx` and optionally a constant.
pub fn harmonic_basis<T: Real>(x: &[T], omega: T, constant: bool) -> Vec<Vec<T>> {
    let mut cols = vec![
        x.iter().map(|&v| (omega * v).cos()).collect(),
        x.iter().map(|&v| (omega * v).sin()).collect(),
    ];
    if constant {
        cols.push(vec![T::one(); x.len()]);
    }
    cols
}

/// Residual sum of squares of the best harmonic fit at frequency `omega`.
pub fn harmonic_rss<T: Real>(x: &[T], y: &[T], omega: T, constant: bool) -> T {
    match lstsq(&harmonic_basis(x, omega, constant), y) {
        Some((_, fit)) => y.iter().zip(&fit).fold(T::zero(), |a, (p, q)| a + (*p - *q) * (*p - *q)),
        None => T::infinity(),
    }
}

/// Frequency of `y(x)` by variable projection: a log-spaced scan over
/// `[lo, hi]` followed by golden-section refinement of the best bracket.
pub fn fit_frequency<T: Real>(x: &[T], y: &[T], lo: T, hi: T, constant: bool) -> Option<T> {
    const SCAN: usize = 1500;
    let ratio = (hi / lo).ln() / T::lit((SCAN - 1) as f64);
    let grid: Vec<T> = (0..SCAN).map(|i| lo * (ratio * T::lit(i as f64)).exp()).collect();
    let rss: Vec<T> = grid.iter().map(|&w| harmonic_rss(x, y, w, constant)).collect();
    let best = (0..SCAN)
        .filter(|&i| rss[i].is_finite())
        .min_by(|&a, &b| rss[a].partial_cmp(&rss[b]).unwrap())?;
    let (mut a, mut b) = (grid[best.saturating_sub(1)], grid[(best + 1).min(SCAN - 1)]);
    let g = T::lit(0.618_033_988_749_894_8);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (harmonic_rss(x, y, c, constant), harmonic_rss(x, y, d, constant));
    for _ in 0..200 {
        if (b - a).abs() <= T::epsilon() * T::lit(4.0) * (a.abs() + b.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = harmonic_rss(x, y, c, constant);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = harmonic_rss(x, y, d, constant);
        }
    }
    Some((a + b) / T::lit(2.0))
}

/// Five-point centered first and second derivatives of `f` at `x`.
pub fn central5<T: Real>(mut f: impl FnMut(T) -> T, x: T, h: T) -> (T, T) {
    let (fm2, fm1, f0, fp1, fp2) = (f(x - h - h), f(x - h), f(x), f(x + h), f(x + h + h));
    let d1 = (fm2 - T::lit(8.0) * fm1 + T::lit(8.0) * fp1 - fp2) / (T::lit(12.0) * h);
    let d2 = (-fm2 + T::lit(16.0) * fm1 - T::lit(30.0) * f0 + T::lit(16.0) * fp1 - fp2)
        / (T::lit(12.0) * h * h);
    (d1, d2)
}
