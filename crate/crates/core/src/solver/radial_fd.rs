//! Radial finite-difference backend: `u'' + (n−1)/s u' = λ(s)|u|^{τ−1}u` on
//! `[0, 1]` with `u'(0) = 0`, `u(1) = g`, solved by Newton's method with a
//! tridiagonal solve per step.

use crate::error::{LabError, Result};
use crate::fields::ScalarField;

/// Thomas algorithm; `sub[0]` and `sup[last]` are ignored.
pub(crate) fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - sub[i] * c[i - 1];
        c[i] = if i + 1 < n { sup[i] / m } else { 0.0 };
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

/// Nodal values on `s_i = i/intervals`, plus the Newton history.
pub(crate) fn solve_radial(
    n: usize,
    tau: f64,
    lambda: impl Fn(f64) -> f64,
    g: f64,
    intervals: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let h = 1.0 / intervals as f64;
    let m = intervals + 1;
    let lam: Vec<f64> = (0..m).map(|i| lambda(i as f64 * h)).collect();
    let nonlin = |u: f64| u.abs().powf(tau - 1.0) * u;
    let dnonlin = |u: f64| tau * u.abs().powf(tau - 1.0);
    let mut u = vec![g; m];
    let mut history = Vec::new();
    let nf = n as f64;
    for _ in 0..50 {
        let (mut sub, mut diag, mut sup, mut res) = (vec![0.0; m], vec![0.0; m], vec![0.0; m], vec![0.0; m]);
        // s = 0: Δu ≈ 2n(u₁ − u₀)/h²
        diag[0] = -2.0 * nf / (h * h) - lam[0] * dnonlin(u[0]);
        sup[0] = 2.0 * nf / (h * h);
        res[0] = 2.0 * nf * (u[1] - u[0]) / (h * h) - lam[0] * nonlin(u[0]);
        for i in 1..m - 1 {
            let s = i as f64 * h;
            let a = 1.0 / (h * h) - (nf - 1.0) / (2.0 * s * h);
            let c = 1.0 / (h * h) + (nf - 1.0) / (2.0 * s * h);
            sub[i] = a;
            sup[i] = c;
            diag[i] = -2.0 / (h * h) - lam[i] * dnonlin(u[i]);
            res[i] = a * u[i - 1] + c * u[i + 1] - 2.0 * u[i] / (h * h) - lam[i] * nonlin(u[i]);
        }
        diag[m - 1] = 1.0;
        res[m - 1] = u[m - 1] - g;
        let neg: Vec<f64> = res.iter().map(|r| -r).collect();
        let delta = solve_tridiagonal(&sub, &diag, &sup, &neg);
        let step = delta.iter().fold(0.0f64, |a, d| a.max(d.abs()));
        for (ui, di) in u.iter_mut().zip(&delta) {
            *ui += di;
        }
        history.push(step);
        if !step.is_finite() {
            break;
        }
        // rounding in the h⁻² stencil leaves a floor near 1e-12
        if step <= 1e-10 * g.abs().max(1.0) {
            return Ok((u, history));
        }
    }
    let last = history.last().copied().unwrap_or(f64::NAN);
    Err(LabError::Divergence {
        iterations: history.len(),
        last_update: last,
        history,
    })
}

/// Clamped cubic spline through equally spaced values on `[0, 1]`.
#[derive(Debug, Clone)]
pub(crate) struct RadialSpline {
    h: f64,
    values: Vec<f64>,
    second: Vec<f64>,
}

impl RadialSpline {
    pub(crate) fn new(values: Vec<f64>, slope0: f64, slope1: f64) -> Self {
        let m = values.len();
        let h = 1.0 / (m - 1) as f64;
        let (mut sub, mut diag, mut sup, mut rhs) = (vec![1.0; m], vec![4.0; m], vec![1.0; m], vec![0.0; m]);
        diag[0] = 2.0;
        diag[m - 1] = 2.0;
        rhs[0] = 6.0 / h * ((values[1] - values[0]) / h - slope0);
        rhs[m - 1] = 6.0 / h * (slope1 - (values[m - 1] - values[m - 2]) / h);
        for i in 1..m - 1 {
            rhs[i] = 6.0 / (h * h) * (values[i + 1] - 2.0 * values[i] + values[i - 1]);
        }
        sub[0] = 0.0;
        sup[m - 1] = 0.0;
        let second = solve_tridiagonal(&sub, &diag, &sup, &rhs);
        Self { h, values, second }
    }

    pub(crate) fn value(&self, s: f64) -> f64 {
        let m = self.values.len();
        let i = ((s / self.h).floor() as usize).min(m - 2);
        let (x0, x1) = (i as f64 * self.h, (i + 1) as f64 * self.h);
        let (a, b) = ((x1 - s) / self.h, (s - x0) / self.h);
        let (y0, y1, m0, m1) = (self.values[i], self.values[i + 1], self.second[i], self.second[i + 1]);
        a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * self.h * self.h / 6.0
    }

    pub(crate) fn into_field(self, n: usize, name: impl Into<String>) -> ScalarField {
        ScalarField::new(n, name, move |x| self.value(x.iter().map(|c| c * c).sum::<f64>().sqrt()))
            .with_domain_radius(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::sinhc;

    #[test]
    fn tridiagonal_solves() {
        let x = solve_tridiagonal(&[0.0, 1.0, 1.0], &[4.0, 4.0, 4.0], &[1.0, 1.0, 0.0], &[5.0, 6.0, 5.0]);
        for v in x {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn radial_yukawa_n3() {
        let (u, hist) = solve_radial(3, 1.0, |_| 1.0, 1.0, 2000).unwrap();
        assert!(hist.len() <= 3);
        let exact = |s: f64| sinhc(s) / sinhc(1.0);
        for (i, v) in u.iter().enumerate().step_by(100) {
            assert!((v - exact(i as f64 / 2000.0)).abs() < 1e-7);
        }
        let slope1 = (3.0 * u[2000] - 4.0 * u[1999] + u[1998]) * 1000.0;
        let spline = RadialSpline::new(u, 0.0, slope1);
        for s in [0.0, 0.01234, 0.5, 0.8765] {
            assert!((spline.value(s) - exact(s)).abs() < 1e-7);
        }
    }
}
