//! Gauss–Legendre, circle/sphere and ball rules, the Poisson kernel and the
//! Green functions of the ball.

mod kernels;
mod means;
mod rules;

pub use kernels::{green_ball, poisson_kernel, radial_green};
pub use means::{ball_integral, ball_integral_with, mean_value_identity_residual, surface_mean, surface_power_mean};
pub use rules::{unit_ball_volume, BallRule, QuadratureOrders, SphereRule};

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on the
/// three-term recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Legendre rule needs at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        // recompute derivative at the converged root
        let (mut p0, mut p1) = (1.0, 0.0);
        for j in 0..n {
            let p2 = p1;
            p1 = p0;
            p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
        }
        if (z * z - 1.0).abs() > 0.0 {
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    // remove the accumulated rounding drift so the weights sum to exactly 2
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v *= 2.0 / total);
    (x, w)
}

/// Gauss–Legendre rule mapped to `[0, 1]` as `(node, weight)` pairs.
pub fn gauss_legendre_unit(n: usize) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    x.into_iter()
        .zip(w)
        .map(|(xi, wi)| (0.5 * (xi + 1.0), 0.5 * wi))
        .collect()
}

/// Rule for `∫_0^1 f(t) dt` through `t = s²`, which turns endpoint behaviour
/// like `t log t` at zero into `s³ log s` and never places a node at 0.
pub fn gauss_legendre_squared(n: usize) -> Vec<(f64, f64)> {
    gauss_legendre_unit(n)
        .into_iter()
        .map(|(s, w)| (s * s, 2.0 * s * w))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_exactness() {
        for n in [1, 2, 5, 16, 48, 64] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            for deg in 0..2 * n {
                let q: f64 = x.iter().zip(&w).map(|(a, b)| b * a.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn squared_rule_handles_log_endpoint() {
        let q: f64 = gauss_legendre_squared(64)
            .iter()
            .map(|(t, w)| w * t * (1.0 / t).ln())
            .sum();
        assert!((q - 0.25).abs() < 1e-12);
    }
}
