use super::unit_ball_volume;
use crate::error::{LabError, Result};
use crate::geometry::{dist, dot, norm};

/// Poisson kernel of `B(0, r)` against the normalized surface measure:
/// `P_r(w, ζ) = (r² - |w|²) / |w - rζ|^n`, so that `∫ P_r(w, ·) dσ = r^{2-n}`.
pub fn poisson_kernel(n: usize, r: f64, w: &[f64], zeta: &[f64]) -> Result<f64> {
    let nw = norm(w);
    if !(nw < r && r <= 1.0) {
        return Err(LabError::domain(format!("poisson kernel needs |w| < r <= 1, got |w| = {nw}, r = {r}")));
    }
    let d2: f64 = w.iter().zip(zeta).map(|(a, z)| (a - r * z).powi(2)).sum();
    Ok((r * r - nw * nw) / d2.powf(n as f64 / 2.0))
}

/// Green function `G_r(w, y)` of the ball in the scaled variable `y`.
///
/// For `n ≥ 3`:
/// `[|w - ry|^{2-n} - (r² + |w|²|y|² - 2r⟨w, y⟩)^{(2-n)/2}] / (n(n-2)V(B^n))`.
/// For `n = 2` the logarithmic companion
/// `log(√(r² + |w|²|y|² - 2r⟨w, y⟩) / |w - ry|) / (2π)` is used.
pub fn green_ball(n: usize, r: f64, w: &[f64], y: &[f64]) -> Result<f64> {
    if n < 2 {
        return Err(LabError::domain("green function needs n >= 2"));
    }
    let (nw, ny) = (norm(w), norm(y));
    if !(nw < r && ny < 1.0 && r <= 1.0) {
        return Err(LabError::domain(format!(
            "green function needs |w| < r <= 1 and |y| < 1, got |w| = {nw}, |y| = {ny}, r = {r}"
        )));
    }
    let ry: Vec<f64> = y.iter().map(|c| r * c).collect();
    let direct = dist(w, &ry);
    if direct == 0.0 {
        return Err(LabError::Singularity(w.to_vec()));
    }
    let image2 = r * r + nw * nw * ny * ny - 2.0 * r * dot(w, y);
    if n == 2 {
        return Ok((0.5 * image2.ln() - direct.ln()) / (2.0 * std::f64::consts::PI));
    }
    let p = 2.0 - n as f64;
    let c = 1.0 / (n as f64 * (n as f64 - 2.0) * unit_ball_volume(n));
    Ok(c * (direct.powf(p) - image2.powf(p / 2.0)))
}

/// Radial kernel `G_n(s, r)` of the mean-value identity:
/// `(s^{2-n} - r^{2-n}) / (n(n-2))` for `n ≥ 3`, `½ log(r/s)` for `n = 2`.
/// Returns `+∞` at `s = 0`.
pub fn radial_green(n: usize, s: f64, r: f64) -> Result<f64> {
    if !(s >= 0.0 && s <= r && r <= 1.0 && r > 0.0) {
        return Err(LabError::domain(format!("radial green needs 0 <= s <= r <= 1, got s = {s}, r = {r}")));
    }
    if s == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(match n {
        2 => 0.5 * (r / s).ln(),
        _ => {
            let p = 2.0 - n as f64;
            (s.powf(p) - r.powf(p)) / (n as f64 * (n as f64 - 2.0))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::SphereRule;
    use crate::sampling;

    #[test]
    fn poisson_examples() {
        assert_eq!(poisson_kernel(2, 1.0, &[0.0, 0.0], &[1.0, 0.0]).unwrap(), 1.0);
        assert!((poisson_kernel(3, 0.5, &[0.0; 3], &[0.0, 0.0, 1.0]).unwrap() - 2.0).abs() < 1e-15);
        assert!(poisson_kernel(2, 0.5, &[0.5, 0.0], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn poisson_normalization_on_random_points() {
        for (n, rule) in [
            (2, SphereRule::circle(512).unwrap()),
            (3, SphereRule::sphere(48, 96).unwrap()),
        ] {
            let mut rng = sampling::rng(11);
            for _ in 0..100 {
                let r = 0.3 + 0.7 * rand::Rng::gen::<f64>(&mut rng);
                // stay where the product rule resolves the kernel peak
                let w = sampling::point_in_ball(&mut rng, n, 0.75 * r);
                let q: f64 = rule
                    .iter()
                    .map(|(z, wt)| wt * poisson_kernel(n, r, &w, z).unwrap())
                    .sum();
                let exact = r.powi(2 - n as i32);
                assert!((q - exact).abs() < 1e-8 * exact, "n={n} q={q} exact={exact}");
            }
        }
    }

    #[test]
    fn green_reduces_at_centre() {
        let r = 0.7;
        let y = [0.3, 0.2, -0.1];
        let g = green_ball(3, r, &[0.0; 3], &y).unwrap();
        let c = 1.0 / (3.0 * unit_ball_volume(3));
        assert!((g - c * (1.0 / (r * norm(&y)) - 1.0 / r)).abs() < 1e-14);
    }

    #[test]
    fn green_vanishes_on_boundary_and_is_symmetric() {
        for n in [2, 3] {
            let w: Vec<f64> = [0.2, -0.3, 0.1][..n].to_vec();
            let edge: Vec<f64> = [0.6, 0.8, 0.0][..n].iter().map(|c| c * (1.0 - 1e-12)).collect();
            assert!(green_ball(n, 1.0, &w, &edge).unwrap().abs() < 1e-9);
            let mut rng = sampling::rng(5);
            for _ in 0..50 {
                let a = sampling::point_in_ball(&mut rng, n, 0.95);
                let b = sampling::point_in_ball(&mut rng, n, 0.95);
                let g1 = green_ball(n, 1.0, &a, &b).unwrap();
                let g2 = green_ball(n, 1.0, &b, &a).unwrap();
                assert!(g1 > 0.0);
                assert!((g1 - g2).abs() < 1e-12 * g1.abs().max(1.0));
            }
        }
        assert!(matches!(
            green_ball(3, 1.0, &[0.1, 0.0, 0.0], &[0.1, 0.0, 0.0]),
            Err(LabError::Singularity(_))
        ));
    }

    #[test]
    fn radial_green_examples() {
        assert!((radial_green(3, 0.25, 0.5).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(radial_green(3, 0.5, 0.5).unwrap(), 0.0);
        let e = std::f64::consts::E;
        assert!((radial_green(2, 0.5 / e, 0.5).unwrap() - 0.5).abs() < 1e-15);
        assert!(radial_green(2, 0.0, 0.5).unwrap().is_infinite());
    }
}
