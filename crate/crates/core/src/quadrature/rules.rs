use serde::{Deserialize, Serialize};

use super::{gauss_legendre, gauss_legendre_squared};
use crate::error::{LabError, Result};

/// Quadrature orders, configurable per run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureOrders {
    /// Trapezoid nodes on the circle.
    pub circle_nodes: usize,
    /// Gauss–Legendre nodes in `cos θ` on the 2-sphere.
    pub sphere_polar: usize,
    /// Uniform azimuthal nodes on the 2-sphere.
    pub sphere_azimuthal: usize,
    /// Radial Gauss–Legendre nodes.
    pub radial_nodes: usize,
}

impl Default for QuadratureOrders {
    fn default() -> Self {
        Self {
            circle_nodes: 512,
            sphere_polar: 48,
            sphere_azimuthal: 96,
            radial_nodes: 64,
        }
    }
}

impl QuadratureOrders {
    /// Lighter orders for inner loops (oscillation means, local balls).
    pub fn light() -> Self {
        Self {
            circle_nodes: 64,
            sphere_polar: 12,
            sphere_azimuthal: 24,
            radial_nodes: 16,
        }
    }

    pub fn sphere_rule(&self, n: usize) -> Result<SphereRule> {
        match n {
            2 => SphereRule::circle(self.circle_nodes),
            3 => SphereRule::sphere(self.sphere_polar, self.sphere_azimuthal),
            _ => Err(LabError::Unsupported(format!(
                "sphere quadrature is shipped for n in {{2, 3}}, got {n}"
            ))),
        }
    }

    pub fn ball_rule(&self, n: usize, radius: f64) -> Result<BallRule> {
        BallRule::new(radius, self.radial_nodes, self.sphere_rule(n)?)
    }
}

/// Quadrature for the normalized surface measure `σ` on `∂B^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereRule {
    dimension: usize,
    nodes: Vec<Vec<f64>>,
    weights: Vec<f64>,
    degree: usize,
}

impl SphereRule {
    /// Trapezoid rule with `count` equally spaced angles; exact for
    /// trigonometric polynomials of degree `< count`.
    pub fn circle(count: usize) -> Result<Self> {
        if count < 3 {
            return Err(LabError::Configuration("circle rule needs at least 3 nodes".into()));
        }
        let w = 1.0 / count as f64;
        let nodes = (0..count)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / count as f64;
                vec![t.cos(), t.sin()]
            })
            .collect();
        Ok(Self {
            dimension: 2,
            nodes,
            weights: vec![w; count],
            degree: count - 1,
        })
    }

    /// Product rule on `S²`: Gauss–Legendre in `cos θ` times uniform azimuth.
    pub fn sphere(polar: usize, azimuthal: usize) -> Result<Self> {
        if polar < 1 || azimuthal < 3 {
            return Err(LabError::Configuration("sphere rule orders too small".into()));
        }
        let (z, wz) = gauss_legendre(polar);
        let mut nodes = Vec::with_capacity(polar * azimuthal);
        let mut weights = Vec::with_capacity(polar * azimuthal);
        for (zi, wi) in z.iter().zip(&wz) {
            let rho = (1.0 - zi * zi).sqrt();
            for k in 0..azimuthal {
                let ph = 2.0 * std::f64::consts::PI * k as f64 / azimuthal as f64;
                nodes.push(vec![rho * ph.cos(), rho * ph.sin(), *zi]);
                weights.push(wi / 2.0 / azimuthal as f64);
            }
        }
        Ok(Self {
            dimension: 3,
            nodes,
            weights,
            degree: (2 * polar - 1).min(azimuthal - 1),
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn nodes(&self) -> &[Vec<f64>] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Polynomial degree integrated exactly.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.nodes.iter().map(Vec::as_slice).zip(self.weights.iter().copied())
    }
}

/// Volume of the unit ball in `R^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * std::f64::consts::PI / n as f64 * unit_ball_volume(n - 2),
    }
}

/// Radial Gauss–Legendre rule composed with a [`SphereRule`] on the ball
/// `B(0, radius)`. Radial nodes come from the `t = s²` mapped rule, so no node
/// sits at the origin and the `G_n` singularity there is integrable.
#[derive(Debug, Clone, PartialEq)]
pub struct BallRule {
    radius: f64,
    /// `(s, w)` with `w` carrying the `n s^{n-1} ds` density of `V_N`.
    radial: Vec<(f64, f64)>,
    sphere: SphereRule,
    normalized: bool,
}

impl BallRule {
    pub fn new(radius: f64, radial_nodes: usize, sphere: SphereRule) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(LabError::domain(format!("ball radius must be positive, got {radius}")));
        }
        let n = sphere.dimension() as i32;
        let radial = gauss_legendre_squared(radial_nodes)
            .into_iter()
            .map(|(t, w)| {
                let s = radius * t;
                (s, w * radius * n as f64 * s.powi(n - 1))
            })
            .collect();
        Ok(Self {
            radius,
            radial,
            sphere,
            normalized: true,
        })
    }

    /// Switches to raw Lebesgue measure (`dx` instead of `dV_N`).
    pub fn lebesgue(mut self) -> Self {
        self.normalized = false;
        self
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dimension(&self) -> usize {
        self.sphere.dimension()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn radial(&self) -> &[(f64, f64)] {
        &self.radial
    }

    pub fn sphere(&self) -> &SphereRule {
        &self.sphere
    }

    /// Factor converting `V_N` integrals into this rule's measure.
    pub fn measure_scale(&self) -> f64 {
        if self.normalized {
            1.0
        } else {
            unit_ball_volume(self.dimension())
        }
    }

    /// Nodes `(x, weight)` of the full rule.
    pub fn nodes(&self) -> impl Iterator<Item = (Vec<f64>, f64)> + '_ {
        let scale = self.measure_scale();
        self.radial.iter().flat_map(move |&(s, ws)| {
            self.sphere
                .iter()
                .map(move |(z, wz)| (z.iter().map(|c| c * s).collect(), ws * wz * scale))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
        let (mut sum, mut c) = (0.0f64, 0.0f64);
        for v in values {
            let t = sum + v;
            c += if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
            sum = t;
        }
        sum + c
    }

    #[test]
    fn sphere_weights_sum_to_one() {
        for rule in [
            SphereRule::circle(512).unwrap(),
            SphereRule::sphere(48, 96).unwrap(),
            SphereRule::sphere(7, 9).unwrap(),
        ] {
            let s = compensated_sum(rule.weights().iter().copied());
            assert!((s - 1.0).abs() < 1e-14);
            assert!(rule.nodes().iter().all(|z| (z.iter().map(|c| c * c).sum::<f64>() - 1.0).abs() < 1e-14));
        }
    }

    #[test]
    fn sphere_moments() {
        // ∫ z² dσ = 1/3 and ∫ x⁴ dσ = 1/5 on S²; ∫ cos² = 1/2 on S¹
        let s = SphereRule::sphere(48, 96).unwrap();
        let m2 = compensated_sum(s.iter().map(|(z, w)| w * z[2] * z[2]));
        let m4 = compensated_sum(s.iter().map(|(z, w)| w * z[0].powi(4)));
        assert!((m2 - 1.0 / 3.0).abs() < 1e-14);
        assert!((m4 - 0.2).abs() < 1e-14);
        let c = SphereRule::circle(512).unwrap();
        let m: f64 = c.iter().map(|(z, w)| w * z[0] * z[0]).sum();
        assert!((m - 0.5).abs() < 1e-14);
    }

    #[test]
    fn unit_volumes() {
        assert!((unit_ball_volume(2) - std::f64::consts::PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-14);
    }

    #[test]
    fn ball_rule_normalization() {
        for n in [2, 3] {
            let rule = QuadratureOrders::default().ball_rule(n, 1.0).unwrap();
            let total: f64 = rule.nodes().map(|(_, w)| w).sum();
            assert!((total - 1.0).abs() < 1e-13);
            let raw = rule.clone().lebesgue();
            let total: f64 = raw.nodes().map(|(_, w)| w).sum();
            assert!((total - unit_ball_volume(n)).abs() < 1e-12);
        }
        assert!(BallRule::new(0.0, 8, SphereRule::circle(8).unwrap()).is_err());
    }
}
