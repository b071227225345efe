//! Hardy and Bloch-type norms, oscillation means, Lipschitz constants,
//! Dirichlet-type energies and radial growth profiles.
//!
//! Sup-type quantities are sampled, so every reported value is a lower bound
//! of the true supremum; the sampling is recorded next to it.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::fields::ScalarField;
use crate::geometry::{dist, norm, PairSample};
use crate::majorants::{phi, BlochWeight, Majorant};
use crate::quadrature::{surface_mean, BallRule, QuadratureOrders, SphereRule};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub value: f64,
    /// Set when a sample produced an infinite or non-finite value.
    pub infinite: bool,
    pub argmax: Vec<f64>,
    pub samples: usize,
    /// Spacing of the finest radial scan around the argmax.
    pub resolution: f64,
}

fn on_axis(n: usize, r: f64) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[0] = r;
    e
}

/// Evaluates `score` on `radii`, then on 16 radii between the neighbours of the
/// best one. Returns `(best score, best radius, samples, resolution)`.
fn scan_radii(radii: &[f64], score: impl Fn(f64) -> Result<f64> + Sync) -> Result<(f64, f64, usize, f64)> {
    let values = radii.par_iter().map(|&r| score(r)).collect::<Result<Vec<f64>>>()?;
    let (mut k, mut best) = (0, f64::NEG_INFINITY);
    for (i, v) in values.iter().enumerate() {
        if *v > best {
            best = *v;
            k = i;
        }
    }
    let mut samples = radii.len();
    let (lo, hi) = (radii[k.saturating_sub(1)], radii[(k + 1).min(radii.len() - 1)]);
    let mut arg = radii[k];
    let mut resolution = hi - lo;
    if hi > lo {
        let fine: Vec<f64> = (1..16).map(|i| lo + (hi - lo) * i as f64 / 16.0).collect();
        let fine_values = fine.par_iter().map(|&r| score(r)).collect::<Result<Vec<f64>>>()?;
        samples += fine.len();
        resolution = (hi - lo) / 16.0;
        for (r, v) in fine.iter().zip(fine_values) {
            if v > best {
                best = v;
                arg = *r;
            }
        }
    }
    Ok((best, arg, samples, resolution))
}

/// `sup_r M_ν(u, r)` over the radius grid (`ν = ∞` takes `sup |u|` over the
/// sphere nodes).
pub fn hardy_norm(u: &ScalarField, nu: f64, radius_grid: &[f64], rule: &SphereRule) -> Result<NormReport> {
    if radius_grid.is_empty() {
        return Err(LabError::Configuration("empty radius grid".into()));
    }
    let (value, r, samples, resolution) = scan_radii(radius_grid, |r| surface_mean(u, r, rule, nu))?;
    Ok(NormReport {
        value,
        infinite: !value.is_finite(),
        argmax: on_axis(u.dimension(), r),
        samples: samples * rule.len(),
        resolution,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BlochSampling {
    pub radial_points: usize,
    /// Smallest boundary distance sampled.
    pub d_min: f64,
}

impl Default for BlochSampling {
    fn default() -> Self {
        Self {
            radial_points: 120,
            d_min: 1e-3,
        }
    }
}

impl BlochSampling {
    /// `0` followed by radii whose boundary distances are log-spaced from 1
    /// down to `d_min`.
    pub fn radii(&self) -> Vec<f64> {
        let m = self.radial_points.max(2);
        let mut out: Vec<f64> = (0..m)
            .map(|k| 1.0 - (self.d_min.ln() * k as f64 / (m - 1) as f64).exp())
            .collect();
        out[0] = 0.0;
        out
    }
}

/// `|u(0)| + sup M_ν(|∇u|, |x|) ω(φ(x))`; for `ν = ∞` the supremum of
/// `|∇u(x)| ω(φ(x))` over points. The finite-`ν` weight depends on `x` only
/// through `|x|`, so that branch is a radial scan.
pub fn bloch_norm(
    u: &ScalarField,
    nu: f64,
    omega: &Majorant,
    weight: &BlochWeight,
    sampling: &BlochSampling,
    rule: &SphereRule,
) -> Result<NormReport> {
    let n = u.dimension();
    let u0 = u.eval(&vec![0.0; n])?.abs();
    let grad = u.gradient_norm();
    let radii = sampling.radii();
    let (sup, r, samples, resolution) = if nu == f64::INFINITY {
        // track the angular argmax separately
        let score = |r: f64| -> Result<f64> {
            let w = omega.eval(phi(weight, 1.0 - r)?);
            Ok(w * surface_mean(&grad, r, rule, f64::INFINITY)?)
        };
        scan_radii(&radii, score)?
    } else {
        let score = |r: f64| -> Result<f64> {
            let w = omega.eval(phi(weight, 1.0 - r)?);
            Ok(w * surface_mean(&grad, r, rule, nu)?)
        };
        scan_radii(&radii, score)?
    };
    let argmax = if nu == f64::INFINITY {
        let mut best = (f64::NEG_INFINITY, on_axis(n, r));
        for (z, _) in rule.iter() {
            let x: Vec<f64> = z.iter().map(|c| c * r).collect();
            let g = grad.eval(&x)?;
            if g > best.0 {
                best = (g, x);
            }
        }
        best.1
    } else {
        on_axis(n, r)
    };
    let value = u0 + sup;
    Ok(NormReport {
        value,
        infinite: !value.is_finite(),
        argmax,
        samples: samples * rule.len(),
        resolution,
    })
}

/// `|B(x,r)|^{-1} ∫_{B(x,r)} |u(y) − u(x)| dy`; the closed ball must lie in
/// the closed unit ball.
pub fn oscillation_mean(u: &ScalarField, x: &[f64], r: f64, orders: &QuadratureOrders) -> Result<f64> {
    if !(r > 0.0) || norm(x) + r > 1.0 + 1e-12 {
        return Err(LabError::domain(format!("ball B({x:?}, {r}) leaves the unit ball")));
    }
    let n = x.len();
    let rule = BallRule::new(r, orders.radial_nodes, orders.sphere_rule(n)?)?;
    let ux = u.eval(x)?;
    let scale = r.powi(-(n as i32));
    let mut acc = 0.0;
    let mut y = vec![0.0; n];
    for (p, w) in rule.nodes() {
        for k in 0..n {
            y[k] = x[k] + p[k];
        }
        acc += w * (u.eval(&y)? - ux).abs();
    }
    Ok(acc * scale)
}

/// `sup |u(x) − u(y)| / ω(|x − y|)` over the pairs.
pub fn lipschitz_constant(u: &ScalarField, omega: &Majorant, pairs: &[PairSample]) -> Result<NormReport> {
    let ratios = pairs
        .par_iter()
        .map(|p| {
            let d = dist(&p.x, &p.y);
            if d == 0.0 {
                return Ok(0.0);
            }
            Ok((u.eval(&p.x)? - u.eval(&p.y)?).abs() / omega.eval(d))
        })
        .collect::<Result<Vec<f64>>>()?;
    let (mut best, mut arg) = (0.0, Vec::new());
    for (p, v) in pairs.iter().zip(ratios) {
        if v > best || arg.is_empty() {
            best = v;
            arg = p.x.clone();
        }
    }
    Ok(NormReport {
        value: best,
        infinite: !best.is_finite(),
        argmax: arg,
        samples: pairs.len(),
        resolution: 0.0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirichletEnergy {
    /// Integral over the whole ball.
    pub value: f64,
    /// `(ε, integral over B_{1−ε})`.
    pub shells: Vec<(f64, f64)>,
    /// Whether the shell sequence settles to 1% at the smallest `ε`.
    pub finite: bool,
}

pub const ENERGY_SHELLS: [f64; 3] = [1e-1, 1e-2, 1e-3];

fn energy_integrand(u: &ScalarField, x: &[f64], alpha: f64, gamma: f64, mu: f64) -> Result<f64> {
    let weight = (1.0 - x.iter().map(|c| c * c).sum::<f64>()).powf(alpha);
    let g = if gamma == 0.0 { 1.0 } else { norm(&u.gradient(x)?).powf(gamma) };
    let h = if mu == 0.0 { 1.0 } else { u.hessian_frobenius_sq(x)?.powf(mu) };
    Ok(weight * g * h)
}

/// `∫_B (1 − |x|²)^α |∇u|^γ (Σ u_{x_j x_k}²)^μ dx` in raw Lebesgue measure.
pub fn dirichlet_energy(u: &ScalarField, alpha: f64, gamma: f64, mu: f64, orders: &QuadratureOrders) -> Result<DirichletEnergy> {
    if !(alpha > 0.0) {
        return Err(LabError::Configuration(format!("energy weight exponent must be > 0, got {alpha}")));
    }
    let n = u.dimension();
    let sphere = orders.sphere_rule(n)?;
    let integrate = |radius: f64| -> Result<f64> {
        let rule = BallRule::new(radius, orders.radial_nodes, sphere.clone())?.lebesgue();
        let parts = rule
            .radial()
            .par_iter()
            .map(|&(s, ws)| {
                let mut acc = 0.0;
                for (z, wz) in sphere.iter() {
                    let x: Vec<f64> = z.iter().map(|c| c * s).collect();
                    let v = energy_integrand(u, &x, alpha, gamma, mu)?;
                    if !v.is_finite() {
                        return Err(LabError::NonFinite { value: v, location: x });
                    }
                    acc += wz * v;
                }
                Ok(ws * acc)
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(parts.iter().sum::<f64>() * rule.measure_scale())
    };
    let shells = ENERGY_SHELLS
        .iter()
        .map(|&eps| Ok((eps, integrate(1.0 - eps)?)))
        .collect::<Result<Vec<_>>>()?;
    let value = integrate(1.0)?;
    let k = shells.len();
    let (a, b) = (shells[k - 2].1, shells[k - 1].1);
    let finite = value.is_finite() && (b - a).abs() <= 1e-2 * b.abs().max(f64::MIN_POSITIVE);
    Ok(DirichletEnergy { value, shells, finite })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthNormalizer {
    /// `√(L · log log L)`, `L = log(1/(1−r))`.
    Makarov,
    /// `√L · log L`.
    Korenblum,
}

impl GrowthNormalizer {
    pub fn eval(&self, r: f64) -> Option<f64> {
        let l = (1.0 / (1.0 - r)).ln();
        let v = match self {
            GrowthNormalizer::Makarov => (l * l.ln().ln()).sqrt(),
            GrowthNormalizer::Korenblum => l.sqrt() * l.ln(),
        };
        (v.is_finite() && v > 0.0).then_some(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub r: f64,
    pub value: f64,
    pub normalizer: Option<f64>,
    pub ratio: Option<f64>,
    /// Normalizer undefined or nonpositive at this radius.
    pub flagged: bool,
}

/// `|u(rζ)|` divided by the chosen normalizer along one ray. Exploratory.
pub fn radial_growth_profile(u: &ScalarField, zeta: &[f64], r_grid: &[f64], normalizer: GrowthNormalizer) -> Result<Vec<GrowthRow>> {
    r_grid
        .iter()
        .map(|&r| {
            if !(0.0..1.0).contains(&r) {
                return Err(LabError::domain(format!("growth radius {r} outside [0, 1)")));
            }
            let x: Vec<f64> = zeta.iter().map(|c| c * r).collect();
            let value = u.eval(&x)?.abs();
            let nz = normalizer.eval(r);
            Ok(GrowthRow {
                r,
                value,
                normalizer: nz,
                ratio: nz.map(|d| value / d),
                flagged: nz.is_none(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::catalog;
    use crate::sampling::linspace;
    use crate::special::sinhc;
    use std::f64::consts::PI;

    fn orders() -> QuadratureOrders {
        QuadratureOrders::default()
    }

    #[test]
    fn hardy_examples() {
        let grid = linspace(0.0, 0.999, 50);
        let o = orders();
        let c = hardy_norm(&ScalarField::constant(2, -2.0), 2.0, &grid, &o.sphere_rule(2).unwrap()).unwrap();
        assert!((c.value - 2.0).abs() < 1e-14);
        let x1 = hardy_norm(&catalog::coordinate(2, 0), 2.0, &grid, &o.sphere_rule(2).unwrap()).unwrap();
        assert!((x1.value - 0.999 / 2f64.sqrt()).abs() < 1e-12);
        let y = hardy_norm(&catalog::yukawa_radial(3, 1.0), 2.0, &grid, &o.sphere_rule(3).unwrap()).unwrap();
        assert!((y.value - sinhc(0.999)).abs() < 1e-12);
        assert!((sinhc(1.0) - 1.175201).abs() < 1e-6);
    }

    #[test]
    fn bloch_examples() {
        let o = QuadratureOrders::default();
        let id = Majorant::identity();
        let w = BlochWeight::new(1.0, 0.0).unwrap();
        let s = BlochSampling::default();
        let c = bloch_norm(&ScalarField::constant(2, 3.0), f64::INFINITY, &id, &w, &s, &o.sphere_rule(2).unwrap()).unwrap();
        assert!((c.value - 3.0).abs() < 1e-14);
        let x1 = bloch_norm(&catalog::coordinate(2, 0), f64::INFINITY, &id, &w, &s, &o.sphere_rule(2).unwrap()).unwrap();
        assert!((x1.value - 1.0).abs() < 1e-14);
        assert_eq!(x1.argmax, vec![0.0, 0.0]);
        let lp = bloch_norm(&catalog::log_pole(), f64::INFINITY, &id, &w, &s, &o.sphere_rule(2).unwrap()).unwrap();
        assert!((lp.value - 1.0).abs() < 1e-9, "{}", lp.value);
        assert!(lp.argmax[1].abs() < 1e-12);
    }

    #[test]
    fn oscillation_examples() {
        let o = orders();
        let c = ScalarField::constant(2, 1.0);
        assert_eq!(oscillation_mean(&c, &[0.1, 0.1], 0.3, &o).unwrap(), 0.0);
        let x1 = catalog::coordinate(2, 0);
        for (x, r) in [([0.0, 0.0], 0.5), ([0.3, -0.2], 0.2)] {
            let v = oscillation_mean(&x1, &x, r, &o).unwrap();
            assert!((v - 4.0 * r / (3.0 * PI)).abs() < 1e-5 * r, "{v}");
        }
        let q = catalog::norm_squared(2);
        assert!((oscillation_mean(&q, &[0.0, 0.0], 0.6, &o).unwrap() - 0.18).abs() < 1e-12);
        assert!(oscillation_mean(&q, &[0.8, 0.0], 0.5, &o).is_err());
    }

    #[test]
    fn lipschitz_examples() {
        let pairs = PairSample::uniform_in_ball(3, 2, 500, 0.99);
        let id = Majorant::identity();
        assert_eq!(lipschitz_constant(&ScalarField::constant(2, 1.0), &id, &pairs).unwrap().value, 0.0);
        let l = lipschitz_constant(&catalog::coordinate(2, 0), &id, &pairs).unwrap().value;
        assert!(l <= 1.0 + 1e-12 && l > 0.95);
        let s = lipschitz_constant(&catalog::sqrt_distance(2), &Majorant::sqrt(), &pairs).unwrap();
        assert!(s.value.is_finite() && s.value > 0.0);
    }

    #[test]
    fn energy_examples() {
        let o = orders();
        let e = dirichlet_energy(&catalog::coordinate(2, 0), 1.0, 0.0, 1.0, &o).unwrap();
        assert_eq!(e.value, 0.0);
        let q = dirichlet_energy(&catalog::norm_squared(2), 1.0, 0.0, 1.0, &o).unwrap();
        assert!((q.value - 4.0 * PI).abs() < 1e-10 && q.finite);
        let h = dirichlet_energy(&catalog::by_name("x1x2", 2).unwrap(), 1.0, 0.0, 1.0, &o).unwrap();
        assert!((h.value - PI).abs() < 1e-10);
        let c = dirichlet_energy(&catalog::by_name("x1x2", 2).unwrap().scaled(3.0), 1.0, 0.0, 1.0, &o).unwrap();
        assert!((c.value - 9.0 * h.value).abs() < 1e-10 * c.value);
        let lp = dirichlet_energy(&catalog::log_pole(), 1.0, 0.0, 1.0, &QuadratureOrders::light()).unwrap();
        assert!(!lp.finite);
    }

    #[test]
    fn growth_profile_flags() {
        let rows = radial_growth_profile(&catalog::log_pole(), &[1.0, 0.0], &[0.0, 0.5, 0.9, 0.99, 0.999], GrowthNormalizer::Korenblum).unwrap();
        assert!(rows[0].flagged && rows[1].flagged);
        assert!(!rows[4].flagged && rows[4].ratio.unwrap() < 2.0);
        let m = radial_growth_profile(&catalog::coordinate(2, 0), &[1.0, 0.0], &[0.9, 0.999], GrowthNormalizer::Makarov).unwrap();
        assert!(m[0].flagged && !m[1].flagged);
    }
}
