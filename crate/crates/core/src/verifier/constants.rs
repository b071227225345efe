//! Empirical constants of the existence-type estimates.

use rand::Rng;
use rayon::prelude::*;

use super::{CheckSettings, Stability, Verdict};
use crate::error::{LabError, Result};
use crate::fields::{ScalarField, VectorField};
use crate::geometry::{
    ball_quasihyperbolic, grid_quasihyperbolic_from, norm, rasterize_disk_image, weak_uniform_bound_constant,
    BallDomain, PairSample,
};
use crate::majorants::{log_grid, validate_majorant, Majorant};
use crate::params;
use crate::quadrature::{ball_integral_with, BallRule, QuadratureOrders};
use crate::sampling::{point_in_ball, rng, sub_seed, unit_vector};

/// Origin followed by `2N − 1` seeded points of `|x| ≤ r_max`; the first `N`
/// form the base sample.
fn doubled_points(seed: u64, n: usize, count: usize, r_max: f64) -> Vec<Vec<f64>> {
    let mut g = rng(seed);
    let mut pts = vec![vec![0.0; n]];
    while pts.len() < 2 * count.max(1) {
        pts.push(point_in_ball(&mut g, n, r_max));
    }
    pts
}

/// Ratio with the convention `0/0 = 0`.
fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else if den == 0.0 {
        f64::INFINITY
    } else {
        num / den
    }
}

/// `∫_{B(x,R)} h(u(y)) dy` in Lebesgue measure.
fn local_integral(u: &ScalarField, x: &[f64], radius: f64, orders: &QuadratureOrders, h: impl Fn(f64) -> f64) -> Result<f64> {
    let rule = BallRule::new(radius, orders.radial_nodes, orders.sphere_rule(x.len())?)?.lebesgue();
    let mut y = vec![0.0; x.len()];
    ball_integral_with(&rule, |p| {
        for k in 0..x.len() {
            y[k] = x[k] + p[k];
        }
        Ok(h(u.eval(&y)?))
    })
}

/// Gradient estimate constant
/// `sup |∇u(x)|^ν R^{ν+n} / (∫_{B(x,R)} |u|^ν + ∫_{B(x,R)} |u|^{τν})` with
/// `R = radius_fraction · d(x)`.
pub fn verify_gradient_bound(u: &ScalarField, tau: f64, nu: f64, radius_fraction: f64, s: &CheckSettings) -> Result<Verdict> {
    if !(radius_fraction > 0.0 && radius_fraction < 1.0) || !(nu > 0.0) || !(tau > 0.0) {
        return Err(LabError::Configuration(format!(
            "need 0 < R-fraction < 1, ν > 0, τ > 0; got {radius_fraction}, {nu}, {tau}"
        )));
    }
    let n = u.dimension();
    let pts = doubled_points(sub_seed(s.seed, "prop-1.1"), n, s.samples, 0.9);
    let ratios = pts
        .par_iter()
        .map(|x| {
            let radius = radius_fraction * (1.0 - norm(x));
            let lhs = norm(&u.gradient(x)?).powf(nu) * radius.powf(nu + n as f64);
            let i1 = local_integral(u, x, radius, &s.local_orders, |v| v.abs().powf(nu))?;
            let i2 = local_integral(u, x, radius, &s.local_orders, |v| v.abs().powf(tau * nu))?;
            Ok(ratio(lhs, i1 + i2))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(Verdict::stability(
        "prop-1.1",
        params! {"field" => u.name(), "n" => n, "tau" => tau, "nu" => nu, "radius_fraction" => radius_fraction},
        pts.len(),
        &[Stability::from_ratios("C", &ratios, s.samples)],
    ))
}

/// Both sides of the oscillation characterization:
/// `A = sup |∇u(x)| ω(d(x)^α)` and `B = sup_{r ≤ d(x)} osc(x, r) ω(r^α)/r`,
/// plus the comparability ratio `A/B`.
pub fn verify_bloch_oscillation(u: &ScalarField, omega: &Majorant, alpha: f64, s: &CheckSettings) -> Result<Verdict> {
    if !(1.0..2.0).contains(&alpha) {
        return Err(LabError::hypothesis(format!("α = {alpha} outside [1, 2)"), vec![]));
    }
    if !validate_majorant(omega, &log_grid(1e-6, 1.0, 200))? {
        return Err(LabError::Configuration(format!("{} is not a majorant", omega.label())));
    }
    let n = u.dimension();
    let pts = doubled_points(sub_seed(s.seed, "thm-1.2"), n, s.samples, 0.999);
    let mut g = rng(sub_seed(s.seed, "thm-1.2/radii"));
    let fractions: Vec<f64> = pts.iter().map(|_| g.gen_range(0.05..1.0)).collect();
    let rows = pts
        .par_iter()
        .zip(&fractions)
        .map(|(x, &frac)| {
            let d = 1.0 - norm(x);
            let a = norm(&u.gradient(x)?) * omega.eval(d.powf(alpha));
            let mut b: f64 = 0.0;
            for r in [d, frac * d] {
                let osc = crate::functionals::oscillation_mean(u, x, r, &s.local_orders)?;
                b = b.max(osc * omega.eval(r.powf(alpha)) / r);
            }
            Ok((a, b))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    let a: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let b: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let sa = Stability::from_ratios("A", &a, s.samples);
    let sb = Stability::from_ratios("B", &b, s.samples);
    let mut records = vec![sa.clone(), sb.clone()];
    if sa.fine > 0.0 || sb.fine > 0.0 {
        records.push(Stability::new("A_over_B", ratio(sa.coarse, sb.coarse), ratio(sa.fine, sb.fine)));
    }
    Ok(Verdict::stability(
        "thm-1.2",
        params! {"field" => u.name(), "n" => n, "omega" => omega.label(), "alpha" => alpha},
        pts.len(),
        &records,
    ))
}

/// Checks `Δu_k = λ_k u_k` with `λ_k ≥ 0` on the samples.
fn check_component_equations(map: &VectorField, lambdas: &[f64], pts: &[Vec<f64>]) -> Result<()> {
    if lambdas.len() != map.dimension() {
        return Err(LabError::Configuration(format!(
            "{} λ constants for a map with {} components",
            lambdas.len(),
            map.dimension()
        )));
    }
    let mut bad = Vec::new();
    for (uk, &lk) in map.components().iter().zip(lambdas) {
        if lk < 0.0 {
            return Err(LabError::hypothesis(format!("λ = {lk} < 0"), vec![]));
        }
        for x in pts {
            let v = uk.eval(x)?;
            if (uk.laplacian(x)? - lk * v).abs() > 1e-6 * v.abs().max(1.0) {
                bad.push(x.clone());
            }
        }
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(LabError::hypothesis("component does not solve Δu_k = λ_k u_k", bad))
    }
}

const TARGETS_PER_SOURCE: usize = 8;
const IMAGE_CELLS: usize = 256;

/// Weak-uniform-boundedness constant and quasihyperbolic Lipschitz constant of
/// a planar map on the unit disk. Image distances come from a rasterized
/// image.
pub fn verify_metric_equivalence(map: &VectorField, lambdas: &[f64], s: &CheckSettings) -> Result<Verdict> {
    if map.dimension() != 2 {
        return Err(LabError::Configuration("metric equivalence check needs a planar map".into()));
    }
    let ball = BallDomain::new(2)?;
    let check_pts = doubled_points(sub_seed(s.seed, "thm-1.3/eq"), 2, s.samples.min(100), 0.95);
    check_component_equations(map, lambdas, &check_pts)?;
    let pairs = PairSample::admissible_in_ball(sub_seed(s.seed, "thm-1.3/wub"), 2, 2 * s.samples, 0.9);
    let coarse = weak_uniform_bound_constant(map, &ball, &pairs[..s.samples], IMAGE_CELLS)?;
    let fine = weak_uniform_bound_constant(map, &ball, &pairs, IMAGE_CELLS)?;
    let wub = Stability::new("weak_uniform_bound", coarse.constant, fine.constant);

    let sources_half = (s.samples / TARGETS_PER_SOURCE).max(4);
    let mut g = rng(sub_seed(s.seed, "thm-1.3/k"));
    let groups: Vec<(Vec<f64>, Vec<Vec<f64>>)> = (0..2 * sources_half)
        .map(|_| {
            let x = point_in_ball(&mut g, 2, 0.8);
            let ys = (0..TARGETS_PER_SOURCE)
                .map(|_| {
                    let dir = unit_vector(&mut g, 2);
                    let t = g.gen_range(0.05..0.8);
                    let mut y: Vec<f64> = x.iter().zip(&dir).map(|(a, b)| a + t * b).collect();
                    let ny = norm(&y);
                    if ny > 0.8 {
                        y.iter_mut().for_each(|c| *c *= 0.8 / ny);
                    }
                    y
                })
                .collect();
            (x, ys)
        })
        .collect();
    let moving = groups.iter().try_fold(false, |acc, (x, ys)| -> Result<bool> {
        let fx = map.eval(x)?;
        Ok(acc || ys.iter().map(|y| map.eval(y)).collect::<Result<Vec<_>>>()?.iter().any(|fy| *fy != fx))
    })?;
    let klip = if moving {
        let image = rasterize_disk_image(map, IMAGE_CELLS)?;
        let ratios = groups
            .par_iter()
            .map(|(x, ys)| {
                let fx = map.eval(x)?;
                let field = grid_quasihyperbolic_from(&image, &fx)
                    .map_err(|e| LabError::Configuration(format!("image rasterization misses u(x): {e}")))?;
                let mut best: f64 = 0.0;
                for y in ys {
                    let fy = map.eval(y)?;
                    let cell = image
                        .cell_of(&fy)
                        .ok_or_else(|| LabError::Configuration(format!("image rasterization misses u({y:?})")))?;
                    let k_img = field[cell];
                    let k_ball = ball_quasihyperbolic(&ball, x, y)?;
                    best = best.max(ratio(k_img, k_ball));
                }
                Ok(best)
            })
            .collect::<Result<Vec<f64>>>()?;
        Stability::from_ratios("k_lipschitz", &ratios, sources_half)
    } else {
        Stability::new("k_lipschitz", 0.0, 0.0)
    };
    Ok(Verdict::stability(
        "thm-1.3",
        params! {"components" => map.components().iter().map(|c| c.name()).collect::<Vec<_>>(), "lambdas" => lambdas},
        pairs.len() + 2 * sources_half * TARGETS_PER_SOURCE,
        &[wub, klip],
    ))
}

/// Mean-bound constants: `sup |u(x)|^ν r^n / ∫_{B(x,r)} |u|^ν dy` and
/// `sup |∇u(x)| r / ∫ |u(x + rζ) − u(x)| dσ(ζ)` over `r ≤ d(x)`.
pub fn verify_mean_bound(u: &ScalarField, nu: f64, s: &CheckSettings) -> Result<Verdict> {
    if !(nu > 0.0) {
        return Err(LabError::Configuration(format!("ν must be positive, got {nu}")));
    }
    let n = u.dimension();
    let pts = doubled_points(sub_seed(s.seed, "lem-2.3"), n, s.samples, 0.9);
    let mut g = rng(sub_seed(s.seed, "lem-2.3/radii"));
    let fractions: Vec<f64> = pts.iter().map(|_| g.gen_range(0.1..=1.0)).collect();
    let sphere = s.orders.sphere_rule(n)?;
    let rows = pts
        .par_iter()
        .zip(&fractions)
        .map(|(x, &frac)| {
            let r = frac * (1.0 - norm(x));
            let ux = u.eval(x)?;
            let vol = local_integral(u, x, r, &s.local_orders, |v| v.abs().powf(nu))?;
            let c1 = ratio(ux.abs().powf(nu) * r.powi(n as i32), vol);
            let mut osc = 0.0;
            let mut y = vec![0.0; n];
            for (z, w) in sphere.iter() {
                for k in 0..n {
                    y[k] = x[k] + r * z[k];
                }
                osc += w * (u.eval(&y)? - ux).abs();
            }
            let c2 = ratio(norm(&u.gradient(x)?) * r, osc);
            Ok((c1, c2))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    let c1: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let c2: Vec<f64> = rows.iter().map(|r| r.1).collect();
    Ok(Verdict::stability(
        "lem-2.3",
        params! {"field" => u.name(), "n" => n, "nu" => nu},
        pts.len(),
        &[
            Stability::from_ratios("C_volume", &c1, s.samples),
            Stability::from_ratios("C_sphere", &c2, s.samples),
        ],
    ))
}
