//! Weighted Laplacian integrals and the harmonic majorant of `|∇u|^ν`.

use rayon::prelude::*;

use super::{CheckSettings, Verdict};
use crate::error::{LabError, Result};
use crate::fields::ScalarField;
use crate::functionals::{dirichlet_energy, hardy_norm, ENERGY_SHELLS};
use crate::geometry::{dist, norm};
use crate::params;
use crate::quadrature::{surface_power_mean, BallRule, QuadratureOrders, SphereRule};
use crate::sampling::{linspace, points_in_ball, sub_seed};

/// Relative successive difference accepted by the shell Cauchy criterion.
pub const SHELL_CAUCHY_TOL: f64 = 1e-3;
/// Multiplicative slack of the pointwise majorant check.
pub const MAJORANT_SLACK: f64 = 1e-6;
/// Relative agreement of `G_r(0)` with the power mean on a finer rule.
pub const MAJORANT_CENTER_TOL: f64 = 1e-8;

const LAPLACIAN_STEP: f64 = 1e-3;

fn check_mu_nu(n: usize, mu: f64, nu: f64, alpha: f64) -> Result<()> {
    if !(1.0..=n as f64 / 2.0).contains(&mu) {
        return Err(LabError::hypothesis(format!("μ = {mu} outside [1, n/2]"), vec![]));
    }
    if !(nu >= 2.0) || !(alpha > 0.0) {
        return Err(LabError::hypothesis(format!("need ν ≥ 2 and α > 0, got ν = {nu}, α = {alpha}"), vec![]));
    }
    Ok(())
}

fn require_finite_energy(u: &ScalarField, alpha: f64, mu: f64, orders: &QuadratureOrders) -> Result<f64> {
    let d = dirichlet_energy(u, alpha, 0.0, mu, orders)?;
    if !d.finite {
        return Err(LabError::hypothesis(
            format!("D(α={alpha}, 0, μ={mu}) is not finite on the shell sequence {:?}", d.shells),
            vec![],
        ));
    }
    Ok(d.value)
}

/// `∫_{B_{1−ε}} d^{βν} Δ(|∇u|^ν) dx` for each `ε` of `shells`, with
/// `β = (n+α)/(2μ) − 1`, judged by the relative difference of the last two
/// shells.
pub fn verify_dirichlet_finiteness(
    u: &ScalarField,
    alpha: f64,
    mu: f64,
    nu: f64,
    shells: &[f64],
    s: &CheckSettings,
) -> Result<Verdict> {
    let n = u.dimension();
    check_mu_nu(n, mu, nu, alpha)?;
    if shells.len() < 2 || shells.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
        return Err(LabError::Configuration("shell grid needs at least two ε in (0, 1)".into()));
    }
    let energy = require_finite_energy(u, alpha, mu, &s.orders)?;
    let beta = (n as f64 + alpha) / (2.0 * mu) - 1.0;
    let target = u.derived("|grad u|^nu", move |u, x| Ok(norm(&u.gradient(x)?).powf(nu)));
    let sphere = s.orders.sphere_rule(n)?;
    let integrate = |eps: f64| -> Result<f64> {
        let rule = BallRule::new(1.0 - eps, s.orders.radial_nodes, sphere.clone())?.lebesgue();
        let parts = rule
            .radial()
            .par_iter()
            .map(|&(r, wr)| {
                let mut acc = 0.0;
                for (z, wz) in sphere.iter() {
                    let x: Vec<f64> = z.iter().map(|c| c * r).collect();
                    let lap = target.fd_laplacian_with_step(&x, LAPLACIAN_STEP)?;
                    acc += wz * (1.0 - r).powf(beta * nu) * lap;
                }
                Ok(wr * acc)
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(parts.iter().sum::<f64>() * rule.measure_scale())
    };
    let mut sorted = shells.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let values: Vec<(f64, f64)> = sorted.iter().map(|&e| Ok((e, integrate(e)?))).collect::<Result<_>>()?;
    let rel = |a: f64, b: f64| if a == b { 0.0 } else { (b - a).abs() / b.abs().max(f64::MIN_POSITIVE) };
    let k = values.len();
    let last = rel(values[k - 2].1, values[k - 1].1);
    let mut v = Verdict::inequality(
        "thm-1.6",
        params! {"field" => u.name(), "n" => n, "alpha" => alpha, "mu" => mu, "nu" => nu, "beta" => beta},
        values.len(),
        last - SHELL_CAUCHY_TOL,
        0.0,
    )
    .with_constant("energy_D", energy)
    .with_constant("last_relative_difference", last)
    .with_constant("integral", values[k - 1].1);
    let zero = values.iter().all(|(_, x)| *x == 0.0);
    v = v.degenerate_if(zero);
    v.shells = values;
    Ok(v)
}

/// Default shells for [`verify_dirichlet_finiteness`].
pub fn default_shells() -> Vec<f64> {
    ENERGY_SHELLS.to_vec()
}

/// `∫ (1 − |x|²)/|x − ζ|^n g(ζ) dσ(ζ)` with `g` tabulated on the rule nodes.
fn poisson_at(rule: &SphereRule, g: &[f64], x: &[f64]) -> f64 {
    let n = x.len() as i32;
    let num = 1.0 - x.iter().map(|c| c * c).sum::<f64>();
    rule.iter().zip(g).map(|((z, w), gv)| w * num / dist(x, z).powi(n) * gv).sum()
}

/// Harmonic majorant `G_r` of `x ↦ |∇u(rx)|^ν` built from the Poisson
/// integral over the sphere of radius `r`, under the constraint
/// `(n+α)/(2μ) − 1 = 1/ν`.
pub fn verify_harmonic_majorant(
    u: &ScalarField,
    nu: f64,
    alpha: f64,
    mu: f64,
    r_seq: &[f64],
    s: &CheckSettings,
) -> Result<Verdict> {
    let n = u.dimension();
    check_mu_nu(n, mu, nu, alpha)?;
    let gap = (n as f64 + alpha) / (2.0 * mu) - 1.0 - 1.0 / nu;
    if gap.abs() > 1e-12 {
        return Err(LabError::hypothesis(format!("(n+α)/(2μ) − 1 − 1/ν = {gap:e} ≠ 0"), vec![]));
    }
    if r_seq.iter().any(|r| !(*r > 0.0 && *r < 1.0)) {
        return Err(LabError::Configuration("majorant radii must lie in (0, 1)".into()));
    }
    let energy = require_finite_energy(u, alpha, mu, &s.orders)?;
    let grad = u.gradient_norm();
    let rule = s.orders.sphere_rule(n)?;
    let hardy = hardy_norm(&grad, nu, &linspace(0.0, 0.99, 34), &rule)?;
    if hardy.infinite {
        return Err(LabError::hypothesis("|∇u| has no finite Hardy norm on the radius grid", vec![]));
    }
    let fine_orders = QuadratureOrders {
        circle_nodes: 2 * s.orders.circle_nodes,
        sphere_polar: 2 * s.orders.sphere_polar,
        sphere_azimuthal: 2 * s.orders.sphere_azimuthal,
        radial_nodes: s.orders.radial_nodes,
    };
    let fine = fine_orders.sphere_rule(n)?;
    let r_max = if n == 2 { 0.9 } else { 0.8 };
    let pts = points_in_ball(sub_seed(s.seed, "thm-1.7"), n, r_max, s.samples);
    let mut worst = f64::NEG_INFINITY;
    let mut center_gap: f64 = 0.0;
    for &r in r_seq {
        let g = rule
            .iter()
            .map(|(z, _)| {
                let y: Vec<f64> = z.iter().map(|c| c * r).collect();
                Ok(norm(&u.gradient(&y)?).powf(nu))
            })
            .collect::<Result<Vec<f64>>>()?;
        let excess = pts
            .par_iter()
            .map(|x| {
                let y: Vec<f64> = x.iter().map(|c| c * r).collect();
                let lhs = norm(&u.gradient(&y)?).powf(nu);
                let big_g = poisson_at(&rule, &g, x);
                Ok((lhs - big_g * (1.0 + MAJORANT_SLACK)) / big_g.abs().max(1.0))
            })
            .collect::<Result<Vec<f64>>>()?;
        worst = excess.into_iter().fold(worst, f64::max);
        let g0 = poisson_at(&rule, &g, &vec![0.0; n]);
        let m = surface_power_mean(&grad, r, &fine, nu)?;
        let rel = (g0 - m).abs() / m.abs().max(f64::MIN_POSITIVE);
        center_gap = center_gap.max(if g0 == m { 0.0 } else { rel });
        worst = worst.max(rel - MAJORANT_CENTER_TOL);
    }
    Ok(Verdict::inequality(
        "thm-1.7",
        params! {"field" => u.name(), "n" => n, "nu" => nu, "alpha" => alpha, "mu" => mu, "r_seq" => r_seq},
        pts.len() * r_seq.len(),
        worst,
        0.0,
    )
    .with_constant("hardy_norm_grad", hardy.value)
    .with_constant("energy_D", energy)
    .with_constant("center_relative_gap", center_gap))
}
