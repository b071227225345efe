use rand::Rng;
use rayon::prelude::*;

use super::{normalized_excess, Verdict, INEQUALITY_SLACK};
use crate::error::Result;
use crate::fields::{power_inequality_holds, ScalarField};
use crate::majorants::{check_phi_monotone, BlochWeight, Majorant};
use crate::params;
use crate::quadrature::QuadratureOrders;
use crate::sampling::{linspace, rng, sub_seed};

/// Mean-value identity residual, maximized over the catalog and radii.
pub fn verify_mean_value(catalog: &[ScalarField], r_grid: &[f64], orders: &QuadratureOrders) -> Result<Verdict> {
    let jobs: Vec<(usize, f64)> = (0..catalog.len())
        .flat_map(|i| r_grid.iter().map(move |&r| (i, r)))
        .collect();
    let residuals = jobs
        .par_iter()
        .map(|&(i, r)| crate::quadrature::mean_value_identity_residual(&catalog[i], r, orders))
        .collect::<Result<Vec<f64>>>()?;
    let (mut worst, mut arg) = (0.0f64, None);
    for (job, res) in jobs.iter().zip(&residuals) {
        if *res > worst || arg.is_none() {
            worst = *res;
            arg = Some(job);
        }
    }
    let names: Vec<&str> = catalog.iter().map(|g| g.name()).collect();
    let mut v = Verdict::inequality(
        "thm-B",
        params! {"fields" => names, "r_grid" => r_grid},
        jobs.len(),
        worst,
        INEQUALITY_SLACK,
    )
    .with_constant("max_residual", worst);
    if let Some(&(i, r)) = arg {
        v = v.with_note(format!("worst case {} at r = {r}", catalog[i].name()));
    }
    Ok(v)
}

/// Orders for [`verify_mean_value`]: the sphere rules integrate every
/// polynomial of degree ≤ 31 exactly, so only the radial order matters.
pub fn mean_value_orders() -> QuadratureOrders {
    QuadratureOrders {
        circle_nodes: 64,
        sphere_polar: 16,
        sphere_azimuthal: 32,
        radial_nodes: 64,
    }
}

/// `(a+b)^ι ≤ 2^{max(ι−1,0)}(a^ι + b^ι)` over seeded draws from
/// `[0,10]² × (0,4]`.
pub fn verify_power_inequality(draws: usize, seed: u64) -> Result<Verdict> {
    let mut g = rng(sub_seed(seed, "lem-lemx"));
    let (mut worst, mut failures) = (f64::NEG_INFINITY, 0usize);
    for _ in 0..draws {
        let a = g.gen_range(0.0..=10.0);
        let b = g.gen_range(0.0..=10.0);
        let iota = 4.0 - g.gen_range(0.0..4.0);
        let lhs = f64::powf(a + b, iota);
        let rhs = 2f64.powf((iota - 1.0).max(0.0)) * (a.powf(iota) + b.powf(iota));
        worst = worst.max(normalized_excess(lhs, rhs));
        if !power_inequality_holds(a, b, iota) {
            failures += 1;
        }
    }
    let mut v = Verdict::inequality("lem-lemx", params! {"draws" => draws, "seed" => seed}, draws, worst, 1e-12);
    if failures > 0 && v.pass {
        v.pass = false;
        v.status = super::VerdictStatus::Fail;
    }
    Ok(v.with_constant("failures", failures as f64))
}

/// Random increasing concave table through the origin.
fn random_table(g: &mut impl Rng) -> Majorant {
    let mut t = 0.0;
    let mut y = 0.0;
    let mut slope = g.gen_range(0.5..3.0);
    let mut points = Vec::new();
    for _ in 0..g.gen_range(2..6) {
        t += g.gen_range(0.05..0.5);
        y += slope * (t - points.last().map_or(0.0, |p: &(f64, f64)| p.0));
        points.push((t, y));
        slope *= g.gen_range(0.2..1.0);
    }
    Majorant::Table { points }
}

/// Monotonicity of `φ` and `φ/ω(φ)` in the radius over seeded draws of
/// `α ∈ (0,3]`, `β ∈ [−1, α]` and `ω` (powers and concave tables).
pub fn verify_majorant_monotonicity(draws: usize, seed: u64) -> Result<Verdict> {
    let mut g = rng(sub_seed(seed, "lem-5"));
    let grid = linspace(0.0, 0.999, 200);
    let mut cases = Vec::with_capacity(draws);
    for _ in 0..draws {
        let alpha = 3.0 - g.gen_range(0.0..3.0);
        let beta = g.gen_range(-1.0..=alpha);
        let omega = if g.gen_bool(0.5) {
            Majorant::Power {
                gamma: 1.0 - g.gen_range(0.0..1.0),
            }
        } else {
            random_table(&mut g)
        };
        cases.push((BlochWeight::new(alpha, beta)?, omega));
    }
    let outcomes = cases
        .par_iter()
        .map(|(w, om)| check_phi_monotone(w, om, &grid))
        .collect::<Result<Vec<bool>>>()?;
    let failures = outcomes.iter().filter(|ok| !**ok).count();
    let v = Verdict::inequality("lem-5", params! {"draws" => draws, "seed" => seed}, draws, failures as f64, 0.0);
    Ok(v.with_constant("failures", failures as f64))
}
