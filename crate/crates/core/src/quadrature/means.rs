use crate::error::{LabError, Result};
use crate::fields::ScalarField;

use super::{radial_green, BallRule, QuadratureOrders, SphereRule};

fn scaled(z: &[f64], r: f64) -> Vec<f64> {
    z.iter().map(|c| c * r).collect()
}

/// `∫ |u(rζ)|^ν dσ(ζ)`, i.e. `M_ν(u, r)^ν`. Requires finite `ν > 0`.
pub fn surface_power_mean(field: &ScalarField, r: f64, rule: &SphereRule, nu: f64) -> Result<f64> {
    if !(nu > 0.0 && nu.is_finite()) {
        return Err(LabError::domain(format!("power mean exponent must be finite and positive, got {nu}")));
    }
    let mut acc = 0.0;
    for (z, w) in rule.iter() {
        acc += w * field.eval(&scaled(z, r))?.abs().powf(nu);
    }
    Ok(acc)
}

/// Integral mean `M_ν(u, r)`; `ν = ∞` gives the maximum of `|u|` over the
/// rule's nodes.
pub fn surface_mean(field: &ScalarField, r: f64, rule: &SphereRule, nu: f64) -> Result<f64> {
    if nu == f64::INFINITY {
        let mut best: f64 = 0.0;
        for (z, _) in rule.iter() {
            best = best.max(field.eval(&scaled(z, r))?.abs());
        }
        return Ok(best);
    }
    Ok(surface_power_mean(field, r, rule, nu)?.powf(1.0 / nu))
}

/// `∫ f dV` under the rule's measure, for an arbitrary integrand.
pub fn ball_integral_with(rule: &BallRule, mut f: impl FnMut(&[f64]) -> Result<f64>) -> Result<f64> {
    let mut acc = 0.0;
    for (x, w) in rule.nodes() {
        let v = f(&x)?;
        if !v.is_finite() {
            return Err(LabError::NonFinite { value: v, location: x });
        }
        acc += w * v;
    }
    Ok(acc)
}

pub fn ball_integral(field: &ScalarField, rule: &BallRule) -> Result<f64> {
    ball_integral_with(rule, |x| field.eval(x))
}

/// `|∫ g(rζ)dσ − g(0) − ∫_{B_r} Δg · G_n(·, r) dV_N|`.
pub fn mean_value_identity_residual(g: &ScalarField, r: f64, orders: &QuadratureOrders) -> Result<f64> {
    let n = g.dimension();
    let sphere = orders.sphere_rule(n)?;
    let lhs = surface_power_mean_signed(g, r, &sphere)?;
    let ball = BallRule::new(r, orders.radial_nodes, sphere.clone())?;
    let mut rhs = g.eval(&vec![0.0; n])?;
    for &(s, ws) in ball.radial() {
        let kernel = radial_green(n, s, r)?;
        let mut shell = 0.0;
        for (z, wz) in sphere.iter() {
            shell += wz * g.laplacian(&scaled(z, s))?;
        }
        rhs += ws * kernel * shell;
    }
    Ok((lhs - rhs).abs())
}

fn surface_power_mean_signed(g: &ScalarField, r: f64, rule: &SphereRule) -> Result<f64> {
    let mut acc = 0.0;
    for (z, w) in rule.iter() {
        acc += w * g.eval(&scaled(z, r))?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::catalog;
    use crate::special::sinhc;

    fn orders() -> QuadratureOrders {
        QuadratureOrders::default()
    }

    #[test]
    fn surface_mean_examples() {
        let o = orders();
        let c = ScalarField::constant(3, 3.0);
        assert!((surface_mean(&c, 0.7, &o.sphere_rule(3).unwrap(), 2.0).unwrap() - 3.0).abs() < 1e-14);
        let circle = o.sphere_rule(2).unwrap();
        let x1 = catalog::coordinate(2, 0);
        for r in [0.2, 0.5, 0.9] {
            let m = surface_mean(&x1, r, &circle, 2.0).unwrap();
            assert!((m - r / 2f64.sqrt()).abs() < 1e-14);
        }
        let u = catalog::yukawa_radial(3, 1.0);
        let m = surface_mean(&u, 0.5, &o.sphere_rule(3).unwrap(), 7.0).unwrap();
        assert!((m - sinhc(0.5)).abs() < 1e-13);
        assert!((m - 1.042190).abs() < 1e-6);
    }

    #[test]
    fn power_means_are_monotone_in_nu() {
        let circle = orders().sphere_rule(2).unwrap();
        let u = catalog::by_name("harmonic3", 2).unwrap();
        let means: Vec<f64> = [0.5, 1.0, 2.0, 3.0, 8.0, f64::INFINITY]
            .iter()
            .map(|&nu| surface_mean(&u, 0.8, &circle, nu).unwrap())
            .collect();
        assert!(means.windows(2).all(|w| w[0] <= w[1] + 1e-14));
    }

    #[test]
    fn ball_integral_examples() {
        for n in [2, 3] {
            let rule = orders().ball_rule(n, 1.0).unwrap();
            assert!((ball_integral(&ScalarField::constant(n, 1.0), &rule).unwrap() - 1.0).abs() < 1e-13);
            assert!(ball_integral(&catalog::coordinate(n, 0), &rule).unwrap().abs() < 1e-15);
        }
        for r in [0.25, 0.5, 0.9] {
            let rule = orders().ball_rule(3, r).unwrap();
            let v = ball_integral_with(&rule, |x| {
                let s = x.iter().map(|c| c * c).sum::<f64>().sqrt();
                Ok(6.0 * radial_green(3, s, r)?)
            })
            .unwrap();
            assert!((v - r * r).abs() < 1e-11, "{v} {r}");
        }
    }

    #[test]
    fn nan_integrand_reports_location() {
        let rule = QuadratureOrders::light().ball_rule(2, 1.0).unwrap();
        let f = ScalarField::new(2, "nan", |x| if x[0] > 0.5 { f64::NAN } else { 0.0 });
        match ball_integral(&f, &rule) {
            Err(LabError::NonFinite { location, .. }) => assert!(location[0] > 0.5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn mean_value_identity_examples() {
        let o = orders();
        for n in [2, 3] {
            assert!(mean_value_identity_residual(&catalog::coordinate(n, 0), 0.5, &o).unwrap() < 1e-10);
            assert!(mean_value_identity_residual(&catalog::norm_squared(n), 0.5, &o).unwrap() < 1e-8);
            assert!(mean_value_identity_residual(&catalog::norm_power(n, 2), 0.9, &o).unwrap() < 1e-8);
        }
    }
}
