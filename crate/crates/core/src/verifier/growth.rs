//! Growth bounds for integral means in terms of Bloch-type norms.

use serde::{Deserialize, Serialize};

use super::{normalized_excess, CheckSettings, CurvePoint, Verdict, INEQUALITY_SLACK};
use crate::error::{LabError, Result};
use crate::fields::{HeinzData, ScalarField};
use crate::functionals::{bloch_norm, BlochSampling};
use crate::geometry::norm;
use crate::majorants::{phi, BlochWeight, Majorant};
use crate::params;
use crate::quadrature::{gauss_legendre_squared, surface_mean, SphereRule};
use crate::sampling::{points_in_ball, sub_seed};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthParams {
    pub nu: f64,
    pub omega: Majorant,
    pub weight: BlochWeight,
    pub r_grid: Vec<f64>,
    #[serde(default)]
    pub bloch: BlochSampling,
}

impl GrowthParams {
    /// 20 radii evenly spaced in `(0, 0.95]`.
    pub fn default_grid() -> Vec<f64> {
        (1..=20).map(|k| 0.95 * k as f64 / 20.0).collect()
    }

    fn check(&self) -> Result<()> {
        if !(self.nu >= 2.0) {
            return Err(LabError::hypothesis(format!("ν = {} < 2", self.nu), vec![]));
        }
        if !self.weight.beta_le_alpha() {
            return Err(LabError::hypothesis(
                format!("β = {} exceeds α = {}", self.weight.beta, self.weight.alpha),
                vec![],
            ));
        }
        if self.r_grid.iter().any(|r| !(0.0..1.0).contains(r)) {
            return Err(LabError::Configuration("growth radii must lie in [0, 1)".into()));
        }
        Ok(())
    }
}

const RADIAL_ORDER: usize = 64;

/// `∫₀¹ K_n(t) / φ(1 − rt)^p dt` with `K_n(t) = t(1 − t^{n−2})` for `n ≥ 3` and
/// `t log(1/t)` for `n = 2`.
fn kernel_integral(n: usize, weight: &BlochWeight, r: f64, p: f64) -> Result<f64> {
    let mut acc = 0.0;
    for (t, w) in gauss_legendre_squared(RADIAL_ORDER) {
        let k = if n == 2 { -t * t.ln() } else { t * (1.0 - t.powi(n as i32 - 2)) };
        acc += w * k / phi(weight, 1.0 - r * t)?.powf(p);
    }
    Ok(acc)
}

/// `n − 2`, replaced by 1 in the plane where the kernel changes instead.
fn dimension_factor(n: usize) -> f64 {
    if n == 2 {
        1.0
    } else {
        (n - 2) as f64
    }
}

fn samples_for(u: &ScalarField, s: &CheckSettings, salt: &str) -> Vec<Vec<f64>> {
    let n = u.dimension();
    let mut pts = vec![vec![0.0; n]];
    pts.extend(points_in_ball(sub_seed(s.seed, salt), n, 0.95, s.samples.max(1)));
    pts
}

/// Sphere rule for Bloch-type norms. Without analytic derivatives every node
/// costs a nested difference stencil, so the local orders are used.
fn norm_rule(u: &ScalarField, s: &CheckSettings) -> Result<SphereRule> {
    let orders = if u.has_analytic_gradient() { s.orders } else { s.local_orders };
    orders.sphere_rule(u.dimension())
}

/// Checks `u Δu ≥ 0` on the samples.
fn check_u_lap_u(u: &ScalarField, pts: &[Vec<f64>]) -> Result<()> {
    let mut bad = Vec::new();
    for x in pts {
        let v = u.eval(x)?;
        let l = u.laplacian(x)?;
        if v * l < -1e-9 * v.abs().max(1.0).powi(2) {
            bad.push(x.clone());
        }
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(LabError::hypothesis("u·Δu < 0", bad))
    }
}

/// Bound for `M_ν(u, r)` through the Bloch-type norm of `|∇u|² + uΔu`.
pub fn verify_growth(u: &ScalarField, p: &GrowthParams, s: &CheckSettings) -> Result<Verdict> {
    p.check()?;
    let n = u.dimension();
    let pts = samples_for(u, s, "growth");
    check_u_lap_u(u, &pts)?;
    // F = |∇u|² + uΔu = Δ(u²)/2
    let f = if u.has_analytic_gradient() {
        let f = u.derived("|grad u|^2 + u lap u", |u, x| {
            let g = norm(&u.gradient(x)?);
            Ok(g * g + u.eval(x)? * u.laplacian(x)?)
        });
        if u.has_analytic_hessian() {
            f
        } else {
            f.with_step(1e-3)
        }
    } else {
        let square = u.derived("u^2", |u, x| Ok(u.value(x).powi(2)));
        square.derived("lap(u^2)/2", |sq, x| Ok(0.5 * sq.laplacian_fd(x)?)).with_step(1e-3)
    };
    let rule = s.orders.sphere_rule(n)?;
    let fnorm = bloch_norm(&f, p.nu, &p.omega, &p.weight, &p.bloch, &norm_rule(u, s)?)?;
    if fnorm.infinite {
        return Err(LabError::hypothesis("Bloch-type norm of |∇u|² + uΔu is not finite", vec![fnorm.argmax]));
    }
    let u0 = u.eval(&vec![0.0; n])?;
    let coef = p.nu * (p.nu - 1.0) / (p.omega.eval(1.0) * dimension_factor(n));
    let mut curve = Vec::with_capacity(p.r_grid.len());
    let mut worst = f64::NEG_INFINITY;
    for &r in &p.r_grid {
        let lhs = surface_mean(u, r, &rule, p.nu)?;
        let rhs = (u0 * u0 + coef * fnorm.value * r * r * kernel_integral(n, &p.weight, r, 1.0)?).sqrt();
        worst = worst.max(normalized_excess(lhs, rhs));
        curve.push(CurvePoint { r, lhs, rhs });
    }
    let mut v = Verdict::inequality(
        "thm-1.4",
        params! {
            "field" => u.name(), "n" => n, "nu" => p.nu, "omega" => p.omega.label(),
            "alpha" => p.weight.alpha, "beta" => p.weight.beta,
        },
        p.r_grid.len(),
        worst,
        INEQUALITY_SLACK,
    )
    .with_constant("bloch_norm_F", fnorm.value);
    v.curve = curve;
    Ok(v)
}

/// Sup of the Heinz coefficients over the samples.
fn heinz_sups(data: &HeinzData, pts: &[Vec<f64>]) -> Result<[f64; 3]> {
    let mut sup = [0.0f64; 3];
    for x in pts {
        let a = data.coefficients(x)?;
        for k in 0..3 {
            sup[k] = sup[k].max(a[k]);
        }
    }
    Ok(sup)
}

/// Implicit growth inequality for the Heinz class; with `with_corollary` the
/// explicit bound for `Δu = λu` is checked as well (which needs `a₁ = a₃ = 0`
/// and `b₂ = 1`, with `λ = a₂`).
pub fn verify_heinz_growth(
    u: &ScalarField,
    data: &HeinzData,
    p: &GrowthParams,
    with_corollary: bool,
    s: &CheckSettings,
) -> Result<Verdict> {
    p.check()?;
    let n = u.dimension();
    let nf = n as f64;
    let pts = samples_for(u, s, "heinz");
    let [sa1, sa2, sa3] = heinz_sups(data, &pts)?;
    if !(sa2 < 2.0 * nf / p.nu) {
        return Err(LabError::hypothesis(format!("sup a₂ = {sa2} is not below 2n/ν = {}", 2.0 * nf / p.nu), vec![]));
    }
    if with_corollary && (sa1 != 0.0 || sa3 != 0.0 || data.b2 != 1.0) {
        return Err(LabError::Configuration("the explicit bound needs a₁ = a₃ = 0 and b₂ = 1".into()));
    }
    check_u_lap_u(u, &pts)?;
    let bad: Vec<Vec<f64>> = pts
        .iter()
        .filter_map(|x| match crate::fields::heinz_residual(u, data, x) {
            Ok(r) if r >= -1e-7 * u.laplacian(x).map_or(1.0, |l| l.abs().max(1.0)) => None,
            Ok(_) => Some(Ok(x.clone())),
            Err(e) => Some(Err(e)),
        })
        .collect::<Result<_>>()?;
    if !bad.is_empty() {
        return Err(LabError::hypothesis("u is not in the Heinz class on the sample", bad));
    }
    let rule = s.orders.sphere_rule(n)?;
    let unorm = bloch_norm(u, p.nu, &p.omega, &p.weight, &p.bloch, &norm_rule(u, s)?)?;
    if unorm.infinite {
        return Err(LabError::hypothesis("Bloch-type norm of u is not finite", vec![unorm.argmax]));
    }
    let (nu, un, w1) = (p.nu, unorm.value, p.omega.eval(1.0));
    let u0 = u.eval(&vec![0.0; n])?;
    let df = dimension_factor(n);
    let mut curve = Vec::with_capacity(p.r_grid.len());
    let mut worst = f64::NEG_INFINITY;
    for &r in &p.r_grid {
        let m = surface_mean(u, r, &rule, nu)?;
        let r2 = r * r;
        let t1 = nu * (nu - 1.0) / (df * w1 * w1) * un * un * r2 * kernel_integral(n, &p.weight, r, 2.0)?;
        let t2 = if sa1 == 0.0 {
            0.0
        } else {
            nu * sa1 / (df * w1.powf(data.b1)) * un.powf(data.b1) * r2 * m * kernel_integral(n, &p.weight, r, data.b1)?
        };
        let t3 = nu * sa2 / (2.0 * nf) * r2 * m.powf(1.0 + data.b2);
        let t4 = nu * sa3 / (2.0 * nf) * r2 * m;
        let bracket = u0 * u0 + t1 + t2 + t3 + t4;
        worst = worst.max(normalized_excess(m * m, bracket));
        let rhs = if with_corollary {
            let c_star = (1.0 - r2 * nu * sa2 / (2.0 * nf)).sqrt();
            let explicit = (u0 * u0 + t1).sqrt() / c_star;
            worst = worst.max(normalized_excess(m, explicit));
            explicit
        } else {
            bracket.sqrt()
        };
        curve.push(CurvePoint { r, lhs: m, rhs });
    }
    let id = if with_corollary { "cor-1.5" } else { "thm-1.5" };
    let mut v = Verdict::inequality(
        id,
        params! {
            "field" => u.name(), "n" => n, "nu" => nu, "omega" => p.omega.label(),
            "alpha" => p.weight.alpha, "beta" => p.weight.beta, "b1" => data.b1, "b2" => data.b2,
        },
        p.r_grid.len(),
        worst,
        INEQUALITY_SLACK,
    )
    .with_constant("bloch_norm_u", un)
    .with_constant("sup_a1", sa1)
    .with_constant("sup_a2", sa2)
    .with_constant("sup_a3", sa3);
    v.curve = curve;
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::catalog;
    use crate::special::sinhc;

    fn params(nu: f64, omega: Majorant, alpha: f64, beta: f64) -> GrowthParams {
        GrowthParams {
            nu,
            omega,
            weight: BlochWeight::new(alpha, beta).unwrap(),
            r_grid: GrowthParams::default_grid(),
            bloch: BlochSampling::default(),
        }
    }

    fn settings() -> CheckSettings {
        CheckSettings {
            samples: 100,
            ..CheckSettings::default()
        }
    }

    #[test]
    fn kernel_integral_closed_forms() {
        // φ ≡ 1 at r = 0: ∫ t(1−t) = 1/6, ∫ t log(1/t) = 1/4
        let w = BlochWeight::new(1.0, 0.0).unwrap();
        assert!((kernel_integral(3, &w, 0.0, 1.0).unwrap() - 1.0 / 6.0).abs() < 1e-14);
        assert!((kernel_integral(2, &w, 0.0, 1.0).unwrap() - 0.25).abs() < 1e-12);
        // α = 1, β = 0, p = 1, n = 3: ∫ t(1−t)/(1−rt) dt
        let r: f64 = 0.5;
        let quad = kernel_integral(3, &w, r, 1.0).unwrap();
        let mut oracle = 0.0;
        let m = 200_000;
        for k in 0..m {
            let t = (k as f64 + 0.5) / m as f64;
            oracle += t * (1.0 - t) / (1.0 - r * t) / m as f64;
        }
        assert!((quad - oracle).abs() < 1e-9, "{quad} vs {oracle}");
    }

    #[test]
    fn constant_passes() {
        let u = ScalarField::constant(3, 2.0);
        let v = verify_growth(&u, &params(2.0, Majorant::identity(), 1.0, 0.0), &settings()).unwrap();
        assert!(v.pass, "{v:?}");
        for c in &v.curve {
            assert!((c.lhs - 2.0).abs() < 1e-12 && c.rhs >= 2.0);
        }
    }

    #[test]
    fn sinhc_example_lhs() {
        let u = catalog::yukawa_radial(3, 1.0);
        let mut p = params(2.0, Majorant::identity(), 1.0, 0.0);
        p.r_grid = vec![0.5];
        let v = verify_growth(&u, &p, &settings()).unwrap();
        assert!(v.pass, "{v:?}");
        assert!((v.curve[0].lhs - sinhc(0.5)).abs() < 1e-12);
        assert!((v.curve[0].lhs - 1.042190).abs() < 1e-6);
    }

    #[test]
    fn harmonic_and_yukawa_families() {
        for n in [2, 3] {
            for nu in [2.0, 3.0, 4.0] {
                let u = catalog::coordinate(n, 0);
                let v = verify_growth(&u, &params(nu, Majorant::sqrt(), 2.0, 1.0), &settings()).unwrap();
                assert!(v.pass, "{v:?}");
            }
        }
    }

    #[test]
    fn heinz_harmonic_and_corollary() {
        let u = catalog::coordinate(3, 0);
        let zero = HeinzData::constants(3, 0.0, 0.0, 0.0, 1.0, 0.0).unwrap();
        let v = verify_heinz_growth(&u, &zero, &params(2.0, Majorant::identity(), 1.0, 0.0), false, &settings()).unwrap();
        assert!(v.pass, "{v:?}");
        let y = catalog::yukawa_radial(3, 0.3);
        let data = HeinzData::constants(3, 0.0, 0.0, 0.3, 1.0, 0.0).unwrap();
        let v = verify_heinz_growth(&y, &data, &params(2.0, Majorant::identity(), 1.0, 0.0), true, &settings()).unwrap();
        assert!(v.pass, "{v:?}");
        assert_eq!(v.theorem, "cor-1.5");
    }

    #[test]
    fn heinz_gate_rejects_large_a2() {
        let y = catalog::yukawa_radial(3, 0.3);
        // 2n/ν = 3 for n = 3, ν = 2
        let data = HeinzData::constants(3, 0.0, 0.0, 3.0, 1.0, 0.0).unwrap();
        let err = verify_heinz_growth(&y, &data, &params(2.0, Majorant::identity(), 1.0, 0.0), false, &settings());
        assert!(matches!(err, Err(LabError::Hypothesis { .. })));
    }

    #[test]
    fn negative_u_lap_u_is_rejected() {
        let u = ScalarField::new(2, "1 - |x|^2", |x| 1.0 - x[0] * x[0] - x[1] * x[1]);
        let err = verify_growth(&u, &params(2.0, Majorant::identity(), 1.0, 0.0), &settings());
        assert!(matches!(err, Err(LabError::Hypothesis { .. })));
    }
}
