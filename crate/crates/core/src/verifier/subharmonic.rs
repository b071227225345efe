//! Finite-difference subharmonicity sweeps.

use serde::{Deserialize, Serialize};

use super::{CheckSettings, Verdict};
use crate::error::{LabError, Result};
use crate::fields::{frobenius_sq, ScalarField};
use crate::geometry::{dot, norm};
use crate::params;
use crate::sampling::{points_in_ball, sub_seed};

/// FD step of the Laplacian sweep.
pub const FD_STEP: f64 = 1e-3;
/// Normalized tolerance: `Δ_h T ≥ −tol · max(1, |T|)`.
pub const SUBHARMONIC_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubharmonicTarget {
    /// `|u|^ν`, assuming `uΔu ≥ 0`.
    AbsPower,
    /// `(Σ u_{x_j x_k}²)^ν`, assuming `Δu = λu` with constant `λ ≥ 0`.
    HessianPower,
    /// `|∇u|^ν`, assuming `Σ u_{x_k}(Δu)_{x_k} ≥ 0`.
    GradientPower,
}

impl SubharmonicTarget {
    pub fn theorem_id(&self) -> &'static str {
        match self {
            SubharmonicTarget::AbsPower => "lem-2.1",
            SubharmonicTarget::HessianPower => "lem-cw4",
            SubharmonicTarget::GradientPower => "lem-cw5",
        }
    }

    /// The quantity raised to the power `ν`; its zero set is excluded.
    fn base(&self, u: &ScalarField) -> ScalarField {
        match self {
            SubharmonicTarget::AbsPower => u.derived("|u|", |u, x| Ok(u.eval(x)?.abs())),
            SubharmonicTarget::HessianPower => u.derived("sum H^2", |u, x| Ok(frobenius_sq(&u.hessian(x)?))),
            SubharmonicTarget::GradientPower => u.gradient_norm(),
        }
    }
}

fn check_hypothesis(target: SubharmonicTarget, u: &ScalarField, pts: &[Vec<f64>]) -> Result<Option<f64>> {
    let mut bad = Vec::new();
    let mut lambda_range: Option<(f64, f64)> = None;
    let mut scale: f64 = 0.0;
    for x in pts {
        match target {
            SubharmonicTarget::AbsPower => {
                let v = u.eval(x)?;
                if v * u.laplacian(x)? < -1e-9 * v.abs().max(1.0).powi(2) {
                    bad.push(x.clone());
                }
            }
            SubharmonicTarget::HessianPower => {
                let v = u.eval(x)?;
                scale = scale.max(v.abs());
                if v.abs() > 1e-3 * scale.max(1e-300) {
                    let l = u.laplacian(x)? / v;
                    lambda_range = Some(match lambda_range {
                        None => (l, l),
                        Some((lo, hi)) => (lo.min(l), hi.max(l)),
                    });
                }
            }
            SubharmonicTarget::GradientPower => {
                let g = u.gradient(x)?;
                let lg = u.laplacian_gradient(x)?;
                if dot(&g, &lg) < -1e-6 * norm(&g).max(1.0).powi(2) {
                    bad.push(x.clone());
                }
            }
        }
    }
    if !bad.is_empty() {
        let reason = match target {
            SubharmonicTarget::AbsPower => "u·Δu < 0",
            _ => "Σ u_k (Δu)_k < 0",
        };
        return Err(LabError::hypothesis(reason, bad));
    }
    if target == SubharmonicTarget::HessianPower {
        let (lo, hi) = lambda_range.unwrap_or((0.0, 0.0));
        if hi - lo > 1e-6 * hi.abs().max(1.0) || lo < -1e-9 {
            return Err(LabError::hypothesis(
                format!("Δu/u ranges over [{lo}, {hi}], not a constant λ ≥ 0"),
                vec![],
            ));
        }
        return Ok(Some(0.5 * (lo + hi)));
    }
    Ok(None)
}

/// Mean of `t` over the sphere of radius `rho` around `x`.
fn sphere_mean(t: &ScalarField, x: &[f64], rho: f64, s: &CheckSettings) -> Result<f64> {
    let rule = s.local_orders.sphere_rule(x.len())?;
    let mut acc = 0.0;
    let mut y = vec![0.0; x.len()];
    for (z, w) in rule.iter() {
        for k in 0..x.len() {
            y[k] = x[k] + rho * z[k];
        }
        acc += w * t.eval(&y)?;
    }
    Ok(acc)
}

/// FD Laplacian of the target at `s.samples` points of `|x| ≤ 0.9`. Points
/// within `10·h` of the base quantity's zero set (distance estimated as
/// `|B|/|∇B|`) are checked by the sub-mean-value inequality on the sphere of
/// that radius instead.
pub fn verify_subharmonicity(target: SubharmonicTarget, u: &ScalarField, nu: f64, s: &CheckSettings) -> Result<Verdict> {
    if !(nu >= 1.0) {
        return Err(LabError::Configuration(format!("subharmonicity sweep needs ν ≥ 1, got {nu}")));
    }
    let n = u.dimension();
    let pts = points_in_ball(sub_seed(s.seed, target.theorem_id()), n, 0.9, s.samples);
    let lambda = check_hypothesis(target, u, &pts)?;
    let base = target.base(u);
    let t = base.derived("target", move |b, x| Ok(b.eval(x)?.powf(nu)));
    let exclusion = 10.0 * FD_STEP;
    let results = {
        use rayon::prelude::*;
        pts.par_iter()
            .map(|x| -> Result<(f64, bool)> {
                let b = base.eval(x)?;
                let gb = norm(&base.gradient(x)?);
                let dist = if b == 0.0 { 0.0 } else { b.abs() / gb };
                let tx = t.eval(x)?;
                let scale = tx.abs().max(1.0);
                if dist < exclusion {
                    let mean = sphere_mean(&t, x, exclusion, s)?;
                    Ok(((tx - mean) / scale, true))
                } else {
                    Ok((-t.fd_laplacian_with_step(x, FD_STEP)? / scale, false))
                }
            })
            .collect::<Result<Vec<_>>>()?
    };
    let worst = results.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max);
    let excluded = results.iter().filter(|r| r.1).count();
    let mut v = Verdict::inequality(
        target.theorem_id(),
        params! {"field" => u.name(), "n" => n, "nu" => nu, "target" => target, "fd_step" => FD_STEP},
        pts.len(),
        worst,
        SUBHARMONIC_TOL,
    )
    .with_constant("excluded_samples", excluded as f64)
    .with_constant("exclusion_radius", exclusion);
    if let Some(l) = lambda {
        v = v.with_constant("lambda", l);
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::catalog;

    fn settings() -> CheckSettings {
        CheckSettings {
            samples: 300,
            ..CheckSettings::default()
        }
    }

    #[test]
    fn linear_gradient_power_is_flat() {
        let v = verify_subharmonicity(SubharmonicTarget::GradientPower, &catalog::coordinate(2, 0), 2.0, &settings()).unwrap();
        assert!(v.pass, "{v:?}");
        assert!(v.max_violation.0.abs() < 1e-9);
    }

    #[test]
    fn yukawa_cube_and_hessian_power() {
        let u = catalog::yukawa_radial(3, 1.0);
        let v = verify_subharmonicity(SubharmonicTarget::AbsPower, &u, 3.0, &settings()).unwrap();
        assert!(v.pass, "{v:?}");
        let h = catalog::by_name("x1x2", 2).unwrap();
        let v = verify_subharmonicity(SubharmonicTarget::HessianPower, &h, 2.0, &settings()).unwrap();
        assert!(v.pass, "{v:?}");
        assert_eq!(v.constants["lambda"].0, 0.0);
    }

    #[test]
    fn zero_sets_are_excluded() {
        // |x1| vanishes on a hyperplane that the sample crosses
        let v = verify_subharmonicity(SubharmonicTarget::AbsPower, &catalog::coordinate(3, 0), 1.0, &settings()).unwrap();
        assert!(v.pass, "{v:?}");
        assert!(v.constants["excluded_samples"].0 > 0.0);
    }

    #[test]
    fn superharmonic_field_is_rejected() {
        let u = ScalarField::new(2, "1 - |x|^2", |x| 1.0 - x[0] * x[0] - x[1] * x[1]);
        let err = verify_subharmonicity(SubharmonicTarget::AbsPower, &u, 2.0, &settings());
        assert!(matches!(err, Err(LabError::Hypothesis { .. })));
    }
}
