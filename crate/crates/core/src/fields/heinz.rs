use crate::error::{LabError, Result};
use crate::geometry::norm;

use super::ScalarField;

/// Coefficients of the differential inequality
/// `|Δu| ≤ a₁|∇u|^{b₁} + a₂|u|^{b₂} + a₃`.
#[derive(Debug, Clone)]
pub struct HeinzData {
    pub a1: ScalarField,
    pub b1: f64,
    pub a2: ScalarField,
    pub b2: f64,
    pub a3: ScalarField,
}

impl HeinzData {
    pub fn new(a1: ScalarField, b1: f64, a2: ScalarField, b2: f64, a3: ScalarField) -> Result<Self> {
        for b in [b1, b2] {
            if !(0.0..=1.0).contains(&b) {
                return Err(LabError::Configuration(format!("Heinz exponent {b} outside [0, 1]")));
            }
        }
        Ok(Self { a1, b1, a2, b2, a3 })
    }

    /// Constant coefficients.
    pub fn constants(n: usize, a1: f64, b1: f64, a2: f64, b2: f64, a3: f64) -> Result<Self> {
        Self::new(
            ScalarField::constant(n, a1),
            b1,
            ScalarField::constant(n, a2),
            b2,
            ScalarField::constant(n, a3),
        )
    }

    /// Coefficients at `x`, rejecting negative values.
    pub fn coefficients(&self, x: &[f64]) -> Result<[f64; 3]> {
        let a = [self.a1.eval(x)?, self.a2.eval(x)?, self.a3.eval(x)?];
        if a.iter().any(|v| *v < 0.0) {
            return Err(LabError::hypothesis("negative Heinz coefficient", vec![x.to_vec()]));
        }
        Ok(a)
    }
}

/// `a₁|∇u|^{b₁} + a₂|u|^{b₂} + a₃ − |Δu|`; nonnegative exactly where the
/// inequality holds.
pub fn heinz_residual(u: &ScalarField, data: &HeinzData, x: &[f64]) -> Result<f64> {
    let [a1, a2, a3] = data.coefficients(x)?;
    let g = norm(&u.gradient(x)?);
    let v = u.eval(x)?.abs();
    let lap = u.laplacian(x)?.abs();
    Ok(a1 * g.powf(data.b1) + a2 * v.powf(data.b2) + a3 - lap)
}

/// `(a + b)^ι ≤ 2^{max(ι−1, 0)}(a^ι + b^ι)` with a relative slack of `1e-12`.
pub fn power_inequality_holds(a: f64, b: f64, iota: f64) -> bool {
    let lhs = (a + b).powf(iota);
    let rhs = 2f64.powf((iota - 1.0).max(0.0)) * (a.powf(iota) + b.powf(iota));
    lhs <= rhs * (1.0 + 1e-12) + 1e-300
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::catalog;
    use crate::sampling::{points_in_ball, rng};
    use rand::Rng;

    #[test]
    fn residual_examples() {
        let u = catalog::yukawa_radial(3, 0.5);
        let data = HeinzData::constants(3, 0.0, 0.0, 0.5, 1.0, 0.0).unwrap();
        for x in points_in_ball(1, 3, 0.9, 20) {
            assert!(heinz_residual(&u, &data, &x).unwrap().abs() < 1e-12);
        }
        let h = catalog::coordinate(2, 0);
        let data = HeinzData::constants(2, 0.0, 0.0, 0.0, 0.0, 0.1).unwrap();
        assert!((heinz_residual(&h, &data, &[0.2, 0.3]).unwrap() - 0.1).abs() < 1e-15);
        let q = catalog::norm_squared(2);
        let data = HeinzData::constants(2, 0.0, 0.0, 0.0, 0.0, 4.0).unwrap();
        assert_eq!(heinz_residual(&q, &data, &[0.2, 0.3]).unwrap(), 0.0);
    }

    #[test]
    fn exponent_range_enforced() {
        assert!(HeinzData::constants(2, 1.0, 1.5, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn power_inequality_sampled() {
        let mut r = rng(11);
        for _ in 0..10_000 {
            let a = r.gen_range(0.0..10.0);
            let b = r.gen_range(0.0..10.0);
            let iota = r.gen_range(1e-9..4.0);
            assert!(power_inequality_holds(a, b, iota), "{a} {b} {iota}");
        }
    }
}
