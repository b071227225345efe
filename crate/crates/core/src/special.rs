//! Power-series special functions used by the radial Yukawa solutions.

/// Even power series `f(s) = Σ c_m s^{2m}`, evaluated with its radial
/// derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct EvenSeries {
    coeffs: Vec<f64>,
}

impl EvenSeries {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    /// Radial profile of the regular solution of `Δu = λu` in `R^n` with
    /// `u(0) = 1`. Coefficients satisfy `c_m = c_{m-1} λ / (2m (2m + n - 2))`,
    /// which gives `sinh(√λ s)/(√λ s)` for `n = 3` and `I₀(√λ s)` for `n = 2`.
    /// Terms are kept until they drop below `1e-18` relative for `s ≤ s_max`.
    pub fn yukawa_radial(n: usize, lambda: f64, s_max: f64) -> Self {
        let mut coeffs = vec![1.0];
        if lambda == 0.0 {
            return Self { coeffs };
        }
        let s2 = s_max * s_max;
        let mut c = 1.0;
        for m in 1..400 {
            let mf = m as f64;
            c *= lambda / (2.0 * mf * (2.0 * mf + n as f64 - 2.0));
            coeffs.push(c);
            if (c * s2.powi(m)).abs() < 1e-18 && m > 2 {
                break;
            }
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn value(&self, s: f64) -> f64 {
        let s2 = s * s;
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * s2 + c)
    }

    /// `f'(s)/s`, finite at `s = 0`.
    pub fn d1_over_s(&self, s: f64) -> f64 {
        let s2 = s * s;
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (m, c)| acc * s2 + 2.0 * m as f64 * c)
    }

    pub fn d1(&self, s: f64) -> f64 {
        s * self.d1_over_s(s)
    }

    pub fn d2(&self, s: f64) -> f64 {
        let s2 = s * s;
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (m, c)| {
                let mf = m as f64;
                acc * s2 + 2.0 * mf * (2.0 * mf - 1.0) * c
            })
    }
}

/// Modified Bessel function of the first kind, order zero, by its power
/// series `Σ (x/2)^{2m} / (m!)²`.
pub fn bessel_i0(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for m in 1..500 {
        term *= q / (m as f64 * m as f64);
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}

/// `sinh(x)/x` with the removable singularity at zero.
pub fn sinhc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 + x * x / 6.0 + x.powi(4) / 120.0
    } else {
        x.sinh() / x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn i0_reference_values() {
        assert_relative_eq!(bessel_i0(0.0), 1.0);
        assert_relative_eq!(bessel_i0(0.5), 1.063_483_370_741_323_4, max_relative = 1e-15);
        assert_relative_eq!(bessel_i0(1.0), 1.266_065_877_752_008_4, max_relative = 1e-15);
    }

    #[test]
    fn yukawa_series_matches_closed_forms() {
        let s3 = EvenSeries::yukawa_radial(3, 1.0, 1.0);
        let s2 = EvenSeries::yukawa_radial(2, 1.0, 1.0);
        for &s in &[0.0, 0.1, 0.5, 0.9, 1.0] {
            assert_relative_eq!(s3.value(s), sinhc(s), max_relative = 1e-14);
            assert_relative_eq!(s2.value(s), bessel_i0(s), max_relative = 1e-14);
        }
        assert_relative_eq!(s3.value(0.5), 1.042_190_610_987_494_8, max_relative = 1e-14);
    }

    #[test]
    fn series_derivatives_match_differences() {
        let s = EvenSeries::yukawa_radial(3, 2.0, 1.0);
        let h = 1e-5;
        for &x in &[0.2, 0.6, 0.95] {
            let d1 = (s.value(x + h) - s.value(x - h)) / (2.0 * h);
            let d2 = (s.value(x + h) - 2.0 * s.value(x) + s.value(x - h)) / (h * h);
            assert_relative_eq!(s.d1(x), d1, max_relative = 1e-8);
            assert_relative_eq!(s.d2(x), d2, max_relative = 1e-5);
        }
        assert_eq!(s.d1_over_s(0.0), s.coeffs()[1] * 2.0);
    }
}
