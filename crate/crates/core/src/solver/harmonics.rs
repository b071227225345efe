//! Real harmonics orthonormal for the normalized surface measure on the
//! circle (`n = 2`) and on `S²` (`n = 3`).

use crate::error::{LabError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicBasis {
    dimension: usize,
    max_degree: usize,
    /// Degree `l` of every mode, in evaluation order.
    degrees: Vec<usize>,
}

impl HarmonicBasis {
    pub fn new(dimension: usize, max_degree: usize) -> Result<Self> {
        let degrees = match dimension {
            2 => std::iter::once(0)
                .chain((1..=max_degree).flat_map(|l| [l, l]))
                .collect(),
            3 => (0..=max_degree).flat_map(|l| std::iter::repeat_n(l, 2 * l + 1)).collect(),
            _ => {
                return Err(LabError::Unsupported(format!(
                    "harmonic basis only for n ∈ {{2, 3}}, got {dimension}"
                )))
            }
        };
        Ok(Self {
            dimension,
            max_degree,
            degrees,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    /// All modes at the unit vector `zeta`.
    pub fn eval(&self, zeta: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        let lmax = self.max_degree;
        match self.dimension {
            2 => {
                let s2 = std::f64::consts::SQRT_2;
                let (c1, s1) = (zeta[0], zeta[1]);
                out.push(1.0);
                let (mut c, mut s) = (1.0, 0.0);
                for _ in 1..=lmax {
                    (c, s) = (c * c1 - s * s1, s * c1 + c * s1);
                    out.push(s2 * c);
                    out.push(s2 * s);
                }
            }
            _ => {
                let t = zeta[2].clamp(-1.0, 1.0);
                let rho = (zeta[0] * zeta[0] + zeta[1] * zeta[1]).sqrt();
                let (c1, s1) = if rho > 0.0 { (zeta[0] / rho, zeta[1] / rho) } else { (1.0, 0.0) };
                let p = normalized_legendre(lmax, t, rho);
                let mut trig = Vec::with_capacity(lmax + 1);
                let (mut c, mut s) = (1.0, 0.0);
                trig.push((c, s));
                for _ in 1..=lmax {
                    (c, s) = (c * c1 - s * s1, s * c1 + c * s1);
                    trig.push((c, s));
                }
                let s2 = std::f64::consts::SQRT_2;
                for l in 0..=lmax {
                    out.push(p[l][0]);
                    for m in 1..=l {
                        out.push(s2 * p[l][m] * trig[m].0);
                        out.push(s2 * p[l][m] * trig[m].1);
                    }
                }
            }
        }
        out
    }

    /// Zonal kernel `Σ_{m} Y_lm(ζ)Y_lm(η)` as a function of `t = ζ·η`:
    /// `2 T_l(t)` (`l ≥ 1`) on the circle, `(2l+1) P_l(t)` on `S²`.
    pub fn zonal(&self, l: usize, t: f64) -> f64 {
        match self.dimension {
            2 => {
                if l == 0 {
                    1.0
                } else {
                    2.0 * (l as f64 * t.clamp(-1.0, 1.0).acos()).cos()
                }
            }
            _ => {
                let (mut p0, mut p1) = (1.0, t);
                if l == 0 {
                    return 1.0;
                }
                for k in 1..l {
                    let kf = k as f64;
                    (p0, p1) = (p1, ((2.0 * kf + 1.0) * t * p1 - kf * p0) / (kf + 1.0));
                }
                (2 * l + 1) as f64 * p1
            }
        }
    }
}

/// `P̄_l^m(t)` with `∫_{-1}^{1} P̄² dt/2 = 1`, for `0 ≤ m ≤ l ≤ lmax`;
/// `rho = sin θ = √(1 − t²)`.
fn normalized_legendre(lmax: usize, t: f64, rho: f64) -> Vec<Vec<f64>> {
    let mut p: Vec<Vec<f64>> = (0..=lmax).map(|l| vec![0.0; l + 1]).collect();
    p[0][0] = 1.0;
    for m in 1..=lmax {
        let mf = m as f64;
        p[m][m] = ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * rho * p[m - 1][m - 1];
    }
    for m in 0..lmax {
        p[m + 1][m] = (2.0 * m as f64 + 3.0).sqrt() * t * p[m][m];
    }
    for m in 0..=lmax {
        let mf = m as f64;
        for l in m + 2..=lmax {
            let lf = l as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
            p[l][m] = a * (t * p[l - 1][m] - b * p[l - 2][m]);
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::SphereRule;
    use crate::sampling::{rng, unit_vector};

    fn gram_check(basis: &HarmonicBasis, rule: &SphereRule) {
        let m = basis.len();
        let mut gram = vec![vec![0.0; m]; m];
        for (z, w) in rule.iter() {
            let y = basis.eval(z);
            for i in 0..m {
                for j in 0..m {
                    gram[i][j] += w * y[i] * y[j];
                }
            }
        }
        for i in 0..m {
            for j in 0..m {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((gram[i][j] - e).abs() < 1e-12, "({i},{j}) {}", gram[i][j]);
            }
        }
    }

    #[test]
    fn orthonormal_on_exact_rules() {
        gram_check(&HarmonicBasis::new(2, 10).unwrap(), &SphereRule::circle(32).unwrap());
        gram_check(&HarmonicBasis::new(3, 8).unwrap(), &SphereRule::sphere(10, 20).unwrap());
    }

    #[test]
    fn addition_theorem() {
        let mut r = rng(3);
        for n in [2, 3] {
            let basis = HarmonicBasis::new(n, 9).unwrap();
            for _ in 0..10 {
                let a = unit_vector(&mut r, n);
                let b = unit_vector(&mut r, n);
                let (ya, yb) = (basis.eval(&a), basis.eval(&b));
                let t: f64 = a.iter().zip(&b).map(|(p, q)| p * q).sum();
                for l in 0..=9 {
                    let sum: f64 = (0..basis.len())
                        .filter(|&k| basis.degrees()[k] == l)
                        .map(|k| ya[k] * yb[k])
                        .sum();
                    assert!((sum - basis.zonal(l, t)).abs() < 1e-11, "n={n} l={l}");
                }
            }
        }
    }

    #[test]
    fn poles_are_finite() {
        let basis = HarmonicBasis::new(3, 6).unwrap();
        let y = basis.eval(&[0.0, 0.0, 1.0]);
        assert!(y.iter().all(|v| v.is_finite()));
        assert!((y[basis.len() - 13] - 13f64.sqrt()).abs() < 1e-12);
    }
}
