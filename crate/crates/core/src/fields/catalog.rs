//! Built-in fields addressable by name.
//!
//! | name | field |
//! |------|-------|
//! | `zero`, `one`, `const:c` | constants |
//! | `x1`, `x2`, `x3` | coordinates |
//! | `x1x2`, `harmonic3` | harmonic polynomials `x₁x₂`, `x₁³ − 3x₁x₂²` |
//! | `norm2`, `norm4`, `norm6` | `|x|²`, `|x|⁴`, `|x|⁶` |
//! | `yukawa:λ` | radial solution of `Δu = λu` with `u(0) = 1` |
//! | `exp:a1,a2,…` | `e^{a·x}` |
//! | `sinh:a1,a2,…` | `sinh(a·x)` |
//! | `logpole` | `Re log(1/(1−z))` on the disk |
//! | `sqrtdist` | `√(1−|x|)` |

use crate::error::{LabError, Result};
use crate::special::EvenSeries;

use super::{Matrix, ScalarField};

/// Sum of monomials `c · Π x_k^{e_k}` with analytic derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    dimension: usize,
    terms: Vec<(f64, Vec<u32>)>,
}

impl Polynomial {
    pub fn new(dimension: usize, terms: Vec<(f64, Vec<u32>)>) -> Result<Self> {
        if terms.iter().any(|(_, e)| e.len() != dimension) {
            return Err(LabError::Configuration("monomial exponent length differs from dimension".into()));
        }
        Ok(Self { dimension, terms })
    }

    pub fn monomial(dimension: usize, exponents: Vec<u32>) -> Result<Self> {
        Self::new(dimension, vec![(1.0, exponents)])
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|(_, e)| e.iter().sum()).max().unwrap_or(0)
    }

    fn eval_term(x: &[f64], c: f64, e: &[u32], shift: &[usize]) -> f64 {
        let mut v = c;
        let mut e = e.to_vec();
        for &k in shift {
            if e[k] == 0 {
                return 0.0;
            }
            v *= e[k] as f64;
            e[k] -= 1;
        }
        for (xk, ek) in x.iter().zip(&e) {
            v *= xk.powi(*ek as i32);
        }
        v
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(c, e)| Self::eval_term(x, *c, e, &[])).sum()
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dimension)
            .map(|k| self.terms.iter().map(|(c, e)| Self::eval_term(x, *c, e, &[k])).sum())
            .collect()
    }

    pub fn hessian(&self, x: &[f64]) -> Matrix {
        let n = self.dimension;
        (0..n)
            .map(|j| {
                (0..n)
                    .map(|k| self.terms.iter().map(|(c, e)| Self::eval_term(x, *c, e, &[j, k])).sum())
                    .collect()
            })
            .collect()
    }

    pub fn into_field(self, name: impl Into<String>) -> ScalarField {
        let (p1, p2, p3) = (self.clone(), self.clone(), self);
        ScalarField::new(p1.dimension, name, move |x| p1.value(x))
            .with_gradient(move |x| p2.gradient(x))
            .with_hessian(move |x| p3.hessian(x))
    }
}

fn unit(n: usize, k: usize, power: u32) -> Vec<u32> {
    let mut e = vec![0; n];
    e[k] = power;
    e
}

/// `x_k` (zero-based index).
pub fn coordinate(n: usize, k: usize) -> ScalarField {
    Polynomial::monomial(n, unit(n, k, 1))
        .expect("exponents sized to n")
        .into_field(format!("x{}", k + 1))
}

/// `|x|²`.
pub fn norm_squared(n: usize) -> ScalarField {
    let terms = (0..n).map(|k| (1.0, unit(n, k, 2))).collect();
    Polynomial::new(n, terms).expect("exponents sized to n").into_field("norm2")
}

/// `|x|^{2m}` expanded by the multinomial theorem.
pub fn norm_power(n: usize, m: u32) -> ScalarField {
    fn compositions(n: usize, m: u32) -> Vec<Vec<u32>> {
        if n == 1 {
            return vec![vec![m]];
        }
        (0..=m)
            .flat_map(|first| {
                compositions(n - 1, m - first).into_iter().map(move |mut rest| {
                    rest.insert(0, first);
                    rest
                })
            })
            .collect()
    }
    let fact = |k: u32| (1..=k).map(f64::from).product::<f64>();
    let terms = compositions(n, m)
        .into_iter()
        .map(|c| {
            let coef = fact(m) / c.iter().map(|&k| fact(k)).product::<f64>();
            (coef, c.iter().map(|k| 2 * k).collect())
        })
        .collect();
    Polynomial::new(n, terms).expect("exponents sized to n").into_field(format!("norm{}", 2 * m))
}

/// Radial `u(x) = f(|x|)` from an even power series, with analytic derivatives.
pub fn radial_series(n: usize, series: EvenSeries, name: impl Into<String>) -> ScalarField {
    // Hessian = f'/s · I + (f'' − f'/s)/s² · x xᵀ; the second coefficient is
    // Σ_{m≥2} 4m(m−1) c_m s^{2m−4}, evaluated without cancellation.
    let c = series.coeffs();
    let hess_series = EvenSeries::new(
        (2..c.len()).map(|m| 4.0 * (m * (m - 1)) as f64 * c[m]).collect(),
    );
    let (s1, s2, s3) = (series.clone(), series.clone(), series);
    let sq = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
    ScalarField::new(n, name, move |x| s1.value(sq(x).sqrt()))
        .with_gradient(move |x| {
            let a = s2.d1_over_s(sq(x).sqrt());
            x.iter().map(|v| a * v).collect()
        })
        .with_hessian(move |x| {
            let s = sq(x).sqrt();
            let a = s3.d1_over_s(s);
            let b = hess_series.value(s);
            (0..x.len())
                .map(|j| {
                    (0..x.len())
                        .map(|k| b * x[j] * x[k] + if j == k { a } else { 0.0 })
                        .collect()
                })
                .collect()
        })
}

/// Regular radial solution of `Δu = λu` normalized by `u(0) = 1`:
/// `sinh(√λ|x|)/(√λ|x|)` for `n = 3`, `I₀(√λ|x|)` for `n = 2`.
pub fn yukawa_radial(n: usize, lambda: f64) -> ScalarField {
    radial_series(n, EvenSeries::yukawa_radial(n, lambda, 3.0), format!("yukawa:{lambda}"))
}

/// `e^{a·x}`, which satisfies `Δu = |a|²u`.
pub fn planar_exponential(a: Vec<f64>) -> ScalarField {
    let n = a.len();
    let name = format!("exp:{}", a.iter().map(f64::to_string).collect::<Vec<_>>().join(","));
    let dot = move |a: &[f64], x: &[f64]| a.iter().zip(x).map(|(p, q)| p * q).sum::<f64>();
    let (a1, a2, a3) = (a.clone(), a.clone(), a);
    ScalarField::new(n, name, move |x| dot(&a1, x).exp())
        .with_gradient(move |x| {
            let e = dot(&a2, x).exp();
            a2.iter().map(|v| v * e).collect()
        })
        .with_hessian(move |x| {
            let e = dot(&a3, x).exp();
            a3.iter().map(|p| a3.iter().map(|q| p * q * e).collect()).collect()
        })
}

/// `sinh(a·x)`, which satisfies `Δu = |a|²u`.
pub fn plane_sinh(a: Vec<f64>) -> ScalarField {
    let n = a.len();
    let name = format!("sinh:{}", a.iter().map(f64::to_string).collect::<Vec<_>>().join(","));
    let dot = move |a: &[f64], x: &[f64]| a.iter().zip(x).map(|(p, q)| p * q).sum::<f64>();
    let (a1, a2, a3) = (a.clone(), a.clone(), a);
    ScalarField::new(n, name, move |x| dot(&a1, x).sinh())
        .with_gradient(move |x| {
            let c = dot(&a2, x).cosh();
            a2.iter().map(|v| v * c).collect()
        })
        .with_hessian(move |x| {
            let s = dot(&a3, x).sinh();
            a3.iter().map(|p| a3.iter().map(|q| p * q * s).collect()).collect()
        })
}

/// `Re log(1/(1−z)) = −½ log((1−x)² + y²)` on the unit disk.
pub fn log_pole() -> ScalarField {
    let q = |x: &[f64]| (1.0 - x[0]).powi(2) + x[1] * x[1];
    ScalarField::new(2, "logpole", move |x| -0.5 * q(x).ln())
        .with_gradient(move |x| {
            let d = q(x);
            vec![(1.0 - x[0]) / d, -x[1] / d]
        })
        .with_hessian(move |x| {
            let d = q(x);
            let (a, b) = (1.0 - x[0], x[1]);
            let diag = (a * a - b * b) / (d * d);
            let off = -2.0 * a * b / (d * d);
            vec![vec![diag, off], vec![off, -diag]]
        })
        .with_domain_radius(1.0)
}

/// `√(1 − |x|)`, Hölder-½ up to the sphere.
pub fn sqrt_distance(n: usize) -> ScalarField {
    ScalarField::new(n, "sqrtdist", |x| (1.0 - x.iter().map(|v| v * v).sum::<f64>().sqrt()).sqrt())
        .with_domain_radius(1.0)
}

fn parse_number(name: &str, text: &str) -> Result<f64> {
    text.trim()
        .parse()
        .map_err(|_| LabError::Configuration(format!("bad number {text:?} in field name {name:?}")))
}

/// Looks a field up by catalog name in dimension `n`.
pub fn by_name(name: &str, n: usize) -> Result<ScalarField> {
    if n < 2 {
        return Err(LabError::Configuration(format!("dimension {n} < 2")));
    }
    let bad = || LabError::Configuration(format!("unknown field {name:?} for n = {n}"));
    let field = match name {
        "zero" => ScalarField::constant(n, 0.0),
        "one" => ScalarField::constant(n, 1.0),
        "x1" => coordinate(n, 0),
        "x2" => coordinate(n, 1),
        "x3" if n >= 3 => coordinate(n, 2),
        "x1x2" => {
            let mut e = vec![0; n];
            e[0] = 1;
            e[1] = 1;
            Polynomial::monomial(n, e)?.into_field("x1x2")
        }
        "harmonic3" => Polynomial::new(n, vec![(1.0, unit(n, 0, 3)), (-3.0, {
            let mut e = unit(n, 0, 1);
            e[1] = 2;
            e
        })])?
        .into_field("harmonic3"),
        "norm2" => norm_squared(n),
        "norm4" => norm_power(n, 2),
        "norm6" => norm_power(n, 3),
        "logpole" if n == 2 => log_pole(),
        "sqrtdist" => sqrt_distance(n),
        _ => {
            if let Some(c) = name.strip_prefix("const:") {
                ScalarField::constant(n, parse_number(name, c)?)
            } else if let Some(l) = name.strip_prefix("yukawa:") {
                let lambda = parse_number(name, l)?;
                if lambda < 0.0 {
                    return Err(LabError::Configuration(format!("negative λ in {name:?}")));
                }
                yukawa_radial(n, lambda)
            } else if let Some(a) = name.strip_prefix("exp:") {
                let a = a.split(',').map(|t| parse_number(name, t)).collect::<Result<Vec<_>>>()?;
                if a.len() != n {
                    return Err(bad());
                }
                planar_exponential(a)
            } else if let Some(a) = name.strip_prefix("sinh:") {
                let a = a.split(',').map(|t| parse_number(name, t)).collect::<Result<Vec<_>>>()?;
                if a.len() != n {
                    return Err(bad());
                }
                plane_sinh(a)
            } else {
                return Err(bad());
            }
        }
    };
    Ok(field)
}

/// Polynomials of degree at most 6 used by the mean-value identity check:
/// every monomial of even total degree plus a few mixed-parity sums.
pub fn polynomial_catalog(n: usize) -> Vec<ScalarField> {
    fn exponents(n: usize, max: u32) -> Vec<Vec<u32>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for first in 0..=max {
            for mut rest in exponents(n - 1, max - first) {
                rest.insert(0, first);
                out.push(rest);
            }
        }
        out
    }
    let mut fields: Vec<ScalarField> = exponents(n, 6)
        .into_iter()
        .filter(|e| e.iter().sum::<u32>() % 2 == 0)
        .map(|e| {
            let name = format!("mono{e:?}");
            Polynomial::monomial(n, e).expect("sized").into_field(name)
        })
        .collect();
    let mut mixed = vec![(1.0, unit(n, 0, 1)), (0.5, unit(n, 1, 2)), (-0.25, unit(n, 0, 5))];
    let mut e = unit(n, 0, 3);
    e[1] = 3;
    mixed.push((2.0, e));
    fields.push(Polynomial::new(n, mixed).expect("sized").into_field("mixed6"));
    fields
}
