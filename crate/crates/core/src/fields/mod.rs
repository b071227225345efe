//! Scalar and vector fields with analytic or finite-difference derivatives.

pub mod catalog;
mod elliptic;
mod heinz;
mod linalg;

use std::fmt;
use std::sync::Arc;

use crate::error::{LabError, Result};
use crate::geometry::norm;

pub use elliptic::{elliptic_operator_direct, elliptic_operator_factorized, factorize_elliptic};
pub use heinz::{heinz_residual, power_inequality_holds, HeinzData};
pub use linalg::{frobenius_sq, operator_norm, Matrix};

type EvalFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type GradFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
type HessFn = Arc<dyn Fn(&[f64]) -> Matrix + Send + Sync>;

/// Default relative finite-difference step.
pub const DEFAULT_STEP: f64 = 1e-4;
/// Below this absolute step a derivative request fails.
pub const MIN_STEP: f64 = 1e-9;

/// Real-valued field on (a subset of) `R^n`.
///
/// Derivatives come from the analytic closures when present. Otherwise they
/// are central differences with step `h = step · max(1, |x|)`. When the field
/// declares a domain radius and a stencil would leave it, the step is shrunk
/// to fit inside the margin and the difference is Richardson-extrapolated.
#[derive(Clone)]
pub struct ScalarField {
    dimension: usize,
    name: String,
    f: EvalFn,
    grad: Option<GradFn>,
    hess: Option<HessFn>,
    domain_radius: Option<f64>,
    step: f64,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("name", &self.name)
            .field("dimension", &self.dimension)
            .field("analytic_gradient", &self.grad.is_some())
            .field("analytic_hessian", &self.hess.is_some())
            .field("domain_radius", &self.domain_radius)
            .finish()
    }
}

impl ScalarField {
    pub fn new(dimension: usize, name: impl Into<String>, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            dimension,
            name: name.into(),
            f: Arc::new(f),
            grad: None,
            hess: None,
            domain_radius: None,
            step: DEFAULT_STEP,
        }
    }

    pub fn constant(dimension: usize, c: f64) -> Self {
        let n = dimension;
        Self::new(n, format!("const({c})"), move |_| c)
            .with_gradient(move |_| vec![0.0; n])
            .with_hessian(move |_| vec![vec![0.0; n]; n])
    }

    pub fn with_gradient(mut self, g: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        self.grad = Some(Arc::new(g));
        self
    }

    pub fn with_hessian(mut self, h: impl Fn(&[f64]) -> Matrix + Send + Sync + 'static) -> Self {
        self.hess = Some(Arc::new(h));
        self
    }

    /// Restricts derivative stencils to the open ball of this radius.
    pub fn with_domain_radius(mut self, r: f64) -> Self {
        self.domain_radius = Some(r);
        self
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = step;
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Drops analytic derivatives, forcing finite differences.
    pub fn without_derivatives(mut self) -> Self {
        self.grad = None;
        self.hess = None;
        self
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain_radius(&self) -> Option<f64> {
        self.domain_radius
    }

    pub fn has_analytic_gradient(&self) -> bool {
        self.grad.is_some()
    }

    pub fn has_analytic_hessian(&self) -> bool {
        self.hess.is_some()
    }

    /// Raw evaluation without dimension or finiteness checks.
    #[inline]
    pub fn value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        let v = (self.f)(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(LabError::NonFinite {
                value: v,
                location: x.to_vec(),
            })
        }
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dimension {
            return Err(LabError::domain(format!(
                "field {} has dimension {}, point has {}",
                self.name,
                self.dimension,
                x.len()
            )));
        }
        if let Some(r) = self.domain_radius {
            if norm(x) >= r {
                return Err(LabError::domain(format!("point {x:?} outside the domain of {}", self.name)));
            }
        }
        Ok(())
    }

    /// Step and Richardson flag for stencils centred at `x`.
    fn stencil_step(&self, x: &[f64], base: f64) -> Result<(f64, bool)> {
        let h = base * norm(x).max(1.0);
        match self.domain_radius {
            Some(r) => {
                let margin = r - norm(x);
                if margin <= 0.0 {
                    return Err(LabError::domain(format!("point {x:?} outside the domain of {}", self.name)));
                }
                // mixed second differences reach √2·h from x
                let reach = std::f64::consts::SQRT_2;
                if reach * h < margin {
                    Ok((h, false))
                } else {
                    let shrunk = 0.5 * margin / reach;
                    if shrunk < MIN_STEP {
                        Err(LabError::StepTooSmall(x.to_vec()))
                    } else {
                        Ok((shrunk, true))
                    }
                }
            }
            None => Ok((h, false)),
        }
    }

    fn finite(&self, v: Vec<f64>, x: &[f64]) -> Result<Vec<f64>> {
        match v.iter().find(|c| !c.is_finite()) {
            Some(&bad) => Err(LabError::NonFinite {
                value: bad,
                location: x.to_vec(),
            }),
            None => Ok(v),
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x)?;
        let g = match &self.grad {
            Some(g) => g(x),
            None => self.gradient_fd_unchecked(x)?,
        };
        self.finite(g, x)
    }

    /// Central-difference gradient regardless of analytic availability.
    pub fn gradient_fd(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x)?;
        let g = self.gradient_fd_unchecked(x)?;
        self.finite(g, x)
    }

    fn gradient_fd_unchecked(&self, x: &[f64]) -> Result<Vec<f64>> {
        let (h, richardson) = self.stencil_step(x, self.step)?;
        let central = |h: f64| -> Vec<f64> {
            let mut p = x.to_vec();
            (0..x.len())
                .map(|k| {
                    p[k] = x[k] + h;
                    let fp = self.value(&p);
                    p[k] = x[k] - h;
                    let fm = self.value(&p);
                    p[k] = x[k];
                    (fp - fm) / (2.0 * h)
                })
                .collect()
        };
        Ok(if richardson {
            let (a, b) = (central(h), central(0.5 * h));
            a.iter().zip(&b).map(|(a, b)| (4.0 * b - a) / 3.0).collect()
        } else {
            central(h)
        })
    }

    pub fn hessian(&self, x: &[f64]) -> Result<Matrix> {
        self.check_point(x)?;
        let h = match &self.hess {
            Some(h) => h(x),
            None => self.hessian_fd_unchecked(x)?,
        };
        for row in &h {
            self.finite(row.clone(), x)?;
        }
        Ok(h)
    }

    pub fn hessian_fd(&self, x: &[f64]) -> Result<Matrix> {
        self.check_point(x)?;
        self.hessian_fd_unchecked(x)
    }

    fn hessian_fd_unchecked(&self, x: &[f64]) -> Result<Matrix> {
        let n = x.len();
        if let Some(g) = &self.grad {
            // difference the analytic gradient, then symmetrize
            let (h, richardson) = self.stencil_step(x, self.step)?;
            let jac = |h: f64| -> Matrix {
                let mut p = x.to_vec();
                let mut cols = vec![vec![0.0; n]; n];
                for k in 0..n {
                    p[k] = x[k] + h;
                    let gp = g(&p);
                    p[k] = x[k] - h;
                    let gm = g(&p);
                    p[k] = x[k];
                    for m in 0..n {
                        cols[m][k] = (gp[m] - gm[m]) / (2.0 * h);
                    }
                }
                cols
            };
            let mut m = if richardson {
                let (a, b) = (jac(h), jac(0.5 * h));
                combine(&a, &b)
            } else {
                jac(h)
            };
            symmetrize(&mut m);
            return Ok(m);
        }
        // second differences of the values need a larger step
        let (h, richardson) = self.stencil_step(x, 10.0 * self.step)?;
        let second = |h: f64| -> Matrix {
            let mut p = x.to_vec();
            let f0 = self.value(x);
            let mut m = vec![vec![0.0; n]; n];
            for j in 0..n {
                p[j] = x[j] + h;
                let fp = self.value(&p);
                p[j] = x[j] - h;
                let fm = self.value(&p);
                p[j] = x[j];
                m[j][j] = (fp - 2.0 * f0 + fm) / (h * h);
                for k in j + 1..n {
                    let mut eval = |sj: f64, sk: f64| {
                        p[j] = x[j] + sj * h;
                        p[k] = x[k] + sk * h;
                        let v = self.value(&p);
                        p[j] = x[j];
                        p[k] = x[k];
                        v
                    };
                    let v = (eval(1.0, 1.0) - eval(1.0, -1.0) - eval(-1.0, 1.0) + eval(-1.0, -1.0))
                        / (4.0 * h * h);
                    m[j][k] = v;
                    m[k][j] = v;
                }
            }
            m
        };
        Ok(if richardson {
            let (a, b) = (second(h), second(0.5 * h));
            combine(&a, &b)
        } else {
            second(h)
        })
    }

    pub fn laplacian(&self, x: &[f64]) -> Result<f64> {
        let h = self.hessian(x)?;
        Ok((0..h.len()).map(|k| h[k][k]).sum())
    }

    /// `Σ_{j,k} u_{x_j x_k}²`.
    pub fn hessian_frobenius_sq(&self, x: &[f64]) -> Result<f64> {
        Ok(frobenius_sq(&self.hessian(x)?))
    }

    /// `∇(Δu)` by central differences of the Laplacian. Accuracy follows the
    /// Hessian route (differenced twice when no analytic Hessian exists), so
    /// callers should use the looser third-derivative tolerance tier.
    pub fn laplacian_gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x)?;
        let (h, _) = self.stencil_step(x, 1e-3)?;
        let mut p = x.to_vec();
        let mut out = Vec::with_capacity(x.len());
        for k in 0..x.len() {
            p[k] = x[k] + h;
            let lp = self.laplacian(&p)?;
            p[k] = x[k] - h;
            let lm = self.laplacian(&p)?;
            p[k] = x[k];
            out.push((lp - lm) / (2.0 * h));
        }
        Ok(out)
    }

    /// Second-difference Laplacian of the values with the same step policy as
    /// the finite-difference Hessian; cheaper than the full Hessian.
    pub fn laplacian_fd(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        let (h, richardson) = self.stencil_step(x, 10.0 * self.step)?;
        let f0 = self.value(x);
        let star = |h: f64| {
            let mut p = x.to_vec();
            let mut acc = 0.0;
            for k in 0..x.len() {
                p[k] = x[k] + h;
                acc += self.value(&p);
                p[k] = x[k] - h;
                acc += self.value(&p);
                p[k] = x[k];
            }
            (acc - 2.0 * x.len() as f64 * f0) / (h * h)
        };
        let v = if richardson { (4.0 * star(0.5 * h) - star(h)) / 3.0 } else { star(h) };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(LabError::NonFinite {
                value: v,
                location: x.to_vec(),
            })
        }
    }

    /// Five-point (or seven-point) Laplacian of the values with absolute step
    /// `h`, used to test subharmonicity of derived quantities.
    pub fn fd_laplacian_with_step(&self, x: &[f64], h: f64) -> Result<f64> {
        self.check_point(x)?;
        if let Some(r) = self.domain_radius {
            if norm(x) + h >= r {
                return Err(LabError::domain(format!("stencil at {x:?} leaves the domain of {}", self.name)));
            }
        }
        let f0 = self.eval(x)?;
        let mut p = x.to_vec();
        let mut acc = 0.0;
        for k in 0..x.len() {
            p[k] = x[k] + h;
            acc += self.eval(&p)?;
            p[k] = x[k] - h;
            acc += self.eval(&p)?;
            p[k] = x[k];
        }
        Ok((acc - 2.0 * x.len() as f64 * f0) / (h * h))
    }

    /// `c · u`, keeping analytic derivatives.
    pub fn scaled(&self, c: f64) -> ScalarField {
        let base = self.clone();
        let mut out = ScalarField::new(self.dimension, format!("{c}*{}", self.name), {
            let f = base.f.clone();
            move |x| c * f(x)
        });
        out.domain_radius = self.domain_radius;
        out.step = self.step;
        if let Some(g) = base.grad.clone() {
            out.grad = Some(Arc::new(move |x| g(x).into_iter().map(|v| c * v).collect()));
        }
        if let Some(h) = base.hess {
            out.hess = Some(Arc::new(move |x| {
                h(x).into_iter()
                    .map(|row| row.into_iter().map(|v| c * v).collect())
                    .collect()
            }));
        }
        out
    }

    /// Derived field `x ↦ op(self, x)`; errors become NaN and surface through
    /// [`ScalarField::eval`]. Derivatives of the result are finite differences.
    pub fn derived(
        &self,
        name: impl Into<String>,
        op: impl Fn(&ScalarField, &[f64]) -> Result<f64> + Send + Sync + 'static,
    ) -> ScalarField {
        let base = self.clone();
        let mut out = ScalarField::new(self.dimension, name, move |x| op(&base, x).unwrap_or(f64::NAN));
        out.domain_radius = self.domain_radius;
        out
    }

    /// `|∇u|`.
    pub fn gradient_norm(&self) -> ScalarField {
        self.derived(format!("|grad {}|", self.name), |u, x| Ok(norm(&u.gradient(x)?)))
    }

    /// `|u|^ν`.
    pub fn abs_pow(&self, nu: f64) -> ScalarField {
        self.derived(format!("|{}|^{nu}", self.name), move |u, x| Ok(u.eval(x)?.abs().powf(nu)))
    }
}

fn combine(a: &Matrix, b: &Matrix) -> Matrix {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| (4.0 * y - x) / 3.0).collect())
        .collect()
}

fn symmetrize(m: &mut Matrix) {
    let n = m.len();
    for j in 0..n {
        for k in j + 1..n {
            let v = 0.5 * (m[j][k] + m[k][j]);
            m[j][k] = v;
            m[k][j] = v;
        }
    }
}

/// Vector-valued field `u = (u_1, …, u_n)` on `R^n`.
#[derive(Debug, Clone)]
pub struct VectorField {
    components: Vec<ScalarField>,
}

impl VectorField {
    pub fn new(components: Vec<ScalarField>) -> Result<Self> {
        let n = components.len();
        if n == 0 || components.iter().any(|c| c.dimension() != n) {
            return Err(LabError::Configuration(format!(
                "vector field needs {n} components of dimension {n}"
            )));
        }
        Ok(Self { components })
    }

    pub fn dimension(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.components
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.components.iter().map(|c| c.eval(x)).collect()
    }

    /// Rows are the component gradients.
    pub fn jacobian(&self, x: &[f64]) -> Result<Matrix> {
        self.components.iter().map(|c| c.gradient(x)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::sinhc;

    #[test]
    fn gradient_examples() {
        let x1 = catalog::coordinate(3, 0);
        assert_eq!(x1.gradient(&[0.3, 0.2, 0.1]).unwrap(), vec![1.0, 0.0, 0.0]);
        let q = catalog::norm_squared(3);
        assert_eq!(q.gradient(&[0.3, 0.2, 0.1]).unwrap(), vec![0.6, 0.4, 0.2]);
        let fd = q.gradient_fd(&[0.3, 0.2, 0.1]).unwrap();
        assert!((fd[0] - 0.6).abs() < 1e-10);
    }

    #[test]
    fn fd_laplacian_near_the_edge() {
        let u = ScalarField::new(3, "|x|^2", |x| if norm(x) < 1.0 { x.iter().map(|c| c * c).sum() } else { f64::NAN }).with_domain_radius(1.0);
        for x in [[0.1, 0.2, 0.3], [0.0, 0.0, 0.9995]] {
            assert!((u.laplacian_fd(&x).unwrap() - 6.0).abs() < 1e-6);
        }
    }

    #[test]
    fn stencils_stay_inside_the_domain() {
        let u = ScalarField::new(2, "x1x2 inside", |x| if norm(x) < 1.0 { x[0] * x[1] } else { f64::NAN })
            .with_domain_radius(1.0);
        for x in [[0.999, 0.0], [0.7, 0.7]] {
            let h = u.hessian(&x).unwrap();
            assert!((h[0][1] - 1.0).abs() < 1e-6, "{h:?}");
        }
    }

    #[test]
    fn yukawa_fd_gradient_matches_series() {
        let u = catalog::yukawa_radial(3, 1.0);
        let x = [0.3, 0.0, 0.0];
        let fd = u.gradient_fd(&x).unwrap();
        // d/ds sinh(s)/s = cosh(s)/s - sinh(s)/s²
        let s: f64 = 0.3;
        let exact = s.cosh() / s - s.sinh() / (s * s);
        assert!((fd[0] - exact).abs() < 1e-6);
        assert!((u.value(&x) - sinhc(0.3)).abs() < 1e-15);
    }

    #[test]
    fn hessian_and_laplacian_examples() {
        let q = catalog::norm_squared(2);
        assert_eq!(q.hessian_frobenius_sq(&[0.1, 0.2]).unwrap(), 8.0);
        assert_eq!(catalog::norm_squared(3).laplacian(&[0.1, 0.2, 0.3]).unwrap(), 6.0);
        assert_eq!(catalog::coordinate(2, 0).hessian_frobenius_sq(&[0.1, 0.2]).unwrap(), 0.0);
        assert_eq!(catalog::by_name("x1x2", 2).unwrap().hessian_frobenius_sq(&[0.1, 0.2]).unwrap(), 2.0);
        assert_eq!(catalog::coordinate(2, 0).laplacian(&[0.3, 0.1]).unwrap(), 0.0);
        // FD-only Laplacian of the n=2 Bessel solution equals λu
        let u = catalog::yukawa_radial(2, 1.0).without_derivatives();
        let x = [0.4, 0.0];
        assert!((u.laplacian(&x).unwrap() - u.value(&x)).abs() < 1e-6);
    }

    #[test]
    fn near_boundary_uses_richardson() {
        let u = catalog::yukawa_radial(3, 1.0).without_derivatives().with_domain_radius(1.0);
        let x = [0.99995, 0.0, 0.0];
        let g = u.gradient(&x).unwrap();
        let s: f64 = 0.99995;
        let exact = s.cosh() / s - s.sinh() / (s * s);
        assert!((g[0] - exact).abs() < 1e-7);
        assert!(matches!(u.gradient(&[1.0 - 1e-10, 0.0, 0.0]), Err(LabError::StepTooSmall(_))));
        assert!(u.gradient(&[1.1, 0.0, 0.0]).is_err());
    }

    #[test]
    fn vector_field_dimension_invariant() {
        assert!(VectorField::new(vec![catalog::coordinate(2, 0)]).is_err());
        let v = VectorField::new(vec![catalog::coordinate(2, 0), catalog::coordinate(2, 1)]).unwrap();
        assert_eq!(v.eval(&[0.1, 0.2]).unwrap(), vec![0.1, 0.2]);
        assert_eq!(v.jacobian(&[0.1, 0.2]).unwrap(), vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
    }
}
