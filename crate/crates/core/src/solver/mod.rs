//! Solutions of `Δu = λ(x)|u|^{τ−1}u` on the unit ball.
//!
//! `picard-integral` iterates `u = P[g] − G[λ|u|^{τ−1}u]` with the Green
//! operator applied mode by mode (see [`spectral`]); `fd-grid` is a radial
//! finite-difference cross-check; `radial-exact` returns the closed-form
//! series solution for constant `λ` and constant data.

mod direct;
mod harmonics;
mod radial_fd;
pub mod spectral;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::fields::{catalog, ScalarField};
use crate::quadrature::QuadratureOrders;
use crate::sampling::{points_in_ball, rng, unit_vector};

pub use direct::{green_potential_at, poisson_integral};
pub use harmonics::HarmonicBasis;
pub use spectral::{ModalField, SpectralBall, SpectralSettings};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    RadialExact,
    PicardIntegral,
    FdGrid,
}

impl Backend {
    pub fn label(&self) -> &'static str {
        match self {
            Backend::RadialExact => "radial-exact",
            Backend::PicardIntegral => "picard-integral",
            Backend::FdGrid => "fd-grid",
        }
    }
}

type RadialProfile = Box<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone)]
pub struct YukawaProblem {
    dimension: usize,
    tau: f64,
    lambda: ScalarField,
    boundary: ScalarField,
    backend: Backend,
    lambda_sup: f64,
    lambda_constant: Option<f64>,
    boundary_constant: Option<f64>,
}

const HYPOTHESIS_SAMPLES: usize = 2000;

impl YukawaProblem {
    /// `lambda` must be nonnegative (checked on seeded samples); `boundary` is
    /// evaluated at unit vectors.
    pub fn new(tau: f64, lambda: ScalarField, boundary: ScalarField, backend: Backend) -> Result<Self> {
        let n = lambda.dimension();
        if !(n == 2 || n == 3) || boundary.dimension() != n {
            return Err(LabError::Configuration(format!(
                "problem needs n ∈ {{2, 3}} with matching fields, got λ in {n}, g in {}",
                boundary.dimension()
            )));
        }
        if !(tau >= 1.0 && tau.is_finite()) {
            return Err(LabError::Configuration(format!("τ must be ≥ 1, got {tau}")));
        }
        let mut samples = points_in_ball(0x1a3b, n, 0.999, HYPOTHESIS_SAMPLES);
        samples.push(vec![0.0; n]);
        let mut sup: f64 = 0.0;
        let mut negative = Vec::new();
        for x in &samples {
            let v = lambda.eval(x)?;
            if v < 0.0 {
                negative.push(x.clone());
            }
            sup = sup.max(v);
        }
        if !negative.is_empty() {
            return Err(LabError::hypothesis("λ takes negative values", negative));
        }
        Ok(Self {
            dimension: n,
            tau,
            lambda,
            boundary,
            backend,
            lambda_sup: sup,
            lambda_constant: None,
            boundary_constant: None,
        })
    }

    pub fn constant(n: usize, tau: f64, lambda: f64, g: f64, backend: Backend) -> Result<Self> {
        let mut p = Self::new(tau, ScalarField::constant(n, lambda), ScalarField::constant(n, g), backend)?;
        p.lambda_constant = Some(lambda);
        p.boundary_constant = Some(g);
        Ok(p)
    }

    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn lambda(&self) -> &ScalarField {
        &self.lambda
    }

    pub fn boundary(&self) -> &ScalarField {
        &self.boundary
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    /// Largest sampled value of `λ`.
    pub fn lambda_sup(&self) -> f64 {
        self.lambda_sup
    }

    /// `sup λ · ‖G‖`, with `‖G‖ = 1/(2n)` the sup-norm bound of the Green
    /// operator on the unit ball; below 1 means Picard contracts for `τ = 1`.
    pub fn contraction_estimate(&self) -> f64 {
        self.lambda_sup / (2.0 * self.dimension as f64)
    }

    /// Radial profile `λ(s)` and constant boundary value when both are
    /// rotation invariant on samples.
    fn radial_data(&self) -> Option<(RadialProfile, f64)> {
        let n = self.dimension;
        let g = match self.boundary_constant {
            Some(c) => c,
            None => {
                let mut r = rng(0x5eed);
                let g0 = self.boundary.value(&unit_vector(&mut r, n));
                for _ in 0..64 {
                    if (self.boundary.value(&unit_vector(&mut r, n)) - g0).abs() > 1e-12 * g0.abs().max(1.0) {
                        return None;
                    }
                }
                g0
            }
        };
        if let Some(l) = self.lambda_constant {
            return Some((Box::new(move |_| l), g));
        }
        let mut r = rng(0x7ad1);
        for k in 0..64 {
            let s = 0.99 * k as f64 / 63.0;
            let e: Vec<f64> = (0..n).map(|i| if i == 0 { s } else { 0.0 }).collect();
            let z: Vec<f64> = unit_vector(&mut r, n).into_iter().map(|c| c * s).collect();
            let (a, b) = (self.lambda.value(&e), self.lambda.value(&z));
            if (a - b).abs() > 1e-12 * a.abs().max(1.0) {
                return None;
            }
        }
        let lam = self.lambda.clone();
        Some((
            Box::new(move |s| {
                let mut e = vec![0.0; n];
                e[0] = s;
                lam.value(&e)
            }),
            g,
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Largest PDE residual compatible with "converged".
    pub residual_tol: f64,
    pub spectral: SpectralSettings,
    /// Interval count of the radial finite-difference grid.
    pub fd_intervals: usize,
    pub residual_samples: usize,
    pub seed: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 200,
            residual_tol: 1e-4,
            spectral: SpectralSettings::default(),
            fd_intervals: 2000,
            residual_samples: 64,
            seed: 1,
        }
    }
}

/// Solver diagnostics, serializable without the field itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionMeta {
    pub backend: Backend,
    pub iterations: usize,
    pub final_update: f64,
    pub update_history: Vec<f64>,
    /// Largest ratio of consecutive update norms after iteration 2.
    pub lipschitz_estimate: f64,
    pub contraction_estimate: f64,
    /// Whether update norms strictly decreased after iteration 2.
    pub monotone_updates: bool,
    /// `max |Δ_h u − λ|u|^{τ−1}u|` over interior samples.
    pub residual: f64,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct SolutionField {
    pub field: ScalarField,
    pub meta: SolutionMeta,
}

/// Closed-form radial solution of `Δu = λu` with `u(0) = 1`.
pub fn radial_oracle(n: usize, lambda: f64, tau: f64) -> Result<ScalarField> {
    if !(n == 2 || n == 3) {
        return Err(LabError::Unsupported(format!("radial oracle for n = {n}")));
    }
    if tau != 1.0 {
        return Err(LabError::Unsupported(format!("radial oracle needs τ = 1, got {tau}")));
    }
    if !(lambda >= 0.0) {
        return Err(LabError::Configuration(format!("λ must be ≥ 0, got {lambda}")));
    }
    Ok(catalog::yukawa_radial(n, lambda))
}

/// Harmonic extension of `g` (given on unit vectors) to `B_r`, from its
/// harmonic coefficients on the configured sphere rule. Equal to
/// `r^{n−2} ∫ P_r(w, ζ) g(ζ) dσ(ζ)` for data of degree up to the cut-off.
pub fn poisson_extend(g: &ScalarField, r: f64, orders: &QuadratureOrders) -> Result<ScalarField> {
    let n = g.dimension();
    let rule = orders.sphere_rule(n)?;
    let cap = if n == 2 { 128 } else { 32 };
    let basis = HarmonicBasis::new(n, (rule.degree() / 2).min(cap))?;
    let mut coeffs = vec![0.0; basis.len()];
    for (z, w) in rule.iter() {
        let gv = g.value(z);
        if !gv.is_finite() {
            return Err(LabError::NonFinite {
                value: gv,
                location: z.to_vec(),
            });
        }
        for (c, y) in coeffs.iter_mut().zip(basis.eval(z)) {
            *c += w * gv * y;
        }
    }
    let name = format!("P[{}]", g.name());
    Ok(ScalarField::new(n, name, move |x| {
        let a = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        let zeta: Vec<f64> = if a > 0.0 {
            x.iter().map(|c| c / a).collect()
        } else {
            (0..n).map(|i| if i == n - 1 { 1.0 } else { 0.0 }).collect()
        };
        let rho = a / r;
        basis
            .eval(&zeta)
            .iter()
            .zip(&coeffs)
            .zip(basis.degrees())
            .map(|((y, c), &l)| rho.powi(l as i32) * c * y)
            .sum()
    })
    .with_domain_radius(r))
}

/// `v = ∫_B G(·, y) f(y) dy` on the unit ball, so that `Δv = −f` and `v = 0`
/// on the sphere.
pub fn green_potential(source: &ScalarField, settings: SpectralSettings) -> Result<ScalarField> {
    let n = source.dimension();
    let ball = Arc::new(SpectralBall::new(n, settings)?);
    let k = ball.sphere().len();
    let values = ball
        .nodes()
        .iter()
        .map(|x| source.eval(x))
        .collect::<Result<Vec<f64>>>()?;
    let rows: Vec<Vec<f64>> = values.chunks(k).map(<[f64]>::to_vec).collect();
    let w: Vec<Vec<f64>> = ball
        .solve_dirichlet(&ball.project_ball(&rows))
        .into_iter()
        .map(|row| row.into_iter().map(|v| -v).collect())
        .collect();
    let modes = ball.basis().len();
    Ok(ModalField::new(ball, vec![0.0; modes], &w).into_field(format!("G[{}]", source.name())))
}

/// Dispatches on the problem's backend.
pub fn solve(problem: &YukawaProblem, opts: &SolveOptions) -> Result<SolutionField> {
    match problem.backend {
        Backend::PicardIntegral => picard_solve(problem, opts),
        Backend::FdGrid => fd_solve(problem, opts),
        Backend::RadialExact => {
            let (lambda, g) = match (problem.lambda_constant, problem.boundary_constant) {
                (Some(l), Some(g)) => (l, g),
                _ => {
                    return Err(LabError::Unsupported(
                        "radial-exact needs constant λ and constant boundary data".into(),
                    ))
                }
            };
            let base = radial_oracle(problem.dimension, lambda, problem.tau)?;
            let n = problem.dimension;
            let mut e = vec![0.0; n];
            e[0] = 1.0;
            let field = base.scaled(g / base.value(&e)).with_name(format!("oracle(λ={lambda}, g={g})"));
            finish(problem, opts, field, Backend::RadialExact, vec![], opts.tol)
        }
    }
}

fn nonlinearity(tau: f64, u: f64) -> f64 {
    if tau == 1.0 {
        u
    } else {
        u.abs().powf(tau - 1.0) * u
    }
}

/// Fixed-point iteration of the integral representation.
pub fn picard_solve(problem: &YukawaProblem, opts: &SolveOptions) -> Result<SolutionField> {
    let n = problem.dimension;
    let ball = Arc::new(SpectralBall::new(n, opts.spectral)?);
    let k = ball.sphere().len();
    let boundary_values = ball
        .sphere()
        .nodes()
        .iter()
        .map(|z| {
            let v = problem.boundary.value(z);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(LabError::NonFinite {
                    value: v,
                    location: z.clone(),
                })
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    let h_lm = ball.project(&boundary_values);
    // harmonic part at the nodes: a^l h_lm
    let harmonic: Vec<Vec<f64>> = ball
        .radial()
        .iter()
        .map(|&a| {
            let c: Vec<f64> = h_lm
                .iter()
                .zip(ball.basis().degrees())
                .map(|(h, &l)| h * a.powi(l as i32))
                .collect();
            ball.synthesize(&c)
        })
        .collect();
    let nodes = ball.nodes();
    let lambda: Vec<f64> = nodes.iter().map(|x| problem.lambda.eval(x)).collect::<Result<_>>()?;
    let mut u = harmonic.clone();
    let mut interior = vec![vec![0.0; ball.basis().len()]; ball.radial().len()];
    let mut history = Vec::new();
    let scale = boundary_values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    loop {
        let source: Vec<Vec<f64>> = u
            .iter()
            .enumerate()
            .map(|(j, row)| {
                row.iter()
                    .enumerate()
                    .map(|(q, &v)| lambda[j * k + q] * nonlinearity(problem.tau, v))
                    .collect()
            })
            .collect();
        interior = ball.solve_dirichlet(&ball.project_ball(&source));
        let correction = ball.synthesize_ball(&interior);
        let mut update: f64 = 0.0;
        for ((row, h), c) in u.iter_mut().zip(&harmonic).zip(&correction) {
            for ((v, hv), cv) in row.iter_mut().zip(h).zip(c) {
                let next = hv + cv;
                update = update.max((next - *v).abs());
                *v = next;
            }
        }
        history.push(update);
        if !update.is_finite() || update > 1e12 * scale {
            return Err(LabError::Divergence {
                iterations: history.len(),
                last_update: update,
                history,
            });
        }
        if update <= opts.tol * scale {
            break;
        }
        if history.len() >= opts.max_iter {
            return Err(LabError::Divergence {
                iterations: history.len(),
                last_update: update,
                history,
            });
        }
    }
    let field = ModalField::new(ball, h_lm, &interior).into_field(format!(
        "picard(n={n}, τ={}, λ={}, g={})",
        problem.tau,
        problem.lambda.name(),
        problem.boundary.name()
    ));
    finish(problem, opts, field, Backend::PicardIntegral, history, opts.tol * scale)
}

/// Radial finite-difference backend; non-radial problems are unsupported.
pub fn fd_solve(problem: &YukawaProblem, opts: &SolveOptions) -> Result<SolutionField> {
    let (lambda, g) = problem
        .radial_data()
        .ok_or_else(|| LabError::Unsupported("fd-grid backend handles radial problems only".into()))?;
    let m = opts.fd_intervals;
    let (values, history) = radial_fd::solve_radial(problem.dimension, problem.tau, lambda, g, m)?;
    let mf = m as f64;
    let slope1 = (3.0 * values[m] - 4.0 * values[m - 1] + values[m - 2]) * mf / 2.0;
    let field = radial_fd::RadialSpline::new(values, 0.0, slope1)
        .into_field(problem.dimension, format!("fd(n={}, τ={})", problem.dimension, problem.tau));
    let tol = 1e-10 * g.abs().max(1.0);
    finish(problem, opts, field, Backend::FdGrid, history, tol)
}

fn finish(
    problem: &YukawaProblem,
    opts: &SolveOptions,
    field: ScalarField,
    backend: Backend,
    history: Vec<f64>,
    noise: f64,
) -> Result<SolutionField> {
    let residual = pde_residual(&field, problem, opts.residual_samples, opts.seed)?;
    let lipschitz = history
        .windows(2)
        .skip(1)
        .filter(|w| w[0] > 100.0 * noise)
        .map(|w| w[1] / w[0])
        .fold(0.0, f64::max);
    let monotone = history
        .windows(2)
        .skip(1)
        .filter(|w| w[0] > 100.0 * noise)
        .all(|w| w[1] < w[0]);
    let final_update = history.last().copied().unwrap_or(0.0);
    let lipschitz = if backend == Backend::PicardIntegral { lipschitz } else { 0.0 };
    Ok(SolutionField {
        field,
        meta: SolutionMeta {
            backend,
            iterations: history.len(),
            final_update,
            update_history: history,
            lipschitz_estimate: lipschitz,
            contraction_estimate: problem.contraction_estimate(),
            monotone_updates: monotone,
            residual,
            converged: lipschitz < 0.99 && residual <= opts.residual_tol,
        },
    })
}

/// `max |Δ_h u − λ|u|^{τ−1}u|` with `h = 10⁻³` over seeded samples in
/// `|x| ≤ 0.9`.
pub fn pde_residual(field: &ScalarField, problem: &YukawaProblem, samples: usize, seed: u64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for x in points_in_ball(seed, problem.dimension, 0.9, samples) {
        let lap = field.fd_laplacian_with_step(&x, 1e-3)?;
        let rhs = problem.lambda.eval(&x)? * nonlinearity(problem.tau, field.eval(&x)?);
        worst = worst.max((lap - rhs).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{bessel_i0, sinhc};

    fn sup_error(a: &ScalarField, b: impl Fn(&[f64]) -> f64, n: usize) -> f64 {
        points_in_ball(4, n, 0.999, 400)
            .iter()
            .map(|x| (a.value(x) - b(x)).abs())
            .fold(0.0, f64::max)
    }

    fn radius(x: &[f64]) -> f64 {
        x.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(radial_oracle(3, 0.0, 1.0).unwrap().value(&[0.3, 0.2, 0.1]), 1.0);
        assert!((radial_oracle(3, 1.0, 1.0).unwrap().value(&[0.5, 0.0, 0.0]) - 1.042190).abs() < 1e-6);
        assert!((radial_oracle(2, 1.0, 1.0).unwrap().value(&[0.0, 0.5]) - 1.063483).abs() < 1e-6);
        assert!(radial_oracle(4, 1.0, 1.0).is_err());
        for n in [2, 3] {
            let u = radial_oracle(n, 1.0, 1.0).unwrap();
            for x in points_in_ball(8, n, 0.9, 30) {
                if radius(&x) > 0.05 {
                    assert!((u.fd_laplacian_with_step(&x, 1e-4).unwrap() - u.value(&x)).abs() < 1e-6);
                    assert!((u.laplacian(&x).unwrap() - u.value(&x)).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn harmonic_case_is_constant() {
        for n in [2, 3] {
            let p = YukawaProblem::constant(n, 1.0, 0.0, 2.5, Backend::PicardIntegral).unwrap();
            let s = picard_solve(&p, &SolveOptions::default()).unwrap();
            assert!(sup_error(&s.field, |_| 2.5, n) < 1e-12);
            assert!(s.meta.converged);
        }
    }

    #[test]
    fn picard_matches_oracles() {
        let opts = SolveOptions::default();
        let p3 = YukawaProblem::constant(3, 1.0, 1.0, 1.0, Backend::PicardIntegral).unwrap();
        let s3 = picard_solve(&p3, &opts).unwrap();
        assert!(sup_error(&s3.field, |x| sinhc(radius(x)) / sinhc(1.0), 3) < 1e-5);
        assert!(s3.meta.residual < 1e-4 && s3.meta.converged && s3.meta.monotone_updates);
        let p2 = YukawaProblem::constant(2, 1.0, 1.0, 1.0, Backend::PicardIntegral).unwrap();
        let s2 = picard_solve(&p2, &opts).unwrap();
        assert!(sup_error(&s2.field, |x| bessel_i0(radius(x)) / bessel_i0(1.0), 2) < 1e-5);
    }

    #[test]
    fn backends_agree() {
        for n in [2, 3] {
            let p = YukawaProblem::constant(n, 1.0, 1.0, 1.0, Backend::PicardIntegral).unwrap();
            let a = solve(&p, &SolveOptions::default()).unwrap();
            let b = solve(&p.clone().with_backend(Backend::FdGrid), &SolveOptions::default()).unwrap();
            let c = solve(&p.clone().with_backend(Backend::RadialExact), &SolveOptions::default()).unwrap();
            let f = |x: &[f64]| b.field.value(x);
            assert!(sup_error(&a.field, f, n) < 1e-4);
            assert!(sup_error(&c.field, f, n) < 1e-6);
        }
    }

    #[test]
    fn nonradial_fd_is_unsupported() {
        let p = YukawaProblem::new(
            1.0,
            ScalarField::constant(2, 1.0),
            catalog::coordinate(2, 0),
            Backend::FdGrid,
        )
        .unwrap();
        assert!(matches!(solve(&p, &SolveOptions::default()), Err(LabError::Unsupported(_))));
    }

    #[test]
    fn negative_lambda_rejected() {
        let l = catalog::coordinate(3, 0);
        assert!(matches!(
            YukawaProblem::new(1.0, l, ScalarField::constant(3, 1.0), Backend::PicardIntegral),
            Err(LabError::Hypothesis { .. })
        ));
    }

    #[test]
    fn nonradial_problem_solves_pde() {
        let lambda = catalog::norm_squared(3).scaled(0.5);
        let g = catalog::by_name("x1x2", 3).unwrap();
        let p = YukawaProblem::new(1.0, lambda, g, Backend::PicardIntegral).unwrap();
        let s = picard_solve(&p, &SolveOptions::default()).unwrap();
        assert!(s.meta.residual < 1e-4, "{}", s.meta.residual);
        // boundary values approached
        let z = [0.6, 0.8 * 0.999, 0.0];
        assert!((s.field.value(&z) - 0.6 * 0.8 * 0.999).abs() < 2e-3);
    }

    #[test]
    fn superlinear_power() {
        let p = YukawaProblem::constant(3, 2.0, 1.0, 1.0, Backend::PicardIntegral).unwrap();
        let s = picard_solve(&p, &SolveOptions::default()).unwrap();
        let fd = fd_solve(&p, &SolveOptions::default()).unwrap();
        assert!(sup_error(&s.field, |x| fd.field.value(x), 3) < 1e-4);
    }

    #[test]
    fn divergence_carries_history() {
        let p = YukawaProblem::constant(3, 1.0, 1.0, 1.0, Backend::PicardIntegral).unwrap();
        let opts = SolveOptions {
            max_iter: 3,
            ..SolveOptions::default()
        };
        match picard_solve(&p, &opts) {
            Err(LabError::Divergence { history, .. }) => assert_eq!(history.len(), 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn poisson_extension_examples() {
        let o = QuadratureOrders::default();
        for n in [2, 3] {
            let one = poisson_extend(&ScalarField::constant(n, 1.0), 1.0, &o).unwrap();
            assert!((one.value(&vec![0.3; n]) - 1.0).abs() < 1e-12);
            let r = 0.8;
            let z1 = poisson_extend(&catalog::coordinate(n, 0), r, &o).unwrap();
            let w: Vec<f64> = (0..n).map(|i| 0.1 * (i + 1) as f64).collect();
            assert!((z1.value(&w) - w[0] / r).abs() < 1e-12);
            let rule = o.sphere_rule(n).unwrap();
            assert!((poisson_integral(&catalog::coordinate(n, 0), r, &w, &rule).unwrap() - w[0] / r).abs() < 1e-10);
            let z12 = poisson_extend(&catalog::by_name("x1x2", n).unwrap(), 1.0, &o).unwrap();
            assert!(z12.fd_laplacian_with_step(&w, 1e-3).unwrap().abs() < 1e-6);
        }
    }

    #[test]
    fn green_potential_examples() {
        let settings = SpectralSettings::default();
        let o = QuadratureOrders::light();
        for n in [2, 3] {
            let zero = green_potential(&ScalarField::constant(n, 0.0), settings).unwrap();
            assert_eq!(zero.value(&vec![0.2; n]), 0.0);
            let one = green_potential(&ScalarField::constant(n, 1.0), settings).unwrap();
            let w: Vec<f64> = (0..n).map(|i| 0.15 * (i + 1) as f64).collect();
            let exact = (1.0 - w.iter().map(|c| c * c).sum::<f64>()) / (2.0 * n as f64);
            assert!((one.value(&w) - exact).abs() < 1e-12);
            assert!((one.fd_laplacian_with_step(&w, 1e-3).unwrap() + 1.0).abs() < 1e-4);
            // direct integration centred at w agrees with the mode solution
            let src = catalog::yukawa_radial(n, 1.0);
            let modal = green_potential(&src, settings).unwrap();
            let rule = o.sphere_rule(n).unwrap();
            let direct = green_potential_at(&src, &w, &rule, 48).unwrap();
            assert!((modal.value(&w) - direct).abs() < 1e-6, "n={n}: {} vs {direct}", modal.value(&w));
        }
    }
}
