//! Mode-by-mode Dirichlet solver on the unit ball.
//!
//! A function is stored as harmonic coefficients `c_lm(s_j)` on Gauss–Legendre
//! radial nodes. The zero-boundary solution of `Δv = f` has modes
//! `v_lm(a) = −∫_0^1 g_l(a, b) f_lm(b) db` with
//! `g_l(a, b) = b^{n−1}/p · a_<^l (a_>^{−(l+n−2)} − a_>^l)`, `p = 2l + n − 2`
//! (`b log(1/a_>)` when `n = 2, l = 0`), which is the mode expansion of the
//! ball Green function.

use std::sync::Arc;

use crate::error::{LabError, Result};
use crate::fields::ScalarField;
use crate::quadrature::{gauss_legendre_unit, SphereRule};

use super::harmonics::HarmonicBasis;

/// Barycentric Lagrange interpolation on fixed nodes.
#[derive(Debug, Clone)]
pub(crate) struct Barycentric {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Barycentric {
    pub(crate) fn new(nodes: Vec<f64>) -> Self {
        let weights = (0..nodes.len())
            .map(|j| {
                1.0 / (0..nodes.len())
                    .filter(|&k| k != j)
                    .map(|k| nodes[j] - nodes[k])
                    .product::<f64>()
            })
            .collect();
        Self { nodes, weights }
    }

    /// Values of all Lagrange basis polynomials at `x`.
    pub(crate) fn basis(&self, x: f64) -> Vec<f64> {
        if let Some(j) = self.nodes.iter().position(|&s| s == x) {
            let mut e = vec![0.0; self.nodes.len()];
            e[j] = 1.0;
            return e;
        }
        let terms: Vec<f64> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(s, w)| w / (x - s))
            .collect();
        let total: f64 = terms.iter().sum();
        terms.into_iter().map(|t| t / total).collect()
    }
}

/// Solver-side discretization settings.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct SpectralSettings {
    pub radial_nodes: usize,
    /// Highest harmonic degree kept; `0` picks a per-dimension default.
    pub max_degree: usize,
}

impl Default for SpectralSettings {
    fn default() -> Self {
        Self {
            radial_nodes: 32,
            max_degree: 0,
        }
    }
}

impl SpectralSettings {
    fn degree(&self, n: usize) -> usize {
        match (self.max_degree, n) {
            (0, 2) => 24,
            (0, _) => 12,
            (l, _) => l,
        }
    }
}

/// Radial nodes, an angular rule that is exact for products of retained
/// harmonics, and the Green mode matrices.
#[derive(Debug)]
pub struct SpectralBall {
    radial: Vec<f64>,
    sphere: SphereRule,
    basis: HarmonicBasis,
    /// `Y[k][mode]` at the sphere nodes.
    ylm: Vec<Vec<f64>>,
    /// Per degree `l`: `K[i][j] = ∫ g_l(s_i, b) ℓ_j(b) db`.
    kernels: Vec<Vec<Vec<f64>>>,
    /// Interpolation on `radial ∪ {1}` for zero-boundary mode profiles.
    closed: Barycentric,
}

impl SpectralBall {
    pub fn new(n: usize, settings: SpectralSettings) -> Result<Self> {
        let l = settings.degree(n);
        let basis = HarmonicBasis::new(n, l)?;
        if settings.radial_nodes < 4 {
            return Err(LabError::Configuration("spectral solver needs ≥ 4 radial nodes".into()));
        }
        let sphere = match n {
            2 => SphereRule::circle(2 * l + 4)?,
            _ => SphereRule::sphere(l + 2, 2 * l + 4)?,
        };
        let radial: Vec<f64> = gauss_legendre_unit(settings.radial_nodes).into_iter().map(|(s, _)| s).collect();
        let ylm = sphere.nodes().iter().map(|z| basis.eval(z)).collect();
        let open = Barycentric::new(radial.clone());
        let kernels = (0..=l).map(|deg| green_mode_matrix(n, deg, &radial, &open)).collect();
        let mut closed_nodes = radial.clone();
        closed_nodes.push(1.0);
        Ok(Self {
            radial,
            sphere,
            basis,
            ylm,
            kernels,
            closed: Barycentric::new(closed_nodes),
        })
    }

    pub fn dimension(&self) -> usize {
        self.basis.dimension()
    }

    pub fn radial(&self) -> &[f64] {
        &self.radial
    }

    pub fn sphere(&self) -> &SphereRule {
        &self.sphere
    }

    pub fn basis(&self) -> &HarmonicBasis {
        &self.basis
    }

    /// Interior nodes `s_j ζ_k`, row-major in `(j, k)`.
    pub fn nodes(&self) -> Vec<Vec<f64>> {
        self.radial
            .iter()
            .flat_map(|&s| self.sphere.nodes().iter().map(move |z| z.iter().map(|c| c * s).collect()))
            .collect()
    }

    /// Harmonic coefficients of values given at the sphere nodes.
    pub fn project(&self, values: &[f64]) -> Vec<f64> {
        let mut c = vec![0.0; self.basis.len()];
        for ((v, w), y) in values.iter().zip(self.sphere.weights()).zip(&self.ylm) {
            let vw = v * w;
            for (ci, yi) in c.iter_mut().zip(y) {
                *ci += vw * yi;
            }
        }
        c
    }

    pub fn synthesize(&self, coeffs: &[f64]) -> Vec<f64> {
        self.ylm
            .iter()
            .map(|y| y.iter().zip(coeffs).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Zero-boundary solution of `Δv = f`, mode values at the radial nodes,
    /// from `f` mode values at the radial nodes.
    pub fn solve_dirichlet(&self, source: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let nr = self.radial.len();
        let modes = self.basis.len();
        let mut out = vec![vec![0.0; modes]; nr];
        for (m, &l) in self.basis.degrees().iter().enumerate() {
            let k = &self.kernels[l];
            for i in 0..nr {
                out[i][m] = -(0..nr).map(|j| k[i][j] * source[j][m]).sum::<f64>();
            }
        }
        out
    }

    /// Mode values of `f` at every radial node from nodal values
    /// (`values[j][k]` at `s_j ζ_k`).
    pub fn project_ball(&self, values: &[Vec<f64>]) -> Vec<Vec<f64>> {
        values.iter().map(|row| self.project(row)).collect()
    }

    pub fn synthesize_ball(&self, coeffs: &[Vec<f64>]) -> Vec<Vec<f64>> {
        coeffs.iter().map(|c| self.synthesize(c)).collect()
    }
}

fn green_mode_kernel(n: usize, l: usize, a: f64, b: f64) -> f64 {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    if n == 2 && l == 0 {
        return b * (1.0 / hi).ln();
    }
    let p = (2 * l + n - 2) as f64;
    let li = l as i32;
    b.powi(n as i32 - 1) / p * lo.powi(li) * (hi.powi(-(li + n as i32 - 2)) - hi.powi(li))
}

/// `∫_0^1 g_l(a_i, b) ℓ_j(b) db` with pieces split at `a` and graded
/// geometrically above it, where `g_l` varies on the scale `a`.
fn green_mode_matrix(n: usize, l: usize, radial: &[f64], interp: &Barycentric) -> Vec<Vec<f64>> {
    let rule = gauss_legendre_unit(40);
    radial
        .iter()
        .map(|&a| {
            let mut breaks = vec![0.0, a];
            let mut t = a;
            while 2.0 * t < 1.0 {
                t *= 2.0;
                breaks.push(t);
            }
            breaks.push(1.0);
            let mut row = vec![0.0; radial.len()];
            for piece in breaks.windows(2) {
                let (lo, hi) = (piece[0], piece[1]);
                for &(u, w) in &rule {
                    let b = lo + (hi - lo) * u;
                    let g = green_mode_kernel(n, l, a, b) * w * (hi - lo);
                    for (r, e) in row.iter_mut().zip(interp.basis(b)) {
                        *r += g * e;
                    }
                }
            }
            row
        })
        .collect()
}

/// `u(aζ) = Σ_lm (a^l h_lm + v_lm(a)) Y_lm(ζ)`: harmonic boundary part plus a
/// zero-boundary part interpolated from the radial nodes.
#[derive(Debug, Clone)]
pub struct ModalField {
    ball: Arc<SpectralBall>,
    boundary: Vec<f64>,
    /// `v_lm` at `radial ∪ {1}` (last row zero).
    interior: Vec<Vec<f64>>,
}

impl ModalField {
    pub fn new(ball: Arc<SpectralBall>, boundary: Vec<f64>, interior: &[Vec<f64>]) -> Self {
        let mut rows = interior.to_vec();
        rows.push(vec![0.0; ball.basis.len()]);
        Self {
            ball,
            boundary,
            interior: rows,
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let a = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        let n = x.len();
        let zeta: Vec<f64> = if a > 0.0 {
            x.iter().map(|c| c / a).collect()
        } else {
            let mut e = vec![0.0; n];
            e[n - 1] = 1.0;
            e
        };
        let y = self.ball.basis.eval(&zeta);
        let weights = self.ball.closed.basis(a);
        let mut total = 0.0;
        let mut apow = vec![1.0; self.ball.basis.max_degree() + 1];
        for l in 1..apow.len() {
            apow[l] = apow[l - 1] * a;
        }
        for (m, &l) in self.ball.basis.degrees().iter().enumerate() {
            let v: f64 = weights.iter().zip(&self.interior).map(|(w, row)| w * row[m]).sum();
            total += (apow[l] * self.boundary[m] + v) * y[m];
        }
        total
    }

    pub fn into_field(self, name: impl Into<String>) -> ScalarField {
        let n = self.ball.dimension();
        ScalarField::new(n, name, move |x| self.value(x)).with_domain_radius(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn barycentric_reproduces_polynomials() {
        let nodes: Vec<f64> = gauss_legendre_unit(12).into_iter().map(|(s, _)| s).collect();
        let b = Barycentric::new(nodes.clone());
        let f = |x: f64| 3.0 * x.powi(7) - x.powi(2) + 0.5;
        let vals: Vec<f64> = nodes.iter().map(|&x| f(x)).collect();
        for x in [0.0, 0.123, 0.5, 0.999, 1.0] {
            let v: f64 = b.basis(x).iter().zip(&vals).map(|(p, q)| p * q).sum();
            assert!((v - f(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_source_gives_quadratic_profile() {
        for n in [2, 3] {
            let ball = Arc::new(SpectralBall::new(n, SpectralSettings::default()).unwrap());
            let nodes = ball.nodes();
            let k = ball.sphere().len();
            let values: Vec<Vec<f64>> = nodes.chunks(k).map(|c| vec![1.0; c.len()]).collect();
            let v = ball.solve_dirichlet(&ball.project_ball(&values));
            let field = ModalField::new(ball.clone(), vec![0.0; ball.basis().len()], &v);
            for x in [vec![0.0; n], vec![0.3; n], {
                let mut e = vec![0.0; n];
                e[0] = 0.97;
                e
            }] {
                let a2: f64 = x.iter().map(|c| c * c).sum();
                let exact = -(1.0 - a2) / (2.0 * n as f64);
                assert!((field.value(&x) - exact).abs() < 1e-12, "n={n} {x:?}");
            }
        }
    }

    #[test]
    fn higher_mode_source() {
        // Δ(x₁(1 − |x|²)) = −2(n+2) x₁, so the source x₁ gives v = −x₁(1−|x|²)/(2(n+2))
        for n in [2, 3] {
            let ball = Arc::new(SpectralBall::new(n, SpectralSettings::default()).unwrap());
            let k = ball.sphere().len();
            let values: Vec<Vec<f64>> = ball.nodes().chunks(k).map(|c| c.iter().map(|p| p[0]).collect()).collect();
            let v = ball.solve_dirichlet(&ball.project_ball(&values));
            let field = ModalField::new(ball.clone(), vec![0.0; ball.basis().len()], &v);
            let x: Vec<f64> = (0..n).map(|i| 0.2 + 0.1 * i as f64).collect();
            let a2: f64 = x.iter().map(|c| c * c).sum();
            let exact = -x[0] * (1.0 - a2) / (2.0 * (n as f64 + 2.0));
            assert!((field.value(&x) - exact).abs() < 1e-12, "n={n}");
        }
    }
}
