use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{dist, dot, norm, BallDomain, Domain, GridDomain};
use crate::error::{LabError, Result};
use crate::fields::VectorField;
use crate::quadrature::gauss_legendre_unit;
use crate::sampling;

/// `r_Ω(x, y) = |x - y| / min(d(x), d(y))`.
pub fn distance_ratio<D: Domain + ?Sized>(domain: &D, x: &[f64], y: &[f64]) -> Result<f64> {
    let dx = domain.boundary_distance(x)?;
    let dy = domain.boundary_distance(y)?;
    Ok(dist(x, y) / dx.min(dy))
}

/// `j_Ω(x, y) = log(1 + r_Ω(x, y))`.
pub fn j_metric<D: Domain + ?Sized>(domain: &D, x: &[f64], y: &[f64]) -> Result<f64> {
    Ok(distance_ratio(domain, x, y)?.ln_1p())
}

/// Domains with a computable approximation of the quasihyperbolic metric.
pub trait Quasihyperbolic: Domain {
    fn quasihyperbolic(&self, x: &[f64], y: &[f64]) -> Result<f64>;
}

pub fn k_metric<D: Quasihyperbolic + ?Sized>(domain: &D, x: &[f64], y: &[f64]) -> Result<f64> {
    domain.quasihyperbolic(x, y)
}

impl Quasihyperbolic for BallDomain {
    fn quasihyperbolic(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        ball_quasihyperbolic(self, x, y)
    }
}

impl Quasihyperbolic for GridDomain {
    fn quasihyperbolic(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let from = grid_quasihyperbolic_from(self, x)?;
        let target = self
            .cell_of(y)
            .ok_or_else(|| LabError::domain(format!("point {y:?} is not interior to the grid domain")))?;
        let k = from[target];
        if k.is_finite() {
            Ok(k)
        } else {
            Err(LabError::Unreachable)
        }
    }
}

/// Single-source grid distances from the cell containing `x`.
pub fn grid_quasihyperbolic_from(grid: &GridDomain, x: &[f64]) -> Result<Vec<f64>> {
    let source = grid
        .cell_of(x)
        .ok_or_else(|| LabError::domain(format!("point {x:?} is not interior to the grid domain")))?;
    Ok(grid.quasihyperbolic_from(source))
}

const PATH_NODES: usize = 32;

/// Quasihyperbolic distance in the unit ball.
///
/// Pairs on a common diameter use the exact radial value. Otherwise the
/// problem is reduced to the plane through `0, x, y`, and a polyline with
/// [`PATH_NODES`] interior nodes is optimized by gradient descent, starting
/// from the straight segment. The result is the length of an admissible path,
/// so it is an upper bound on the true distance.
pub fn ball_quasihyperbolic(ball: &BallDomain, x: &[f64], y: &[f64]) -> Result<f64> {
    let dx = ball.boundary_distance(x)?;
    let dy = ball.boundary_distance(y)?;
    if dist(x, y) == 0.0 {
        return Ok(0.0);
    }
    let (nx, ny) = (norm(x), norm(y));
    let (a, b) = if nx >= ny { (x, y) } else { (y, x) };
    let na = nx.max(ny);
    if na < 1e-14 {
        return Ok(0.0);
    }
    let e1: Vec<f64> = a.iter().map(|c| c / na).collect();
    let b_par = dot(b, &e1);
    let b_perp = norm(
        &b.iter()
            .zip(&e1)
            .map(|(bc, ec)| bc - b_par * ec)
            .collect::<Vec<_>>(),
    );
    if b_perp <= 1e-13 * na.max(1e-3) {
        // Common diameter.
        return Ok(if b_par >= 0.0 {
            (dx / dy).ln().abs()
        } else {
            -dx.ln() - dy.ln()
        });
    }
    Ok(optimize_planar_path([na, 0.0], [b_par, b_perp]))
}

fn segment_cost(a: [f64; 2], b: [f64; 2], rule: &[(f64, f64)]) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len = (d[0] * d[0] + d[1] * d[1]).sqrt();
    let mut acc = 0.0;
    for &(t, w) in rule {
        let p = [a[0] + t * d[0], a[1] + t * d[1]];
        let rp = (p[0] * p[0] + p[1] * p[1]).sqrt();
        if rp >= 1.0 {
            return f64::INFINITY;
        }
        acc += w / (1.0 - rp);
    }
    len * acc
}

fn path_cost(nodes: &[[f64; 2]], rule: &[(f64, f64)]) -> f64 {
    nodes.windows(2).map(|s| segment_cost(s[0], s[1], rule)).sum()
}

fn path_gradient(nodes: &[[f64; 2]], rule: &[(f64, f64)]) -> Vec<[f64; 2]> {
    let mut g = vec![[0.0; 2]; nodes.len()];
    for (k, s) in nodes.windows(2).enumerate() {
        let (a, b) = (s[0], s[1]);
        let d = [b[0] - a[0], b[1] - a[1]];
        let len = (d[0] * d[0] + d[1] * d[1]).sqrt();
        if len == 0.0 {
            continue;
        }
        let mut j = 0.0;
        let mut ga = [0.0; 2];
        let mut gb = [0.0; 2];
        for &(t, w) in rule {
            let p = [a[0] + t * d[0], a[1] + t * d[1]];
            let rp = (p[0] * p[0] + p[1] * p[1]).sqrt();
            let inv = 1.0 / (1.0 - rp);
            j += w * inv;
            if rp > 0.0 {
                let c = w * inv * inv / rp;
                for m in 0..2 {
                    ga[m] += c * (1.0 - t) * p[m];
                    gb[m] += c * t * p[m];
                }
            }
        }
        for m in 0..2 {
            let u = d[m] / len;
            g[k][m] += -u * j + len * ga[m];
            g[k + 1][m] += u * j + len * gb[m];
        }
    }
    g
}

fn redistribute(nodes: &mut [[f64; 2]]) {
    let n = nodes.len();
    let mut cum = vec![0.0; n];
    for k in 1..n {
        cum[k] = cum[k - 1]
            + ((nodes[k][0] - nodes[k - 1][0]).powi(2) + (nodes[k][1] - nodes[k - 1][1]).powi(2)).sqrt();
    }
    let total = cum[n - 1];
    if total == 0.0 {
        return;
    }
    let old = nodes.to_vec();
    let mut seg = 0;
    for (k, node) in nodes.iter_mut().enumerate().take(n - 1).skip(1) {
        let target = total * k as f64 / (n - 1) as f64;
        while cum[seg + 1] < target {
            seg += 1;
        }
        let span = cum[seg + 1] - cum[seg];
        let t = if span > 0.0 { (target - cum[seg]) / span } else { 0.0 };
        *node = [
            old[seg][0] + t * (old[seg + 1][0] - old[seg][0]),
            old[seg][1] + t * (old[seg + 1][1] - old[seg][1]),
        ];
    }
}

fn optimize_planar_path(start: [f64; 2], end: [f64; 2]) -> f64 {
    let rule: Vec<(f64, f64)> = gauss_legendre_unit(8);
    let m = PATH_NODES + 2;
    let mut nodes: Vec<[f64; 2]> = (0..m)
        .map(|k| {
            let t = k as f64 / (m - 1) as f64;
            [start[0] + t * (end[0] - start[0]), start[1] + t * (end[1] - start[1])]
        })
        .collect();
    let mut cost = path_cost(&nodes, &rule);
    let mut step = 1e-3;
    for iter in 0..3000 {
        let mut g = path_gradient(&nodes, &rule);
        g[0] = [0.0; 2];
        g[m - 1] = [0.0; 2];
        let gnorm2: f64 = g.iter().map(|v| v[0] * v[0] + v[1] * v[1]).sum();
        if gnorm2 < 1e-26 {
            break;
        }
        step *= 2.0;
        let mut improved = false;
        while step > 1e-16 {
            let trial: Vec<[f64; 2]> = nodes
                .iter()
                .zip(&g)
                .map(|(p, gv)| [p[0] - step * gv[0], p[1] - step * gv[1]])
                .collect();
            let c = path_cost(&trial, &rule);
            if c <= cost - 1e-4 * step * gnorm2 {
                let rel = (cost - c) / cost;
                nodes = trial;
                cost = c;
                improved = rel > 1e-14;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
        if iter % 25 == 24 {
            redistribute(&mut nodes);
            let c = path_cost(&nodes, &rule);
            if c.is_finite() {
                cost = c;
            }
        }
    }
    cost
}

/// Pair of interior points used by sampled quantifiers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairSample {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl PairSample {
    /// Seeded pairs in the ball with `|x| ≤ r_max` and `|x - y| ≤ d(x)/3`,
    /// which guarantees `r_B(x, y) ≤ 1/2`.
    pub fn admissible_in_ball(seed: u64, n: usize, count: usize, r_max: f64) -> Vec<PairSample> {
        let mut rng = sampling::rng(seed);
        (0..count)
            .map(|_| {
                let x = sampling::point_in_ball(&mut rng, n, r_max);
                let d = 1.0 - norm(&x);
                let dir = sampling::unit_vector(&mut rng, n);
                let s = rng.gen_range(0.05..=1.0) * d / 3.0;
                let y = x.iter().zip(&dir).map(|(a, b)| a + s * b).collect();
                PairSample { x, y }
            })
            .collect()
    }

    /// Seeded unconstrained pairs with both points in `|·| ≤ r_max`.
    pub fn uniform_in_ball(seed: u64, n: usize, count: usize, r_max: f64) -> Vec<PairSample> {
        let mut rng = sampling::rng(seed);
        (0..count)
            .map(|_| PairSample {
                x: sampling::point_in_ball(&mut rng, n, r_max),
                y: sampling::point_in_ball(&mut rng, n, r_max),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakUniformReport {
    /// Sup of `r_{f(Ω)}(f(x), f(y))` over admissible sampled pairs.
    pub constant: f64,
    pub admissible_pairs: usize,
    pub argmax: Option<PairSample>,
    /// Spacing of the rasterized image domain, or `None` when the map was
    /// constant on the sample and no raster was needed.
    pub image_spacing: Option<f64>,
    /// The image domain is a rasterized approximation.
    pub approximate_image: bool,
}

/// Image of the unit disk under a planar map, rasterized from forward samples
/// and closed morphologically. `cells_across` sets the spacing relative to the
/// image diameter.
pub fn rasterize_disk_image(map: &VectorField, cells_across: usize) -> Result<GridDomain> {
    if map.dimension() != 2 {
        return Err(LabError::Configuration("image rasterization needs a planar map".into()));
    }
    let (nr, nt) = (384usize, 1536usize);
    let mut samples = Vec::with_capacity(nr * nt + 1);
    samples.push(to2(&map.eval(&[0.0, 0.0])?)?);
    for i in 1..=nr {
        let r = 0.999 * i as f64 / nr as f64;
        for k in 0..nt {
            let th = 2.0 * std::f64::consts::PI * k as f64 / nt as f64;
            samples.push(to2(&map.eval(&[r * th.cos(), r * th.sin()])?)?);
        }
    }
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in &samples {
        for m in 0..2 {
            lo[m] = lo[m].min(p[m]);
            hi[m] = hi[m].max(p[m]);
        }
    }
    let diameter = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    if !(diameter > 0.0 && diameter.is_finite()) {
        return Err(LabError::Configuration("degenerate image: cannot rasterize".into()));
    }
    GridDomain::from_samples_closed(&samples, diameter / cells_across as f64, 2)
}

fn to2(v: &[f64]) -> Result<[f64; 2]> {
    match v {
        [a, b] if a.is_finite() && b.is_finite() => Ok([*a, *b]),
        _ => Err(LabError::Configuration(format!("map value {v:?} is not a finite planar point"))),
    }
}

/// Empirical weak-uniform-boundedness constant of a planar map on the unit
/// disk: sup of `r_{f(B)}(f(x), f(y))` over sampled pairs with `r_B(x, y) ≤ 1/2`.
pub fn weak_uniform_bound_constant(
    map: &VectorField,
    domain: &BallDomain,
    pairs: &[PairSample],
    cells_across: usize,
) -> Result<WeakUniformReport> {
    if domain.dimension() != 2 {
        return Err(LabError::Configuration("weak uniform bound needs n = 2 for rasterization".into()));
    }
    let mut admissible = Vec::new();
    for p in pairs {
        if distance_ratio(domain, &p.x, &p.y)? <= 0.5 {
            let fx = map.eval(&p.x)?;
            let fy = map.eval(&p.y)?;
            admissible.push((p, fx, fy));
        }
    }
    let moving = admissible.iter().any(|(_, fx, fy)| dist(fx, fy) > 0.0);
    if !moving {
        return Ok(WeakUniformReport {
            constant: 0.0,
            admissible_pairs: admissible.len(),
            argmax: admissible.first().map(|(p, _, _)| (*p).clone()),
            image_spacing: None,
            approximate_image: false,
        });
    }
    let image = rasterize_disk_image(map, cells_across)?;
    let mut best = 0.0;
    let mut argmax = None;
    for (p, fx, fy) in &admissible {
        let num = dist(fx, fy);
        if num == 0.0 {
            continue;
        }
        let r = distance_ratio(&image, fx, fy).map_err(|e| {
            LabError::Configuration(format!("image rasterization does not cover sampled values: {e}"))
        })?;
        if r > best {
            best = r;
            argmax = Some((*p).clone());
        }
    }
    Ok(WeakUniformReport {
        constant: best,
        admissible_pairs: admissible.len(),
        argmax,
        image_spacing: Some(image.spacing()),
        approximate_image: true,
    })
}
