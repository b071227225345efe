//! Majorants `ω` and Bloch-type weights `φ(d) = d^α (1 − log d)^β`.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Increasing `ω` with `ω(0) = 0` and `ω(t)/t` non-increasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Majorant {
    /// `ω(t) = t^γ`.
    Power { gamma: f64 },
    /// Piecewise-linear through `(t, ω)` knots; constant extrapolation of the
    /// last slope beyond the table.
    Table { points: Vec<(f64, f64)> },
}

impl Majorant {
    pub fn identity() -> Self {
        Majorant::Power { gamma: 1.0 }
    }

    pub fn sqrt() -> Self {
        Majorant::Power { gamma: 0.5 }
    }

    /// `id` or `sqrt` or `pow:γ`.
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "id" | "identity" => Ok(Self::identity()),
            "sqrt" => Ok(Self::sqrt()),
            _ => name
                .strip_prefix("pow:")
                .and_then(|g| g.parse().ok())
                .map(|gamma| Majorant::Power { gamma })
                .ok_or_else(|| LabError::Configuration(format!("unknown majorant {name:?}"))),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Majorant::Power { gamma } => {
                if t <= 0.0 {
                    0.0
                } else {
                    t.powf(*gamma)
                }
            }
            Majorant::Table { points } => {
                if points.is_empty() || t <= 0.0 {
                    return 0.0;
                }
                let mut prev = (0.0, 0.0);
                for &(x, y) in points {
                    if t <= x {
                        return prev.1 + (y - prev.1) * (t - prev.0) / (x - prev.0);
                    }
                    prev = (x, y);
                }
                let k = points.len();
                let (x0, y0) = if k >= 2 { points[k - 2] } else { (0.0, 0.0) };
                let (x1, y1) = points[k - 1];
                y1 + (y1 - y0) / (x1 - x0) * (t - x1)
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            Majorant::Power { gamma } if *gamma == 1.0 => "t".into(),
            Majorant::Power { gamma } if *gamma == 0.5 => "sqrt(t)".into(),
            Majorant::Power { gamma } => format!("t^{gamma}"),
            Majorant::Table { points } => format!("table[{}]", points.len()),
        }
    }
}

/// Checks `ω(0) = 0`, monotonicity of `ω` and of `ω(t)/t` on an increasing
/// grid of at least 100 positive abscissae.
pub fn validate_majorant(omega: &Majorant, grid: &[f64]) -> Result<bool> {
    if grid.len() < 100 {
        return Err(LabError::Configuration(format!("majorant grid needs ≥ 100 points, got {}", grid.len())));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) || grid[0] <= 0.0 {
        return Err(LabError::Configuration("majorant grid must be positive and increasing".into()));
    }
    if omega.eval(0.0) != 0.0 {
        return Ok(false);
    }
    let values: Vec<f64> = grid.iter().map(|&t| omega.eval(t)).collect();
    if values.iter().any(|v| *v < 0.0 || !v.is_finite()) {
        return Ok(false);
    }
    let slack = |a: f64| 1e-12 * a.abs().max(1.0);
    let increasing = values.windows(2).all(|w| w[1] >= w[0] - slack(w[0]));
    let ratios: Vec<f64> = values.iter().zip(grid).map(|(v, t)| v / t).collect();
    let ratio_down = ratios.windows(2).all(|w| w[1] <= w[0] + slack(w[0]));
    Ok(increasing && ratio_down)
}

/// Logarithmically spaced grid on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|k| (a + (b - a) * k as f64 / (count - 1) as f64).exp())
        .collect()
}

/// Parameters of `φ(d) = d^α (1 − log d)^β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochWeight {
    pub alpha: f64,
    pub beta: f64,
}

impl BlochWeight {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0) || !beta.is_finite() {
            return Err(LabError::Configuration(format!("invalid Bloch weight α={alpha}, β={beta}")));
        }
        Ok(Self { alpha, beta })
    }

    pub fn beta_le_alpha(&self) -> bool {
        self.beta <= self.alpha
    }
}

/// `φ` at boundary distance `d ∈ (0, 1]`.
pub fn phi(weight: &BlochWeight, d: f64) -> Result<f64> {
    if !(d > 0.0 && d <= 1.0) {
        return Err(LabError::domain(format!("boundary distance {d} outside (0, 1]")));
    }
    Ok(d.powf(weight.alpha) * (1.0 - d.ln()).powf(weight.beta))
}

/// Radius view `φ_r(r) = φ(1 − r)` for `r ∈ [0, 1)`.
pub fn phi_radius(weight: &BlochWeight, r: f64) -> Result<f64> {
    phi(weight, 1.0 - r)
}

/// Whether `r ↦ φ_r(r)` and `r ↦ φ_r(r)/ω(φ_r(r))` are non-increasing on the
/// increasing radius grid.
pub fn check_phi_monotone(weight: &BlochWeight, omega: &Majorant, grid: &[f64]) -> Result<bool> {
    let tgrid = log_grid(1e-6, 1.0, 200);
    if !validate_majorant(omega, &tgrid)? {
        return Err(LabError::Configuration(format!("{} is not a majorant", omega.label())));
    }
    let mut prev: Option<(f64, f64)> = None;
    for &r in grid {
        let p = phi_radius(weight, r)?;
        let q = p / omega.eval(p);
        if let Some((p0, q0)) = prev {
            if p > p0 * (1.0 + 1e-12) || q > q0 * (1.0 + 1e-12) {
                return Ok(false);
            }
        }
        prev = Some((p, q));
    }
    Ok(true)
}
