//! Unit-ball and rasterized planar domains, boundary distance and the
//! distance-ratio / quasihyperbolic metrics.

mod grid;
mod metrics;

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

pub use grid::{GridDomain, PolygonSet};
pub use metrics::{
    ball_quasihyperbolic, distance_ratio, grid_quasihyperbolic_from, j_metric, k_metric, rasterize_disk_image,
    weak_uniform_bound_constant, PairSample, Quasihyperbolic, WeakUniformReport,
};

/// A point of `R^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn origin(n: usize) -> Self {
        Point(vec![0.0; n])
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }
}

impl Deref for Point {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(v)
    }
}

pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|c| c * c).sum::<f64>().sqrt()
}

pub fn dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// A proper subdomain of `R^n` with a computable boundary distance.
pub trait Domain: Send + Sync {
    fn dimension(&self) -> usize;

    /// Euclidean distance from an interior point to the boundary.
    fn boundary_distance(&self, x: &[f64]) -> Result<f64>;
}

/// The open unit ball `B^n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallDomain {
    dimension: usize,
}

impl BallDomain {
    pub fn new(dimension: usize) -> Result<Self> {
        if dimension < 2 {
            return Err(LabError::domain(format!(
                "ball dimension must be at least 2, got {dimension}"
            )));
        }
        Ok(Self { dimension })
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dimension && norm(x) < 1.0
    }
}

impl Domain for BallDomain {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn boundary_distance(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dimension {
            return Err(LabError::domain(format!(
                "point has {} coordinates, ball has dimension {}",
                x.len(),
                self.dimension
            )));
        }
        if x.iter().any(|c| !c.is_finite()) {
            return Err(LabError::domain("non-finite coordinate"));
        }
        let d = 1.0 - norm(x);
        if d <= 0.0 {
            return Err(LabError::domain(format!("point {x:?} is not interior to the unit ball")));
        }
        Ok(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_boundary_distance() {
        let b2 = BallDomain::new(2).unwrap();
        let b3 = BallDomain::new(3).unwrap();
        assert_eq!(b2.boundary_distance(&[0.0, 0.0]).unwrap(), 1.0);
        assert_eq!(b3.boundary_distance(&[0.5, 0.0, 0.0]).unwrap(), 0.5);
        assert!(matches!(b2.boundary_distance(&[1.0, 0.0]), Err(LabError::Domain(_))));
        assert!(b2.boundary_distance(&[0.8, 0.8]).is_err());
        assert!(BallDomain::new(1).is_err());
    }
}
