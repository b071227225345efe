//! Numerical laboratory for Yukawa-type equations `Δu = λ(x)|u|^{τ-1}u` on the
//! unit ball.
//!
//! The crate solves the equation from boundary data through its Poisson/Green
//! integral representation, evaluates the function-space functionals built on
//! top of the solutions (integral means, Hardy and Bloch-type norms,
//! oscillation means, Dirichlet-type energies, distance-ratio and
//! quasihyperbolic metrics) and checks the associated inequalities and
//! subharmonicity statements numerically, producing structured [`verifier::Verdict`]s.

pub mod config;
pub mod error;
pub mod fields;
pub mod functionals;
pub mod geometry;
pub mod majorants;
pub mod quadrature;
pub mod report;
pub mod sampling;
pub mod solver;
pub mod special;
pub mod verifier;

pub use error::{LabError, Result};
pub use fields::{ScalarField, VectorField};
pub use geometry::{BallDomain, GridDomain, Point};
pub use majorants::{BlochWeight, Majorant};
pub use verifier::{Verdict, VerdictStatus};


