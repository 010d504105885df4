//! Benchmark instances: the four-dimensional quadratic operator, the
//! arctan-plus-tridiagonal operator, and projection problems with a known
//! solution, all over seeded random ellipsoids.

mod ellipsoid;
mod instance;
mod operators;

use std::sync::Arc;

pub use ellipsoid::{random_ellipsoid, EllipsoidSpec};
pub use instance::{BuiltInstance, InstanceSpec, ProblemKind, DEFAULT_COND_CAP};
pub use operators::{Example1Operator, Example2Operator, ShiftedIdentity, Tridiagonal};

use crate::error::{Error, Result};
use crate::model::{VIProblem, Vector};
use crate::projections::project_ellipsoid;

/// The four-dimensional quadratic operator over an ellipsoid.
pub fn example1(spec: &EllipsoidSpec) -> Result<VIProblem> {
    if spec.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, got: spec.dim() });
    }
    let slater = spec.center.clone();
    VIProblem::new(Arc::new(Example1Operator), Arc::new(spec.clone()))?.with_slater_point(slater)
}

/// `A(x) = arctan(x) + M x + e` over an ellipsoid in `R^n`.
pub fn example2(n: usize, spec: &EllipsoidSpec) -> Result<VIProblem> {
    if n < 2 {
        return Err(Error::InvalidProblem(format!("dimension must be at least 2, got {n}")));
    }
    if spec.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: spec.dim() });
    }
    let slater = spec.center.clone();
    VIProblem::new(Arc::new(Example2Operator::new(n)), Arc::new(spec.clone()))?
        .with_slater_point(slater)
}

/// `A(x) = x - p` over an ellipsoid; the solution is the projection of `p`.
pub fn projection_problem(spec: &EllipsoidSpec, p: &Vector) -> Result<VIProblem> {
    if p.len() != spec.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), got: p.len() });
    }
    let solution = project_ellipsoid(&spec.matrix, &spec.center, spec.u, p)?;
    let slater = spec.center.clone();
    VIProblem::new(Arc::new(ShiftedIdentity::new(p.clone())), Arc::new(spec.clone()))?
        .with_slater_point(slater)?
        .with_known_solution(solution)
}
