//! Moving-ball projection-contraction solver for pseudo-monotone variational
//! inequalities over smooth convex sets `C = {x : f(x) <= 0}`.
//!
//! Every projection the solver performs is onto a ball that is built from
//! `f`, `grad f` and the gradient Lipschitz constant at the current iterate,
//! and that ball always lies inside `C`. The step size is found by a
//! backtracking line search, so the Lipschitz constant of the cost operator
//! never has to be known.
//!
//! Layout:
//! - [`model`]: cost operators, smooth constraints, problems and the moving ball.
//! - [`projections`]: closed-form ball projection and an ellipsoid projection oracle.
//! - [`solver`]: the line search, the contraction step and the solve loop.
//! - [`problems`]: benchmark instances and seeded ellipsoid generation.
//! - [`verify`]: KKT certificates and trace audits, independent of the solver.
//! - [`trace`]: plain-text trace and iterate files.

// Negated comparisons are used on purpose so that NaN fails every check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod linalg;
pub mod model;
pub mod problems;
pub mod projections;
pub mod solver;
pub mod trace;
pub mod verify;

pub use error::{Error, Result};
pub use model::{
    is_feasible, moving_ball, BallConstraint, CostOperator, FnOperator, MovingBall,
    SmoothConstraint, VIProblem, Vector, DEFAULT_FEAS_TOL,
};
pub use projections::{project_ball, project_ellipsoid};
pub use solver::{
    line_search, solve, solve_with_observer, step, IterateRecord, LineSearchResult, SolveReport,
    SolveStatus, SolverConfig, StepMode, StepOutcome,
};
pub use verify::{audit_trace, kkt_certificate, AuditCheck, AuditReport, Certificate, CertificateKind};
