//! Problem data: the cost operator `A`, the constraint function `f` whose
//! zero sublevel set is the feasible set, and the moving ball built from `f`.

use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::verify::{kkt_certificate, CertificateKind};

pub type Vector = DVector<f64>;

/// Default tolerance on `f(x)` for a point to count as feasible.
pub const DEFAULT_FEAS_TOL: f64 = 1e-12;

/// Rounding slack on the squared radius; anything below this is an infeasible base point.
const RADIUS_SQ_CLAMP: f64 = 1e-14;

/// The cost operator `A : R^n -> R^n`. Evaluations must be pure.
pub trait CostOperator: Send + Sync {
    fn dim(&self) -> usize;
    fn eval(&self, x: &Vector) -> Vector;
}

/// A convex, continuously differentiable `f` with `L_f`-Lipschitz gradient.
pub trait SmoothConstraint: Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &Vector) -> f64;
    fn gradient(&self, x: &Vector) -> Vector;
    /// Lipschitz constant of the gradient. Overestimates are safe: they shrink the ball.
    fn lipschitz_grad(&self) -> f64;

    fn value_and_gradient(&self, x: &Vector) -> (f64, Vector) {
        (self.value(x), self.gradient(x))
    }
}

/// Wraps a closure as a [`CostOperator`].
pub struct FnOperator<F> {
    dim: usize,
    f: F,
}

impl<F> FnOperator<F>
where
    F: Fn(&Vector) -> Vector + Send + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F> CostOperator for FnOperator<F>
where
    F: Fn(&Vector) -> Vector + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &Vector) -> Vector {
        (self.f)(x)
    }
}

/// `f(x) = (|x - c|^2 - r^2) / 2`, a Euclidean ball with `L_f = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BallConstraint {
    pub center: Vector,
    pub radius: f64,
}

impl BallConstraint {
    pub fn new(center: Vector, radius: f64) -> Self {
        Self { center, radius }
    }

    pub fn unit(dim: usize) -> Self {
        Self::new(Vector::zeros(dim), 1.0)
    }
}

impl SmoothConstraint for BallConstraint {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn value(&self, x: &Vector) -> f64 {
        0.5 * ((x - &self.center).norm_squared() - self.radius * self.radius)
    }

    fn gradient(&self, x: &Vector) -> Vector {
        x - &self.center
    }

    fn lipschitz_grad(&self) -> f64 {
        1.0
    }
}

/// A variational inequality: find `x*` in `C` with `<A(x*), y - x*> >= 0` for all `y` in `C`.
#[derive(Clone)]
pub struct VIProblem {
    pub operator: Arc<dyn CostOperator>,
    pub constraint: Arc<dyn SmoothConstraint>,
    known_solution: Option<Vector>,
    slater_point: Option<Vector>,
}

impl fmt::Debug for VIProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VIProblem")
            .field("dim", &self.dim())
            .field("lipschitz_grad", &self.constraint.lipschitz_grad())
            .field("known_solution", &self.known_solution)
            .field("slater_point", &self.slater_point)
            .finish()
    }
}

impl VIProblem {
    pub fn new(
        operator: Arc<dyn CostOperator>,
        constraint: Arc<dyn SmoothConstraint>,
    ) -> Result<Self> {
        if operator.dim() != constraint.dim() {
            return Err(Error::DimensionMismatch {
                expected: constraint.dim(),
                got: operator.dim(),
            });
        }
        if operator.dim() == 0 {
            return Err(Error::InvalidProblem("dimension must be positive".into()));
        }
        let lf = constraint.lipschitz_grad();
        if !(lf.is_finite() && lf > 0.0) {
            return Err(Error::InvalidProblem(format!(
                "gradient Lipschitz constant must be positive, got {lf}"
            )));
        }
        Ok(Self {
            operator,
            constraint,
            known_solution: None,
            slater_point: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.operator.dim()
    }

    /// Attaches a strictly feasible point; rejects points with `f >= 0`.
    pub fn with_slater_point(mut self, point: Vector) -> Result<Self> {
        self.check_dim(&point)?;
        let value = self.constraint.value(&point);
        if !(value < 0.0) {
            return Err(Error::InvalidProblem(format!(
                "Slater point must satisfy f < 0, got f = {value:e}"
            )));
        }
        self.slater_point = Some(point);
        Ok(self)
    }

    /// Attaches a known solution after certifying it at tolerance `1e-8`.
    pub fn with_known_solution(mut self, solution: Vector) -> Result<Self> {
        self.check_dim(&solution)?;
        let cert = kkt_certificate(&self, &solution, 1e-8)?;
        if cert.kind == CertificateKind::Failed {
            return Err(Error::InvalidProblem(format!(
                "known solution fails the KKT certificate (residual {:e})",
                cert.residual
            )));
        }
        self.known_solution = Some(solution);
        Ok(self)
    }

    pub fn known_solution(&self) -> Option<&Vector> {
        self.known_solution.as_ref()
    }

    pub fn slater_point(&self) -> Option<&Vector> {
        self.slater_point.as_ref()
    }

    pub(crate) fn check_dim(&self, x: &Vector) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }
}

/// The ball `{y : f(x) + <grad f(x), y - x> + L_f/2 |y - x|^2 <= 0}`, which lies inside `C`
/// whenever `x` does.
#[derive(Debug, Clone, PartialEq)]
pub struct MovingBall {
    pub center: Vector,
    pub radius: f64,
}

impl MovingBall {
    pub fn contains(&self, y: &Vector, tol: f64) -> bool {
        (y - &self.center).norm() <= self.radius + tol
    }
}

/// Builds the moving ball anchored at a feasible `x`.
pub fn moving_ball(
    constraint: &dyn SmoothConstraint,
    x: &Vector,
    feas_tol: f64,
) -> Result<MovingBall> {
    let (value, grad) = constraint.value_and_gradient(x);
    moving_ball_from_parts(constraint.lipschitz_grad(), x, value, &grad, feas_tol)
}

pub(crate) fn moving_ball_from_parts(
    lipschitz: f64,
    x: &Vector,
    value: f64,
    grad: &Vector,
    feas_tol: f64,
) -> Result<MovingBall> {
    if !value.is_finite() {
        return Err(Error::NonFinite("constraint value"));
    }
    if value > feas_tol {
        return Err(Error::InfeasibleBasePoint { value });
    }
    let mut radius_sq = (grad.norm_squared() / lipschitz - 2.0 * value) / lipschitz;
    if radius_sq < 0.0 {
        if radius_sq < -RADIUS_SQ_CLAMP {
            return Err(Error::InfeasibleBasePoint { value });
        }
        radius_sq = 0.0;
    }
    let center = x - grad / lipschitz;
    Ok(MovingBall {
        center,
        radius: radius_sq.sqrt(),
    })
}

pub fn is_feasible(constraint: &dyn SmoothConstraint, x: &Vector, tol: f64) -> bool {
    constraint.value(x) <= tol
}
