//! Closed-form projection onto a ball, and a Lagrange-multiplier projection
//! onto an ellipsoid `{x : (x - t)' T (x - t) <= u^2}` used as an oracle.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::conjugate_gradient;
use crate::model::{MovingBall, Vector};

const CENTER_GUARD: f64 = 1e-300;

/// Above this dimension the ellipsoid oracle switches from Cholesky to CG.
pub const DIRECT_SOLVE_MAX_DIM: usize = 64;

const BRACKET_MAX_ITER: usize = 200;
const ROOT_MAX_ITER: usize = 500;

/// Metric projection of `z` onto `ball`.
pub fn project_ball(ball: &MovingBall, z: &Vector) -> Vector {
    let offset = z - &ball.center;
    let dist = offset.norm();
    if dist <= ball.radius {
        return z.clone();
    }
    if dist <= CENTER_GUARD {
        // Only reachable with radius == 0.
        return ball.center.clone();
    }
    // Rounding can leave the scaled point a few ulps outside; pull it in so that the
    // result passes the interior test above and projecting again is the identity.
    let mut scale = ball.radius / dist;
    let mut p = &ball.center + &offset * scale;
    let mut shrink = 2.0 * f64::EPSILON;
    while (&p - &ball.center).norm() > ball.radius && shrink < 1.0 {
        scale *= 1.0 - shrink;
        shrink *= 2.0;
        p = &ball.center + &offset * scale;
    }
    p
}

/// Euclidean projection of `z` onto the ellipsoid `(x - t)' T (x - t) <= u^2`.
///
/// Solves for the multiplier `nu >= 0` with `x(nu) = (I + nu T)^-1 (z + nu T t)` on the
/// boundary, using Newton steps safeguarded by a bisection bracket.
pub fn project_ellipsoid(t_mat: &DMatrix<f64>, t: &Vector, u: f64, z: &Vector) -> Result<Vector> {
    let n = t.len();
    if t_mat.nrows() != n || t_mat.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: t_mat.nrows() });
    }
    if z.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: z.len() });
    }
    if !(u > 0.0) {
        return Err(Error::InvalidProblem(format!("ellipsoid radius must be positive, got {u}")));
    }
    let w = z - t;
    let u_sq = u * u;
    let level = |v: &DVector<f64>| v.dot(&(t_mat * v));
    if level(&w) <= u_sq {
        return Ok(z.clone());
    }

    let solver = ShiftedSolver::new(t_mat);
    // phi(nu) = v' T v - u^2 with v = (I + nu T)^-1 w; convex and decreasing on nu >= 0.
    let phi = |nu: f64| -> Result<(f64, DVector<f64>)> {
        let v = solver.solve(nu, &w)?;
        Ok((level(&v) - u_sq, v))
    };

    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut bracketed = false;
    for _ in 0..BRACKET_MAX_ITER {
        let (value, _) = phi(hi)?;
        if value <= 0.0 {
            bracketed = true;
            break;
        }
        lo = hi;
        hi *= 2.0;
    }
    if !bracketed {
        return Err(Error::IllConditioned(format!(
            "multiplier not bracketed after {BRACKET_MAX_ITER} doublings"
        )));
    }

    let tol = 1e-12 * u_sq;
    let mut nu = lo;
    for _ in 0..ROOT_MAX_ITER {
        let (value, v) = phi(nu)?;
        if value > 0.0 {
            lo = nu;
        } else {
            hi = nu;
        }
        // phi'(nu) = -2 v' T (I + nu T)^-1 T v
        let tv = t_mat * &v;
        let s = solver.solve(nu, &tv)?;
        let slope = -2.0 * tv.dot(&s);
        let newton = if slope < 0.0 { nu - value / slope } else { f64::NAN };
        if value.abs() <= tol {
            // One polishing Newton step takes the residual to rounding level.
            if newton.is_finite() && newton >= lo && newton <= hi {
                let (polished, pv) = phi(newton)?;
                if polished.abs() < value.abs() {
                    return Ok(t + pv);
                }
            }
            return Ok(t + v);
        }
        nu = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= f64::EPSILON * hi {
            let (_, v) = phi(nu)?;
            return Ok(t + v);
        }
    }
    Err(Error::IllConditioned(format!(
        "multiplier root find did not converge in {ROOT_MAX_ITER} iterations"
    )))
}

/// Applies `(I + nu T)^-1`, directly for small systems and by CG otherwise.
struct ShiftedSolver<'a> {
    t_mat: &'a DMatrix<f64>,
}

impl<'a> ShiftedSolver<'a> {
    fn new(t_mat: &'a DMatrix<f64>) -> Self {
        Self { t_mat }
    }

    fn solve(&self, nu: f64, rhs: &DVector<f64>) -> Result<DVector<f64>> {
        let n = rhs.len();
        if n <= DIRECT_SOLVE_MAX_DIM {
            let shifted = DMatrix::identity(n, n) + self.t_mat * nu;
            let chol = shifted
                .cholesky()
                .ok_or_else(|| Error::IllConditioned("I + nu T is not positive definite".into()))?;
            Ok(chol.solve(rhs))
        } else {
            let (x, converged) = conjugate_gradient(
                |v| v + (self.t_mat * v) * nu,
                rhs,
                1e-15,
                10 * n,
            );
            if !converged {
                // CG stagnates at rounding level for large nu; accept if the residual is small
                // relative to the operator scale.
                let residual = (&x + (self.t_mat * &x) * nu - rhs).norm();
                if residual > 1e-12 * (1.0 + nu * self.t_mat.norm()) * rhs.norm() {
                    return Err(Error::IllConditioned(format!(
                        "CG residual {residual:e} at nu = {nu:e}"
                    )));
                }
            }
            Ok(x)
        }
    }
}
