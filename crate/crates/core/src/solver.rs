//! The moving-ball projection-contraction method.
//!
//! Each outer iteration at a feasible `x`:
//! 1. builds the moving ball `B(x)` (inside `C`),
//! 2. backtracks `lambda = sigma * delta^k` until `y = P_B(x - lambda A(x))` satisfies
//!    `lambda |A(x) - A(y)| <= mu |x - y|`,
//! 3. stops if `|x - y| <= e_tol`, otherwise forms `d = x - y - lambda (A(x) - A(y))`,
//!    `rho = <x - y, d> / |d|^2` and moves to `P_B(x - gamma lambda rho A(y))`.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::model::{moving_ball_from_parts, MovingBall, VIProblem, Vector, DEFAULT_FEAS_TOL};
use crate::projections::project_ball;

const DEGENERATE_DIRECTION: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepMode {
    /// Backtracking line search on `sigma * delta^k`.
    Adaptive,
    /// Constant step `tau`, no line search.
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub mu: f64,
    pub delta: f64,
    pub sigma: f64,
    pub gamma: f64,
    /// Stopping threshold on `E_n = |x_n - y_n|`.
    pub e_tol: f64,
    pub max_iter: usize,
    pub max_backtracks: usize,
    pub step_mode: StepMode,
    pub feas_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            mu: 0.01,
            delta: 0.0005,
            sigma: 7.0,
            gamma: 0.99,
            e_tol: 1e-12,
            max_iter: 20_000,
            max_backtracks: 120,
            step_mode: StepMode::Adaptive,
            feas_tol: DEFAULT_FEAS_TOL,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let open_unit = |v: f64| v > 0.0 && v < 1.0;
        if !open_unit(self.mu) {
            return Err(Error::InvalidConfig(format!("mu must lie in (0, 1), got {}", self.mu)));
        }
        if !open_unit(self.delta) {
            return Err(Error::InvalidConfig(format!("delta must lie in (0, 1), got {}", self.delta)));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidConfig(format!("sigma must be positive, got {}", self.sigma)));
        }
        if !(self.gamma > 0.0 && self.gamma < 2.0) {
            return Err(Error::InvalidConfig(format!("gamma must lie in (0, 2), got {}", self.gamma)));
        }
        if !(self.e_tol > 0.0) {
            return Err(Error::InvalidConfig(format!("e_tol must be positive, got {}", self.e_tol)));
        }
        if self.max_iter == 0 || self.max_backtracks == 0 {
            return Err(Error::InvalidConfig("iteration caps must be positive".into()));
        }
        if !(self.feas_tol >= 0.0) {
            return Err(Error::InvalidConfig(format!("feas_tol must be nonnegative, got {}", self.feas_tol)));
        }
        if let StepMode::Fixed(tau) = self.step_mode {
            if !(tau > 0.0 && tau.is_finite()) {
                return Err(Error::InvalidConfig(format!("fixed step must be positive, got {tau}")));
            }
        }
        Ok(())
    }

    /// Lower bound on `rho_n` guaranteed by the line-search test: `(1 - mu) / (1 + mu)^2`.
    pub fn rho_lower_bound(&self) -> f64 {
        (1.0 - self.mu) / ((1.0 + self.mu) * (1.0 + self.mu))
    }
}

/// Per-iteration diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct IterateRecord {
    pub n: usize,
    /// `E_n = |x_n - y_n|`.
    pub e_n: f64,
    pub lambda_n: f64,
    /// Zero when `d_n = 0`.
    pub rho_n: f64,
    pub d_norm: f64,
    pub f_x: f64,
    pub backtracks: usize,
    /// Wall time since the start of the solve.
    pub elapsed: Duration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    /// `E_n <= e_tol` with `E_n > 0`.
    Converged,
    MaxIterations,
    /// `x_n = y_n` exactly.
    StationaryOperator,
    LineSearchFailed,
}

impl SolveStatus {
    pub fn is_success(self) -> bool {
        matches!(self, SolveStatus::Converged | SolveStatus::StationaryOperator)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Converged => "Converged",
            SolveStatus::MaxIterations => "MaxIterations",
            SolveStatus::StationaryOperator => "StationaryOperator",
            SolveStatus::LineSearchFailed => "LineSearchFailed",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub solution: Vector,
    pub iterations: usize,
    pub trace: Vec<IterateRecord>,
    pub op_evals: usize,
    pub elapsed: Duration,
}

impl SolveReport {
    pub fn final_e_n(&self) -> Option<f64> {
        self.trace.last().map(|r| r.e_n)
    }
}

#[derive(Debug, Clone)]
pub struct LineSearchResult {
    pub lambda: f64,
    pub y: Vector,
    pub backtracks: usize,
    /// `A(y)` at the accepted trial.
    pub ay: Vector,
    pub op_evals: usize,
}

/// Backtracking search for `lambda_n` and `y_n` at a feasible `x`.
pub fn line_search(problem: &VIProblem, x: &Vector, cfg: &SolverConfig) -> Result<LineSearchResult> {
    problem.check_dim(x)?;
    let (value, grad) = problem.constraint.value_and_gradient(x);
    let ball = moving_ball_from_parts(problem.constraint.lipschitz_grad(), x, value, &grad, cfg.feas_tol)?;
    let ax = problem.operator.eval(x);
    let mut out = search_on_ball(problem, x, &ax, &ball, cfg)?;
    out.op_evals += 1;
    Ok(out)
}

fn search_on_ball(
    problem: &VIProblem,
    x: &Vector,
    ax: &Vector,
    ball: &MovingBall,
    cfg: &SolverConfig,
) -> Result<LineSearchResult> {
    let mut lambda = cfg.sigma;
    for k in 0..=cfg.max_backtracks {
        // y depends on lambda through the projection, so it is recomputed per trial;
        // the ball depends only on x.
        let y = project_ball(ball, &(x - ax * lambda));
        let ay = problem.operator.eval(&y);
        let op_evals = k + 1;
        let lhs = lambda * (ax - &ay).norm();
        let rhs = cfg.mu * (x - &y).norm();
        if lhs <= rhs {
            return Ok(LineSearchResult { lambda, y, backtracks: k, ay, op_evals });
        }
        if !lhs.is_finite() {
            return Err(Error::NonFinite("operator value in line search"));
        }
        lambda *= cfg.delta;
    }
    Err(Error::LineSearchFailed { backtracks: cfg.max_backtracks })
}

/// Result of one outer iteration.
#[derive(Debug, Clone)]
pub enum StepOutcome {
    Advanced {
        x_next: Vector,
        record: IterateRecord,
        op_evals: usize,
    },
    /// `|x - y| <= e_tol`; `y` is returned as the solution.
    Stationary {
        y: Vector,
        record: IterateRecord,
        op_evals: usize,
    },
}

impl StepOutcome {
    pub fn record(&self) -> &IterateRecord {
        match self {
            StepOutcome::Advanced { record, .. } | StepOutcome::Stationary { record, .. } => record,
        }
    }
}

/// One iteration from a feasible `x`. The record's `n` is zero and `elapsed` is the time
/// spent in this step; [`solve`] rewrites both.
pub fn step(problem: &VIProblem, x: &Vector, cfg: &SolverConfig) -> Result<StepOutcome> {
    let started = Instant::now();
    problem.check_dim(x)?;
    let (f_x, grad) = problem.constraint.value_and_gradient(x);
    let ball = moving_ball_from_parts(problem.constraint.lipschitz_grad(), x, f_x, &grad, cfg.feas_tol)?;
    let ax = problem.operator.eval(x);
    if ax.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("operator value"));
    }

    let search = match cfg.step_mode {
        StepMode::Adaptive => search_on_ball(problem, x, &ax, &ball, cfg)?,
        StepMode::Fixed(tau) => {
            let y = project_ball(&ball, &(x - &ax * tau));
            let ay = problem.operator.eval(&y);
            LineSearchResult { lambda: tau, y, backtracks: 0, ay, op_evals: 1 }
        }
    };
    let op_evals = search.op_evals + 1;
    let LineSearchResult { lambda, y, backtracks, ay, .. } = search;

    let diff = x - &y;
    let e_n = diff.norm();
    let d = &diff - (&ax - &ay) * lambda;
    let d_sq = d.norm_squared();
    let d_norm = d_sq.sqrt();
    let rho = if d_norm > 0.0 { diff.dot(&d) / d_sq } else { 0.0 };

    let mut record = IterateRecord {
        n: 0,
        e_n,
        lambda_n: lambda,
        rho_n: rho,
        d_norm,
        f_x,
        backtracks,
        elapsed: Duration::ZERO,
    };

    if e_n <= cfg.e_tol {
        record.elapsed = started.elapsed();
        return Ok(StepOutcome::Stationary { y, record, op_evals });
    }
    if d_norm <= DEGENERATE_DIRECTION {
        return Err(Error::DegenerateDirection { d_norm, e_n });
    }

    let x_next = project_ball(&ball, &(x - &ay * (cfg.gamma * lambda * rho)));
    record.elapsed = started.elapsed();
    Ok(StepOutcome::Advanced { x_next, record, op_evals })
}

/// Runs the method from a feasible `x1`.
pub fn solve(problem: &VIProblem, x1: &Vector, cfg: &SolverConfig) -> Result<SolveReport> {
    solve_with_observer(problem, x1, cfg, |_, _| {})
}

/// Like [`solve`], calling `observer(record, x_n)` after every completed iteration.
pub fn solve_with_observer<F>(
    problem: &VIProblem,
    x1: &Vector,
    cfg: &SolverConfig,
    mut observer: F,
) -> Result<SolveReport>
where
    F: FnMut(&IterateRecord, &Vector),
{
    cfg.validate()?;
    problem.check_dim(x1)?;
    if x1.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("starting point"));
    }
    let f1 = problem.constraint.value(x1);
    if !(f1 <= cfg.feas_tol) {
        return Err(Error::InfeasibleStart { value: f1 });
    }

    let started = Instant::now();
    let mut x = x1.clone();
    let mut trace = Vec::new();
    let mut op_evals = 0;

    for n in 1..=cfg.max_iter {
        let outcome = match step(problem, &x, cfg) {
            Ok(outcome) => outcome,
            Err(Error::LineSearchFailed { .. }) => {
                return Ok(SolveReport {
                    status: SolveStatus::LineSearchFailed,
                    solution: x,
                    iterations: trace.len(),
                    trace,
                    op_evals,
                    elapsed: started.elapsed(),
                });
            }
            Err(err) => return Err(err),
        };
        match outcome {
            StepOutcome::Advanced { x_next, mut record, op_evals: evals } => {
                op_evals += evals;
                record.n = n;
                record.elapsed = started.elapsed();
                observer(&record, &x);
                trace.push(record);
                x = x_next;
            }
            StepOutcome::Stationary { y, mut record, op_evals: evals } => {
                op_evals += evals;
                record.n = n;
                record.elapsed = started.elapsed();
                observer(&record, &x);
                let status = if record.e_n == 0.0 {
                    SolveStatus::StationaryOperator
                } else {
                    SolveStatus::Converged
                };
                trace.push(record);
                return Ok(SolveReport {
                    status,
                    solution: y,
                    iterations: n,
                    trace,
                    op_evals,
                    elapsed: started.elapsed(),
                });
            }
        }
    }

    Ok(SolveReport {
        status: SolveStatus::MaxIterations,
        solution: x,
        iterations: cfg.max_iter,
        trace,
        op_evals,
        elapsed: started.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BallConstraint, FnOperator};
    use nalgebra::dvector;
    use std::sync::Arc;

    fn big_ball(dim: usize) -> Arc<BallConstraint> {
        Arc::new(BallConstraint::new(Vector::zeros(dim), 1e6))
    }

    fn linear(dim: usize, slope: f64) -> VIProblem {
        let op = Arc::new(FnOperator::new(dim, move |x: &Vector| x * slope));
        VIProblem::new(op, big_ball(dim)).unwrap()
    }

    /// Smallest `k` with `sigma * delta^k <= mu / slope`, by enumeration.
    fn enumerate_k(cfg: &SolverConfig, slope: f64) -> usize {
        (0..).find(|&k| cfg.sigma * cfg.delta.powi(k as i32) * slope <= cfg.mu).unwrap()
    }

    #[test]
    fn zero_operator_accepts_sigma() {
        let op = Arc::new(FnOperator::new(2, |x: &Vector| Vector::zeros(x.len())));
        let p = VIProblem::new(op, Arc::new(BallConstraint::unit(2))).unwrap();
        let x = dvector![0.2, -0.3];
        let ls = line_search(&p, &x, &SolverConfig::default()).unwrap();
        assert_eq!(ls.backtracks, 0);
        assert_eq!(ls.lambda, 7.0);
        assert_eq!(ls.y, x);
    }

    #[test]
    fn linear_operator_backtracks_to_mu_over_l() {
        let x = dvector![1.0, 2.0, -0.5];
        for (slope, mu, delta, sigma) in [(1.0, 0.01, 0.0005, 7.0), (3.0, 0.3, 0.5, 2.0), (40.0, 0.1, 0.7, 1.0)] {
            let cfg = SolverConfig { mu, delta, sigma, ..SolverConfig::default() };
            let ls = line_search(&linear(3, slope), &x, &cfg).unwrap();
            let k = enumerate_k(&cfg, slope);
            assert_eq!(ls.backtracks, k, "slope {slope}");
            let expected = sigma * delta.powi(k as i32);
            assert!((ls.lambda - expected).abs() <= 1e-14 * expected);
        }
    }

    #[test]
    fn default_parameters_with_unit_slope_take_one_backtrack() {
        let ls = line_search(&linear(2, 1.0), &dvector![0.3, 0.1], &SolverConfig::default()).unwrap();
        assert_eq!(ls.backtracks, 1);
        assert!((ls.lambda - 0.0035).abs() < 1e-18);
    }

    #[test]
    fn constant_operator_gives_unit_rho() {
        let op = Arc::new(FnOperator::new(2, |_: &Vector| dvector![1.0, -0.5]));
        let p = VIProblem::new(op, Arc::new(BallConstraint::unit(2))).unwrap();
        let StepOutcome::Advanced { record, .. } = step(&p, &dvector![0.0, 0.0], &SolverConfig::default()).unwrap() else {
            panic!("expected a step");
        };
        assert!((record.rho_n - 1.0).abs() < 1e-14);
        assert!((record.d_norm - record.e_n).abs() < 1e-15);
    }

    #[test]
    fn accepted_steps_respect_rho_and_d_bounds() {
        let op = Arc::new(FnOperator::new(2, |x: &Vector| {
            dvector![3.0 * x[0] + x[1] * x[1] - 1.0, -x[0] + 2.0 * x[1] + 0.5]
        }));
        let p = VIProblem::new(op, Arc::new(BallConstraint::unit(2))).unwrap();
        let cfg = SolverConfig::default();
        let mut x = dvector![0.0, 0.0];
        for _ in 0..50 {
            match step(&p, &x, &cfg).unwrap() {
                StepOutcome::Advanced { x_next, record, .. } => {
                    assert!(record.rho_n >= cfg.rho_lower_bound() - 1e-12);
                    assert!(record.d_norm >= (1.0 - cfg.mu) * record.e_n - 1e-12);
                    assert!(record.lambda_n <= cfg.sigma);
                    x = x_next;
                }
                StepOutcome::Stationary { .. } => break,
            }
        }
    }

    #[test]
    fn line_search_failure_is_reported() {
        let p = linear(2, 1.0);
        let cfg = SolverConfig { max_backtracks: 1, delta: 0.9, ..SolverConfig::default() };
        let err = line_search(&p, &dvector![1.0, 1.0], &cfg).unwrap_err();
        assert_eq!(err, Error::LineSearchFailed { backtracks: 1 });
        let report = solve(&p, &dvector![1.0, 1.0], &cfg).unwrap();
        assert_eq!(report.status, SolveStatus::LineSearchFailed);
        assert!(report.trace.is_empty());
    }

    #[test]
    fn infeasible_start_is_an_error() {
        let op = Arc::new(FnOperator::new(2, |x: &Vector| x.clone()));
        let p = VIProblem::new(op, Arc::new(BallConstraint::unit(2))).unwrap();
        let err = solve(&p, &dvector![2.0, 0.0], &SolverConfig::default()).unwrap_err();
        assert!(matches!(err, Error::InfeasibleStart { .. }));
    }

    #[test]
    fn exact_zero_operator_is_stationary_immediately() {
        let op = Arc::new(FnOperator::new(2, |x: &Vector| Vector::zeros(x.len())));
        let p = VIProblem::new(op, Arc::new(BallConstraint::unit(2))).unwrap();
        let report = solve(&p, &dvector![0.1, 0.1], &SolverConfig::default()).unwrap();
        assert_eq!(report.status, SolveStatus::StationaryOperator);
        assert_eq!(report.iterations, 1);
        assert_eq!(report.trace.len(), 1);
    }

    #[test]
    fn interior_fixed_point() {
        let target = dvector![0.2, -0.1];
        let pt = target.clone();
        let op = Arc::new(FnOperator::new(2, move |x: &Vector| x - &pt));
        let p = VIProblem::new(op, Arc::new(BallConstraint::unit(2))).unwrap();
        let cfg = SolverConfig { sigma: 0.5, delta: 0.5, mu: 0.6, ..SolverConfig::default() };
        let report = solve(&p, &dvector![0.0, 0.0], &cfg).unwrap();
        assert_eq!(report.status, SolveStatus::Converged);
        assert!(p.operator.eval(&report.solution).norm() <= 10.0 * cfg.e_tol);
        assert!((report.solution - target).norm() < 1e-11);
    }

    #[test]
    fn boundary_projection_solution() {
        let op = Arc::new(FnOperator::new(2, |x: &Vector| x - dvector![2.0, 0.0]));
        let p = VIProblem::new(op, Arc::new(BallConstraint::unit(2))).unwrap();
        let report = solve(&p, &dvector![0.0, 0.5], &SolverConfig::default()).unwrap();
        assert_eq!(report.status, SolveStatus::Converged, "{:?}", report.final_e_n());
        assert!((report.solution - dvector![1.0, 0.0]).norm() < 1e-9);
    }

    #[test]
    fn fixed_step_mode_uses_tau() {
        let op = Arc::new(FnOperator::new(2, |x: &Vector| x - dvector![0.3, 0.3]));
        let p = VIProblem::new(op, Arc::new(BallConstraint::unit(2))).unwrap();
        let cfg = SolverConfig { step_mode: StepMode::Fixed(0.5), ..SolverConfig::default() };
        let report = solve(&p, &dvector![0.0, 0.0], &cfg).unwrap();
        assert_eq!(report.status, SolveStatus::Converged);
        assert!(report.trace.iter().all(|r| r.lambda_n == 0.5 && r.backtracks == 0));
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        for bad in [
            SolverConfig { mu: 1.0, ..SolverConfig::default() },
            SolverConfig { delta: 0.0, ..SolverConfig::default() },
            SolverConfig { sigma: -1.0, ..SolverConfig::default() },
            SolverConfig { gamma: 2.0, ..SolverConfig::default() },
            SolverConfig { step_mode: StepMode::Fixed(0.0), ..SolverConfig::default() },
        ] {
            assert!(bad.validate().is_err());
        }
        assert!((SolverConfig::default().rho_lower_bound() - 0.970_493_088_912_851_7).abs() < 1e-15);
    }
}
