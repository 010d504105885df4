//! Solution certificates and trace audits.
//!
//! Nothing here calls into the solver: certificates are computed from the
//! operator and the constraint alone, and audits work on recorded scalars.

use std::fmt;

use crate::error::{Error, Result};
use crate::model::{VIProblem, Vector};
use crate::solver::{IterateRecord, SolverConfig, StepMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertificateKind {
    /// `A(x) = 0`.
    InteriorStationary,
    /// `f(x) = 0` and `A(x) = -eta grad f(x)` with `eta > 0`.
    BoundaryKKT,
    Failed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub kind: CertificateKind,
    /// Multiplier; zero unless `kind` is `BoundaryKKT`.
    pub eta: f64,
    pub residual: f64,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        self.kind != CertificateKind::Failed
    }
}

/// Checks the first-order characterization of a solution: either `A(x) = 0`, or `x` is on
/// the boundary and `A(x)` is a positive multiple of `-grad f(x)`.
///
/// Tolerances are relative: `|A(x)| <= tol (1 + |x|)`, `|f(x)| <= tol (1 + |f(slater)|)`,
/// and `|A(x) + eta grad f(x)| <= tol (1 + |A(x)|)` with `eta` the least-squares multiplier.
pub fn kkt_certificate(problem: &VIProblem, x: &Vector, tol: f64) -> Result<Certificate> {
    problem.check_dim(x)?;
    let ax = problem.operator.eval(x);
    let ax_norm = ax.norm();
    let interior_defect = ax_norm / (1.0 + x.norm());
    if interior_defect <= tol {
        return Ok(Certificate {
            kind: CertificateKind::InteriorStationary,
            eta: 0.0,
            residual: ax_norm,
        });
    }

    let value = problem.constraint.value(x);
    let grad = problem.constraint.gradient(x);
    let f_scale = 1.0 + problem.slater_point().map_or(0.0, |s| problem.constraint.value(s).abs());
    let on_boundary = value.abs() <= tol * f_scale;
    let grad_sq = grad.norm_squared();
    if grad_sq.sqrt() <= 1e-300 {
        if value.abs() <= tol {
            return Err(Error::ZeroGradientOnBoundary);
        }
        return Ok(Certificate { kind: CertificateKind::Failed, eta: 0.0, residual: interior_defect });
    }

    let eta = -ax.dot(&grad) / grad_sq;
    let colinearity = (&ax + &grad * eta).norm();
    let boundary_defect = if eta > 0.0 {
        (value.abs() / f_scale).max(colinearity / (1.0 + ax_norm))
    } else {
        f64::INFINITY
    };
    if on_boundary && eta > 0.0 && colinearity <= tol * (1.0 + ax_norm) {
        return Ok(Certificate { kind: CertificateKind::BoundaryKKT, eta, residual: colinearity });
    }
    Ok(Certificate {
        kind: CertificateKind::Failed,
        eta: 0.0,
        residual: interior_defect.min(boundary_defect),
    })
}

/// Slack on the `rho_n` and `|d_n|` lower bounds.
pub const BOUND_SLACK: f64 = 1e-12;
/// Slack on `|x_{n+1} - x*| <= |x_n - x*|`.
pub const FEJER_SLACK: f64 = 1e-10;
/// Slack on the per-step energy decrease.
pub const ENERGY_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct AuditCheck {
    pub name: &'static str,
    pub passed: bool,
    pub checked: usize,
    pub violations: usize,
    /// First violation, or a short note.
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AuditReport {
    pub checks: Vec<AuditCheck>,
}

impl AuditReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&AuditCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("check,passed,checked,violations,detail\n");
        for c in &self.checks {
            out.push_str(&format!(
                "{},{},{},{},\"{}\"\n",
                c.name,
                c.passed,
                c.checked,
                c.violations,
                c.detail.replace('"', "\"\"")
            ));
        }
        out
    }
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{:<18} {}  {}/{} ok  {}",
                c.name,
                if c.passed { "PASS" } else { "FAIL" },
                c.checked - c.violations,
                c.checked,
                c.detail
            )?;
        }
        Ok(())
    }
}

struct Tally {
    name: &'static str,
    checked: usize,
    violations: usize,
    first: Option<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Self { name, checked: 0, violations: 0, first: None }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.violations += 1;
            if self.first.is_none() {
                self.first = Some(describe());
            }
        }
    }

    fn finish(self) -> AuditCheck {
        AuditCheck {
            name: self.name,
            passed: self.violations == 0,
            checked: self.checked,
            violations: self.violations,
            detail: self.first.unwrap_or_default(),
        }
    }
}

/// Audits a trace against the invariants the method guarantees.
///
/// The `rho` and `|d|` bounds follow from the line-search test and are skipped in fixed-step
/// mode. The Fejér and energy checks run only when both a known solution and the iterates
/// `x_1, x_2, ...` (one per record, in order) are supplied.
pub fn audit_trace(
    trace: &[IterateRecord],
    cfg: &SolverConfig,
    known_solution: Option<&Vector>,
    iterates: Option<&[Vector]>,
) -> AuditReport {
    let mut report = AuditReport::default();
    if trace.is_empty() {
        report.checks.push(AuditCheck {
            name: "nonempty",
            passed: false,
            checked: 1,
            violations: 1,
            detail: "trace has no records".into(),
        });
        return report;
    }

    let mut order = Tally::new("iteration_order");
    let mut finite = Tally::new("finite_values");
    for (i, r) in trace.iter().enumerate() {
        order.record(r.n == i + 1, || format!("record {i} has n = {}", r.n));
        let vals = [r.e_n, r.lambda_n, r.rho_n, r.d_norm, r.f_x];
        finite.record(vals.iter().all(|v| v.is_finite()) && r.e_n >= 0.0 && r.d_norm >= 0.0, || {
            format!("n = {}: non-finite or negative entry", r.n)
        });
    }
    report.checks.push(order.finish());
    report.checks.push(finite.finish());

    let mut feas = Tally::new("feasibility");
    for r in trace {
        feas.record(r.f_x <= cfg.feas_tol, || format!("n = {}: f(x) = {:e}", r.n, r.f_x));
    }
    report.checks.push(feas.finish());

    match cfg.step_mode {
        StepMode::Adaptive => {
            let mut cap = Tally::new("lambda_cap");
            for r in trace {
                cap.record(r.lambda_n > 0.0 && r.lambda_n <= cfg.sigma, || {
                    format!("n = {}: lambda = {:e} > sigma = {:e}", r.n, r.lambda_n, cfg.sigma)
                });
            }
            report.checks.push(cap.finish());

            let bound = cfg.rho_lower_bound();
            let mut rho = Tally::new("rho_bound");
            let mut d = Tally::new("d_lower_bound");
            for r in trace.iter().filter(|r| r.d_norm > 0.0) {
                rho.record(r.rho_n >= bound - BOUND_SLACK, || {
                    format!("n = {}: rho = {:.6} < {:.6}", r.n, r.rho_n, bound)
                });
            }
            for r in trace {
                d.record(r.d_norm >= (1.0 - cfg.mu) * r.e_n - BOUND_SLACK, || {
                    format!("n = {}: |d| = {:e} < (1 - mu) E_n = {:e}", r.n, r.d_norm, (1.0 - cfg.mu) * r.e_n)
                });
            }
            report.checks.push(rho.finish());
            report.checks.push(d.finish());
        }
        StepMode::Fixed(tau) => {
            let mut fixed = Tally::new("fixed_step");
            for r in trace {
                fixed.record(r.lambda_n == tau && r.backtracks == 0, || {
                    format!("n = {}: lambda = {:e}, expected {tau:e}", r.n, r.lambda_n)
                });
            }
            report.checks.push(fixed.finish());
        }
    }

    if let (Some(x_star), Some(xs)) = (known_solution, iterates) {
        let mut fejer = Tally::new("fejer");
        let mut energy = Tally::new("energy");
        let dists: Vec<f64> = xs.iter().map(|x| (x - x_star).norm()).collect();
        for (i, pair) in dists.windows(2).enumerate() {
            let (now, next) = (pair[0], pair[1]);
            let n = i + 1;
            fejer.record(next <= now + FEJER_SLACK, || {
                format!("n = {n}: |x_n+1 - x*| = {next:e} > |x_n - x*| = {now:e}")
            });
            if let Some(r) = trace.get(i) {
                let decrease = (2.0 - cfg.gamma) * cfg.gamma * r.rho_n * r.rho_n * r.d_norm * r.d_norm;
                energy.record(next * next <= now * now - decrease + ENERGY_SLACK, || {
                    format!("n = {n}: {:e} > {:e}", next * next, now * now - decrease)
                });
            }
        }
        report.checks.push(fejer.finish());
        report.checks.push(energy.finish());
    }

    report
}
