use std::sync::Arc;

use mbvi::problems::{random_ellipsoid, InstanceSpec, ProblemKind};
use mbvi::trace::{read_trace, write_trace};
use mbvi::{
    audit_trace, kkt_certificate, project_ellipsoid, solve, solve_with_observer, BallConstraint,
    CertificateKind, FnOperator, SmoothConstraint, SolveStatus, SolverConfig, VIProblem, Vector,
};
use nalgebra::dvector;

fn solve_collecting(problem: &VIProblem, x1: &Vector, cfg: &SolverConfig) -> (mbvi::SolveReport, Vec<Vector>) {
    let mut xs = Vec::new();
    let report = solve_with_observer(problem, x1, cfg, |_, x| xs.push(x.clone())).unwrap();
    (report, xs)
}

#[test]
fn projection_instances_match_oracle_and_stay_fejer() {
    let cfg = SolverConfig::default();
    for n in [2, 5, 20] {
        for seed in 0..6 {
            let built = InstanceSpec::new(ProblemKind::Projection, seed).with_dim(n).build().unwrap();
            let x_star = built.problem.known_solution().unwrap().clone();
            let (report, xs) = solve_collecting(&built.problem, &built.start, &cfg);
            assert_eq!(report.status, SolveStatus::Converged, "n {n} seed {seed}");
            assert!((&report.solution - &x_star).norm() <= 1e-8);
            let audit = audit_trace(&report.trace, &cfg, Some(&x_star), Some(&xs));
            assert!(audit.all_passed(), "n {n} seed {seed}\n{audit}");
            assert!(audit.get("fejer").unwrap().checked > 0);
            assert!(kkt_certificate(&built.problem, &report.solution, 1e-6).unwrap().passed());
        }
    }
}

#[test]
fn interior_shift_is_recovered() {
    let spec = random_ellipsoid(8, 3, 5.0);
    let p = &spec.center + dvector![0.01, -0.02, 0.015];
    let problem = mbvi::problems::projection_problem(&spec, &p).unwrap();
    assert_eq!(problem.known_solution().unwrap(), &p);
    let report = solve(&problem, &spec.center, &SolverConfig::default()).unwrap();
    assert_eq!(report.status, SolveStatus::Converged);
    // Interior steps give E_n = lambda |A(x_n)|, so the residual scales with 1 / lambda.
    let lambda = report.trace.last().unwrap().lambda_n;
    assert!(problem.operator.eval(&report.solution).norm() <= 10.0 * 1e-12 / lambda);
    let cert = kkt_certificate(&problem, &report.solution, 1e-6).unwrap();
    assert_eq!(cert.kind, CertificateKind::InteriorStationary);
}

#[test]
fn perturbed_solutions_are_rejected() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
    for seed in 0..10 {
        let built = InstanceSpec::new(ProblemKind::Projection, seed).with_dim(4).build().unwrap();
        let x_star = built.problem.known_solution().unwrap();
        let w = Vector::from_fn(4, |_, _| rng.gen_range(-1.0..1.0)).normalize();
        let e = &built.ellipsoid;
        let candidate = project_ellipsoid(&e.matrix, &e.center, e.u, &(x_star + w * 0.01)).unwrap();
        let cert = kkt_certificate(&built.problem, &candidate, 1e-6).unwrap();
        assert_eq!(cert.kind, CertificateKind::Failed, "seed {seed}");
        assert!(kkt_certificate(&built.problem, x_star, 1e-8).unwrap().passed());
    }
}

#[test]
fn example1_converges_with_default_parameters() {
    // lambda_n settles at sigma * delta^2 here, so this takes on the order of 1e6 iterations.
    let built = InstanceSpec::new(ProblemKind::Example1, 1).build().unwrap();
    let cfg = SolverConfig { max_iter: 5_000_000, ..SolverConfig::default() };
    let report = solve(&built.problem, &built.start, &cfg).unwrap();
    assert_eq!(report.status, SolveStatus::Converged);
    assert!(report.final_e_n().unwrap() <= cfg.e_tol);
    assert!(report.trace.iter().all(|r| r.f_x <= cfg.feas_tol));
    assert!(audit_trace(&report.trace, &cfg, None, None).all_passed());
    let cert = kkt_certificate(&built.problem, &report.solution, 1e-6).unwrap();
    assert!(cert.passed(), "{cert:?}");
}

#[test]
fn energy_inequality_on_the_disk() {
    let p = dvector![2.0, 1.0];
    let target = p.clone();
    let op = Arc::new(FnOperator::new(2, move |x: &Vector| x - &target));
    let x_star = p.normalize();
    let problem = VIProblem::new(op, Arc::new(BallConstraint::unit(2)))
        .unwrap()
        .with_known_solution(x_star.clone())
        .unwrap();
    let cfg = SolverConfig { gamma: 1.5, ..SolverConfig::default() };
    let (report, xs) = solve_collecting(&problem, &dvector![-0.5, 0.0], &cfg);
    assert_eq!(report.status, SolveStatus::Converged);
    let audit = audit_trace(&report.trace, &cfg, Some(&x_star), Some(&xs));
    assert!(audit.get("energy").unwrap().passed, "{audit}");
}

#[test]
fn trace_csv_reproduces_records() {
    let built = InstanceSpec::new(ProblemKind::Projection, 2).with_dim(3).build().unwrap();
    let report = solve(&built.problem, &built.start, &SolverConfig::default()).unwrap();
    let mut buf = Vec::new();
    write_trace(&mut buf, &report.trace).unwrap();
    let back = read_trace(buf.as_slice()).unwrap();
    assert_eq!(back.len(), report.trace.len());
    for (a, b) in back.iter().zip(&report.trace) {
        assert_eq!((a.n, a.e_n, a.lambda_n, a.rho_n, a.d_norm, a.f_x, a.backtracks), (b.n, b.e_n, b.lambda_n, b.rho_n, b.d_norm, b.f_x, b.backtracks));
        let dt = a.elapsed.as_secs_f64() - b.elapsed.as_secs_f64();
        assert!(dt.abs() < 1e-9);
    }
}

#[test]
fn iterates_stay_feasible_on_random_problems() {
    // A monotone affine operator with a skew part, over random ellipsoids.
    for seed in 0..5 {
        let spec = random_ellipsoid(seed, 6, 25.0);
        let op = Arc::new(FnOperator::new(6, |x: &Vector| {
            Vector::from_fn(6, |i, _| {
                let next = x[(i + 1) % 6];
                let prev = x[(i + 5) % 6];
                2.0 * x[i] + next - prev - 1.0
            })
        }));
        let problem = VIProblem::new(op, Arc::new(spec.clone())).unwrap();
        let cfg = SolverConfig { max_iter: 300, ..SolverConfig::default() };
        let (report, xs) = solve_collecting(&problem, &spec.center, &cfg);
        assert!(xs.iter().all(|x| spec.value(x) <= 1e-12));
        assert!(audit_trace(&report.trace, &cfg, None, None).all_passed());
    }
}
