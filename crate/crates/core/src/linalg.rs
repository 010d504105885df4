//! Small dense helpers: spectral norm by power iteration and a matrix-free
//! conjugate-gradient solve.

use nalgebra::{DMatrix, DVector};

/// Largest eigenvalue magnitude of a symmetric matrix, by power iteration
/// until successive estimates agree to `rel_tol`.
pub fn spectral_norm_symmetric(m: &DMatrix<f64>, rel_tol: f64, max_iter: usize) -> f64 {
    let n = m.nrows();
    if n == 0 {
        return 0.0;
    }
    // Deterministic start with no zero components; avoids orthogonality to the top eigenvector
    // except in contrived cases.
    let mut v = DVector::from_fn(n, |i, _| 1.0 + (i as f64 + 1.0).sqrt().fract());
    v /= v.norm();
    let mut estimate = 0.0;
    for _ in 0..max_iter {
        let w = m * &v;
        let norm = w.norm();
        if norm == 0.0 {
            return 0.0;
        }
        let next = norm;
        v = w / norm;
        if (next - estimate).abs() <= rel_tol * next {
            return next;
        }
        estimate = next;
    }
    estimate
}

/// Solves `A x = b` for symmetric positive-definite `A`, given only `x -> A x`.
/// Stops when `|r| <= rel_tol * |b|`. Returns the iterate and whether it converged.
pub fn conjugate_gradient<F>(apply: F, b: &DVector<f64>, rel_tol: f64, max_iter: usize) -> (DVector<f64>, bool)
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let mut x = DVector::zeros(b.len());
    let b_norm = b.norm();
    if b_norm == 0.0 {
        return (x, true);
    }
    let target = rel_tol * b_norm;
    let mut r = b.clone();
    let mut p = r.clone();
    let mut rs = r.norm_squared();
    for _ in 0..max_iter {
        if rs.sqrt() <= target {
            return (x, true);
        }
        let ap = apply(&p);
        let alpha = rs / p.dot(&ap);
        x.axpy(alpha, &p, 1.0);
        r.axpy(-alpha, &ap, 1.0);
        let rs_next = r.norm_squared();
        p = &r + (rs_next / rs) * &p;
        rs = rs_next;
    }
    let converged = rs.sqrt() <= target;
    (x, converged)
}
