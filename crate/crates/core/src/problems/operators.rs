use nalgebra::DMatrix;

use crate::model::{CostOperator, Vector};

/// The four-dimensional quadratic map
///
/// ```text
/// 3x1^2 + 2x1x2 + 2x2^2 +   x3 + 3x4 - 6
/// 2x1^2 +   x1  +  x2^2 + 10x3 + 2x4 - 2
/// 3x1^2 +  x1x2 + 2x2^2 +  2x3 + 9x4 - 9
///  x1^2 + 3x2^2 +  2x3  +  3x4 - 3
/// ```
#[derive(Debug, Clone, Copy, Default)]
pub struct Example1Operator;

impl CostOperator for Example1Operator {
    fn dim(&self) -> usize {
        4
    }

    fn eval(&self, x: &Vector) -> Vector {
        let (x1, x2, x3, x4) = (x[0], x[1], x[2], x[3]);
        Vector::from_vec(vec![
            3.0 * x1 * x1 + 2.0 * x1 * x2 + 2.0 * x2 * x2 + x3 + 3.0 * x4 - 6.0,
            2.0 * x1 * x1 + x1 + x2 * x2 + 10.0 * x3 + 2.0 * x4 - 2.0,
            3.0 * x1 * x1 + x1 * x2 + 2.0 * x2 * x2 + 2.0 * x3 + 9.0 * x4 - 9.0,
            x1 * x1 + 3.0 * x2 * x2 + 2.0 * x3 + 3.0 * x4 - 3.0,
        ])
    }
}

/// A tridiagonal matrix stored as its three bands.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    /// `sub[i]` is entry `(i + 1, i)`.
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    /// `sup[i]` is entry `(i, i + 1)`.
    pub sup: Vec<f64>,
}

impl Tridiagonal {
    pub fn constant(n: usize, sub: f64, diag: f64, sup: f64) -> Self {
        let off = n.saturating_sub(1);
        Self {
            sub: vec![sub; off],
            diag: vec![diag; n],
            sup: vec![sup; off],
        }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// `M x` in O(n).
    pub fn matvec(&self, x: &Vector) -> Vector {
        let n = self.dim();
        let mut out = Vector::zeros(n);
        for i in 0..n {
            let mut acc = self.diag[i] * x[i];
            if i > 0 {
                acc += self.sub[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc += self.sup[i] * x[i + 1];
            }
            out[i] = acc;
        }
        out
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            if i + 1 < n {
                m[(i, i + 1)] = self.sup[i];
                m[(i + 1, i)] = self.sub[i];
            }
        }
        m
    }
}

/// `A(x) = arctan(x) + M x + e` with `M = tridiag(1, 4, -2)` and `e = (-1, ..., -1)`.
#[derive(Debug, Clone)]
pub struct Example2Operator {
    m: Tridiagonal,
}

impl Example2Operator {
    pub fn new(n: usize) -> Self {
        Self { m: Tridiagonal::constant(n, 1.0, 4.0, -2.0) }
    }

    pub fn matrix(&self) -> &Tridiagonal {
        &self.m
    }
}

impl CostOperator for Example2Operator {
    fn dim(&self) -> usize {
        self.m.dim()
    }

    fn eval(&self, x: &Vector) -> Vector {
        let mut out = self.m.matvec(x);
        for (o, xi) in out.iter_mut().zip(x.iter()) {
            *o += xi.atan() - 1.0;
        }
        out
    }
}

/// `A(x) = x - p`.
#[derive(Debug, Clone)]
pub struct ShiftedIdentity {
    pub p: Vector,
}

impl ShiftedIdentity {
    pub fn new(p: Vector) -> Self {
        Self { p }
    }
}

impl CostOperator for ShiftedIdentity {
    fn dim(&self) -> usize {
        self.p.len()
    }

    fn eval(&self, x: &Vector) -> Vector {
        x - &self.p
    }
}
