use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::spectral_norm_symmetric;
use crate::model::{SmoothConstraint, Vector};

const SYMMETRY_TOL: f64 = 1e-12;

/// The ellipsoid `{x : (x - t)' T (x - t) <= u^2}` described by
/// `f(x) = ((x - t)' T (x - t) - u^2) / 2`, with `grad f(x) = T (x - t)` and `L_f = |T|_2`.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipsoidSpec {
    /// Symmetric positive-definite shape matrix `T`.
    pub matrix: DMatrix<f64>,
    /// Center `t`, which is also a Slater point.
    pub center: Vector,
    pub u: f64,
    pub spectral_norm: f64,
}

impl EllipsoidSpec {
    /// Validates `T` and computes its spectral norm by power iteration.
    pub fn new(matrix: DMatrix<f64>, center: Vector, u: f64) -> Result<Self> {
        let n = center.len();
        if n == 0 {
            return Err(Error::InvalidProblem("empty ellipsoid".into()));
        }
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: matrix.nrows() });
        }
        if !(u > 0.0 && u.is_finite()) {
            return Err(Error::InvalidProblem(format!("u must be positive, got {u}")));
        }
        if matrix.iter().chain(center.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("ellipsoid data"));
        }
        let scale = matrix.amax().max(f64::MIN_POSITIVE);
        let asym = (&matrix - matrix.transpose()).amax();
        if asym > SYMMETRY_TOL * scale {
            return Err(Error::InvalidProblem(format!("T is not symmetric (residual {asym:e})")));
        }
        if matrix.clone().cholesky().is_none() {
            return Err(Error::InvalidProblem("T is not positive definite".into()));
        }
        let spectral_norm = spectral_norm_symmetric(&matrix, 1e-12, 100_000);
        Ok(Self { matrix, center, u, spectral_norm })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// `(x - t)' T (x - t)`.
    pub fn level(&self, x: &Vector) -> f64 {
        let diff = x - &self.center;
        diff.dot(&(&self.matrix * &diff))
    }

    /// Plain-text `key = value` form; vectors and the row-major matrix are space separated.
    pub fn to_kv(&self) -> String {
        let join = |it: &mut dyn Iterator<Item = f64>| {
            it.map(|v| format!("{v:.16e}")).collect::<Vec<_>>().join(" ")
        };
        let n = self.dim();
        let rows = join(&mut (0..n * n).map(|k| self.matrix[(k / n, k % n)]));
        format!(
            "n = {n}\nu = {:.16e}\nt = {}\nT = {}\n",
            self.u,
            join(&mut self.center.iter().copied()),
            rows
        )
    }

    /// Parses the output of [`EllipsoidSpec::to_kv`]. Unknown keys are ignored.
    pub fn from_kv(text: &str) -> Result<Self> {
        let mut n = None;
        let mut u = None;
        let mut t = None;
        let mut mat = None;
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let Some((key, value)) = split_kv(line) else { continue };
            match key {
                "n" => n = Some(parse_usize(value, line_no)?),
                "u" => u = Some(parse_f64(value, line_no)?),
                "t" => t = Some(parse_list(value, line_no)?),
                "T" => mat = Some(parse_list(value, line_no)?),
                _ => {}
            }
        }
        let missing = |k: &str| Error::Parse { line: 0, msg: format!("missing key `{k}`") };
        let n = n.ok_or_else(|| missing("n"))?;
        let u = u.ok_or_else(|| missing("u"))?;
        let t = t.ok_or_else(|| missing("t"))?;
        let mat = mat.ok_or_else(|| missing("T"))?;
        if t.len() != n || mat.len() != n * n {
            return Err(Error::Parse {
                line: 0,
                msg: format!("expected {n} center and {} matrix entries, got {} and {}", n * n, t.len(), mat.len()),
            });
        }
        Self::new(DMatrix::from_row_slice(n, n, &mat), DVector::from_vec(t), u)
    }
}

pub(crate) fn split_kv(line: &str) -> Option<(&str, &str)> {
    let line = line.trim();
    if line.is_empty() || line.starts_with('#') {
        return None;
    }
    let (k, v) = line.split_once('=')?;
    Some((k.trim(), v.trim()))
}

pub(crate) fn parse_f64(s: &str, line: usize) -> Result<f64> {
    s.parse::<f64>().map_err(|e| Error::Parse { line, msg: format!("`{s}`: {e}") })
}

pub(crate) fn parse_usize(s: &str, line: usize) -> Result<usize> {
    s.parse::<usize>().map_err(|e| Error::Parse { line, msg: format!("`{s}`: {e}") })
}

pub(crate) fn parse_list(s: &str, line: usize) -> Result<Vec<f64>> {
    s.split_whitespace().map(|tok| parse_f64(tok, line)).collect()
}

impl SmoothConstraint for EllipsoidSpec {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn value(&self, x: &Vector) -> f64 {
        0.5 * (self.level(x) - self.u * self.u)
    }

    fn gradient(&self, x: &Vector) -> Vector {
        &self.matrix * (x - &self.center)
    }

    fn lipschitz_grad(&self) -> f64 {
        self.spectral_norm
    }

    fn value_and_gradient(&self, x: &Vector) -> (f64, Vector) {
        let diff = x - &self.center;
        let grad = &self.matrix * &diff;
        (0.5 * (diff.dot(&grad) - self.u * self.u), grad)
    }
}

/// Seeded random ellipsoid.
///
/// Draws come from ChaCha20 seeded with `seed_from_u64(seed)`, in this order:
/// an `n x n` standard normal matrix (row-major), `n` eigenvalues log-uniform on
/// `[1, cond_cap]`, `n` center components uniform on `[-1, 1)`, then `u` uniform on
/// `[0.5, 2)`. `T = Q diag(eig) Q'` with `Q` the sign-normalized QR factor of the
/// normal matrix, symmetrized after the product. `cond_cap == 1` gives `T = I` exactly.
pub fn random_ellipsoid(seed: u64, n: usize, cond_cap: f64) -> EllipsoidSpec {
    assert!(n >= 1, "dimension must be positive");
    assert!(cond_cap >= 1.0, "cond_cap must be at least 1");
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let gauss: Vec<f64> = (0..n * n).map(|_| rng.sample(StandardNormal)).collect();
    let log_cap = cond_cap.ln();
    let eig: Vec<f64> = (0..n).map(|_| (rng.gen::<f64>() * log_cap).exp()).collect();
    let center = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
    let u = rng.gen_range(0.5..2.0);

    let spectral_norm = eig.iter().copied().fold(f64::MIN, f64::max);
    let matrix = if cond_cap == 1.0 {
        DMatrix::identity(n, n)
    } else {
        let qr = DMatrix::from_row_slice(n, n, &gauss).qr();
        let r_diag = qr.r().diagonal();
        let mut q = qr.q();
        for (j, r) in r_diag.iter().enumerate() {
            if *r < 0.0 {
                q.column_mut(j).neg_mut();
            }
        }
        let mut scaled = q.clone();
        for (j, lam) in eig.iter().enumerate() {
            scaled.column_mut(j).scale_mut(*lam);
        }
        let product = scaled * q.transpose();
        (&product + product.transpose()) * 0.5
    };
    EllipsoidSpec { matrix, center, u, spectral_norm }
}
