use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use super::ellipsoid::{parse_f64, parse_list, parse_usize, split_kv};
use super::{example1, example2, projection_problem, random_ellipsoid, EllipsoidSpec};
use crate::error::{Error, Result};
use crate::model::{VIProblem, Vector};

pub const DEFAULT_COND_CAP: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Example1,
    Example2,
    Projection,
}

impl ProblemKind {
    pub fn default_dim(self) -> usize {
        match self {
            ProblemKind::Example1 => 4,
            ProblemKind::Example2 => 1000,
            ProblemKind::Projection => 5,
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProblemKind::Example1 => "example1",
            ProblemKind::Example2 => "example2",
            ProblemKind::Projection => "projection",
        })
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "example1" => Ok(ProblemKind::Example1),
            "example2" => Ok(ProblemKind::Example2),
            "projection" => Ok(ProblemKind::Projection),
            other => Err(Error::InvalidProblem(format!("unknown problem `{other}`"))),
        }
    }
}

/// Everything needed to rebuild a benchmark instance.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceSpec {
    pub kind: ProblemKind,
    pub n: usize,
    pub seed: u64,
    pub cond_cap: f64,
    /// Replaces the seeded ellipsoid when present.
    pub ellipsoid: Option<EllipsoidSpec>,
    /// Replaces the seeded shift of a projection problem when present.
    pub shift: Option<Vector>,
}

/// A constructed instance with its starting point `x1 = t`.
#[derive(Debug, Clone)]
pub struct BuiltInstance {
    pub problem: VIProblem,
    pub ellipsoid: EllipsoidSpec,
    pub start: Vector,
}

impl InstanceSpec {
    pub fn new(kind: ProblemKind, seed: u64) -> Self {
        Self {
            kind,
            n: kind.default_dim(),
            seed,
            cond_cap: DEFAULT_COND_CAP,
            ellipsoid: None,
            shift: None,
        }
    }

    pub fn with_dim(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn with_cond_cap(mut self, cond_cap: f64) -> Self {
        self.cond_cap = cond_cap;
        self
    }

    pub fn build(&self) -> Result<BuiltInstance> {
        if self.kind == ProblemKind::Example1 && self.n != 4 {
            return Err(Error::DimensionMismatch { expected: 4, got: self.n });
        }
        if self.n == 0 {
            return Err(Error::InvalidProblem("dimension must be positive".into()));
        }
        if !(self.cond_cap >= 1.0 && self.cond_cap.is_finite()) {
            return Err(Error::InvalidProblem(format!("cond_cap must be >= 1, got {}", self.cond_cap)));
        }
        let ellipsoid = match &self.ellipsoid {
            Some(e) => e.clone(),
            None => random_ellipsoid(self.seed, self.n, self.cond_cap),
        };
        let problem = match self.kind {
            ProblemKind::Example1 => example1(&ellipsoid)?,
            ProblemKind::Example2 => example2(self.n, &ellipsoid)?,
            ProblemKind::Projection => {
                let p = match &self.shift {
                    Some(p) => p.clone(),
                    None => exterior_shift(self.seed, &ellipsoid),
                };
                projection_problem(&ellipsoid, &p)?
            }
        };
        let start = ellipsoid.center.clone();
        Ok(BuiltInstance { problem, ellipsoid, start })
    }

    pub fn to_kv(&self) -> String {
        let mut out = format!(
            "problem = {}\nn = {}\nseed = {}\ncond_cap = {:.16e}\n",
            self.kind, self.n, self.seed, self.cond_cap
        );
        if let Some(e) = &self.ellipsoid {
            out.push_str(&e.to_kv().lines().filter(|l| !l.starts_with("n =")).map(|l| format!("{l}\n")).collect::<String>());
        }
        if let Some(p) = &self.shift {
            let vals: Vec<String> = p.iter().map(|v| format!("{v:.16e}")).collect();
            out.push_str(&format!("p = {}\n", vals.join(" ")));
        }
        out
    }

    pub fn from_kv(text: &str) -> Result<Self> {
        let mut kind = None;
        let mut n = None;
        let mut seed = 0;
        let mut cond_cap = DEFAULT_COND_CAP;
        let mut shift = None;
        let mut explicit = false;
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let Some((key, value)) = split_kv(line) else { continue };
            match key {
                "problem" => kind = Some(value.parse::<ProblemKind>().map_err(|e| Error::Parse { line: line_no, msg: e.to_string() })?),
                "n" => n = Some(parse_usize(value, line_no)?),
                "seed" => seed = value.parse::<u64>().map_err(|e| Error::Parse { line: line_no, msg: format!("`{value}`: {e}") })?,
                "cond_cap" => cond_cap = parse_f64(value, line_no)?,
                "p" => shift = Some(Vector::from_vec(parse_list(value, line_no)?)),
                "T" | "t" | "u" => explicit = true,
                other => {
                    return Err(Error::Parse { line: line_no, msg: format!("unknown key `{other}`") });
                }
            }
        }
        let kind = kind.ok_or(Error::Parse { line: 0, msg: "missing key `problem`".into() })?;
        let n = n.unwrap_or(kind.default_dim());
        let ellipsoid = if explicit {
            Some(EllipsoidSpec::from_kv(&format!("n = {n}\n{text}"))?)
        } else {
            None
        };
        Ok(Self { kind, n, seed, cond_cap, ellipsoid, shift })
    }
}

/// A point strictly outside the ellipsoid, drawn on ChaCha20 stream 1 of `seed`:
/// `p = t + s w` with `w` a normal unit direction and `s = u * U[1.5, 3)`.
fn exterior_shift(seed: u64, ellipsoid: &EllipsoidSpec) -> Vector {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let n = ellipsoid.dim();
    let w = Vector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let scale = ellipsoid.u * rng.gen_range(1.5..3.0);
    // T >= I makes (s w)' T (s w) >= s^2 > u^2.
    &ellipsoid.center + w.normalize() * scale
}
