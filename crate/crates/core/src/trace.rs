//! Trace CSV and iterate-dump formats.
//!
//! The trace CSV has the header `iter,e_n,lambda_n,rho_n,d_norm,f_x,backtracks,elapsed_ms`
//! and one row per record; reals are written with 17 significant digits so that reading
//! a file back reproduces every `f64` exactly. Iterate dumps hold one vector per line,
//! space separated, in the same format.

use std::io::{BufRead, Write};
use std::time::Duration;

use crate::error::{Error, Result};
use crate::model::Vector;
use crate::solver::IterateRecord;

pub const TRACE_HEADER: &str = "iter,e_n,lambda_n,rho_n,d_norm,f_x,backtracks,elapsed_ms";

pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_trace<W: Write>(mut out: W, trace: &[IterateRecord]) -> Result<()> {
    writeln!(out, "{TRACE_HEADER}")?;
    for r in trace {
        write_trace_row(&mut out, r)?;
    }
    Ok(())
}

pub fn write_trace_row<W: Write>(out: &mut W, r: &IterateRecord) -> Result<()> {
    writeln!(
        out,
        "{},{},{},{},{},{},{},{}",
        r.n,
        format_real(r.e_n),
        format_real(r.lambda_n),
        format_real(r.rho_n),
        format_real(r.d_norm),
        format_real(r.f_x),
        r.backtracks,
        format_real(r.elapsed.as_secs_f64() * 1e3),
    )?;
    Ok(())
}

pub fn read_trace<R: BufRead>(input: R) -> Result<Vec<IterateRecord>> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or(Error::Parse { line: 1, msg: "empty trace file".into() })??;
    if header.trim() != TRACE_HEADER {
        return Err(Error::Parse { line: 1, msg: format!("unexpected header `{}`", header.trim()) });
    }
    let mut out = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != 8 {
            return Err(Error::Parse { line: line_no, msg: format!("expected 8 fields, got {}", fields.len()) });
        }
        let real = |i: usize| -> Result<f64> {
            fields[i].parse::<f64>().map_err(|e| Error::Parse {
                line: line_no,
                msg: format!("field {} `{}`: {e}", i + 1, fields[i]),
            })
        };
        let int = |i: usize| -> Result<usize> {
            fields[i].parse::<usize>().map_err(|e| Error::Parse {
                line: line_no,
                msg: format!("field {} `{}`: {e}", i + 1, fields[i]),
            })
        };
        let elapsed_ms = real(7)?;
        if !(elapsed_ms >= 0.0 && elapsed_ms.is_finite()) {
            return Err(Error::Parse { line: line_no, msg: format!("bad elapsed_ms {elapsed_ms}") });
        }
        out.push(IterateRecord {
            n: int(0)?,
            e_n: real(1)?,
            lambda_n: real(2)?,
            rho_n: real(3)?,
            d_norm: real(4)?,
            f_x: real(5)?,
            backtracks: int(6)?,
            elapsed: Duration::from_secs_f64(elapsed_ms / 1e3),
        });
    }
    Ok(out)
}

pub fn write_vector<W: Write>(out: &mut W, v: &Vector) -> Result<()> {
    let row: Vec<String> = v.iter().map(|x| format_real(*x)).collect();
    writeln!(out, "{}", row.join(" "))?;
    Ok(())
}

pub fn read_vectors<R: BufRead>(input: R) -> Result<Vec<Vector>> {
    let mut out: Vec<Vector> = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let vals = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .map_err(|e| Error::Parse { line: idx + 1, msg: format!("`{tok}`: {e}") })
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = out.first() {
            if first.len() != vals.len() {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: format!("expected {} components, got {}", first.len(), vals.len()),
                });
            }
        }
        out.push(Vector::from_vec(vals));
    }
    Ok(out)
}
