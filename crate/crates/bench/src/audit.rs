use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use mbvi::trace::{read_trace, read_vectors};
use mbvi::{audit_trace, AuditReport, Vector};

use crate::cli::AuditArgs;
use crate::CliError;

/// Prints the audit; exit code 0 iff every check passes, 2 otherwise.
pub fn cmd_audit(args: &AuditArgs) -> Result<i32, CliError> {
    let report = audit_files(args)?;
    print!("{report}");
    if let Some(path) = &args.out {
        std::fs::write(path, report.to_csv())
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    }
    Ok(if report.all_passed() { 0 } else { 2 })
}

pub fn audit_files(args: &AuditArgs) -> Result<AuditReport, CliError> {
    let mut cfg = args.method.config(usize::MAX);
    cfg.feas_tol = args.feas_tol;
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;

    let trace = read_trace(open(&args.trace)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.trace.display())))?;
    let iterates = match &args.iterates {
        Some(p) => Some(read_vectors(open(p)?).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?),
        None => None,
    };
    let known = match &args.known_solution {
        Some(p) => Some(read_single_vector(p)?),
        None => None,
    };
    if let Some(xs) = &iterates {
        if xs.len() != trace.len() {
            return Err(CliError::Input(format!(
                "iterate dump has {} rows but the trace has {} records",
                xs.len(),
                trace.len()
            )));
        }
        if let (Some(x_star), Some(first)) = (&known, xs.first()) {
            if x_star.len() != first.len() {
                return Err(CliError::Input("known solution and iterates differ in dimension".into()));
            }
        }
    }
    Ok(audit_trace(&trace, &cfg, known.as_ref(), iterates.as_deref()))
}

fn read_single_vector(path: &Path) -> Result<Vector, CliError> {
    let mut vs = read_vectors(open(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    if vs.len() != 1 {
        return Err(CliError::Input(format!("{}: expected one vector, found {}", path.display(), vs.len())));
    }
    Ok(vs.remove(0))
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}
