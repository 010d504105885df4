use std::path::{Path, PathBuf};

use crate::cli::PlotArgs;
use crate::CliError;

/// Writes the plot script and returns its path. The script is not executed.
pub fn cmd_plot(args: &PlotArgs) -> Result<PathBuf, CliError> {
    if args.traces.is_empty() {
        return Err(CliError::Usage("plot needs at least one trace CSV".into()));
    }
    let script = plot_script(&args.traces);
    std::fs::write(&args.out, script).map_err(|e| CliError::Input(format!("{}: {e}", args.out.display())))?;
    println!("wrote {}", args.out.display());
    Ok(args.out.clone())
}

fn label_for(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn py_str(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// A standalone matplotlib script: log-scale E_n against iteration and against elapsed time.
pub fn plot_script(traces: &[PathBuf]) -> String {
    let entries: Vec<String> = traces
        .iter()
        .map(|p| format!("    ({}, {}),", py_str(&p.display().to_string()), py_str(&label_for(p))))
        .collect();
    format!(
        r#"#!/usr/bin/env python3
"""E_n = |x_n - y_n| against iteration count and elapsed time."""
import csv

import matplotlib.pyplot as plt

TRACES = [
{entries}
]


def load(path):
    iters, e_n, ms = [], [], []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            iters.append(int(row["iter"]))
            e_n.append(float(row["e_n"]))
            ms.append(float(row["elapsed_ms"]))
    return iters, e_n, ms


fig, (by_iter, by_time) = plt.subplots(1, 2, figsize=(11, 4.5))
for path, label in TRACES:
    iters, e_n, ms = load(path)
    by_iter.semilogy(iters, e_n, label=label)
    by_time.semilogy(ms, e_n, label=label)
by_iter.set_xlabel("iteration n")
by_time.set_xlabel("elapsed time (ms)")
for ax in (by_iter, by_time):
    ax.set_ylabel("E_n")
    ax.grid(True, which="both", alpha=0.3)
    if len(TRACES) > 1:
        ax.legend()
fig.tight_layout()
fig.savefig("convergence.png", dpi=150)
plt.show()
"#,
        entries = entries.join("\n")
    )
}
