use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::thread;

use mbvi::problems::{InstanceSpec, ProblemKind};
use mbvi::trace::{write_trace, write_vector};
use mbvi::{solve_with_observer, SolveReport, SolveStatus, SolverConfig, StepMode};

use crate::cli::RunArgs;
use crate::CliError;

/// Outcome of one seeded run.
#[derive(Debug)]
pub struct RunSummary {
    pub seed: u64,
    pub report: SolveReport,
    /// Distance from the final iterate to the known solution, when there is one.
    pub known_error: Option<f64>,
    pub trace_path: PathBuf,
}

impl RunSummary {
    pub fn exit_code(&self) -> i32 {
        match self.report.status {
            SolveStatus::Converged | SolveStatus::StationaryOperator => 0,
            SolveStatus::MaxIterations => 2,
            SolveStatus::LineSearchFailed => 3,
        }
    }
}

pub fn cmd_run(args: &RunArgs) -> Result<i32, CliError> {
    if args.repeat == 0 {
        return Err(CliError::Usage("--repeat must be at least 1".into()));
    }
    let cfg = args.method.config(args.max_iter);
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    if args.known_solution.is_some() && ProblemKind::from(args.problem) != ProblemKind::Projection {
        return Err(CliError::Usage("--known-solution is only available for --problem projection".into()));
    }

    let seeds: Vec<u64> = (0..args.repeat as u64).map(|k| args.seed.wrapping_add(k)).collect();
    let results: Vec<Result<RunSummary, CliError>> = if seeds.len() == 1 {
        vec![run_seed(args, &cfg, seeds[0])]
    } else {
        let workers = thread::available_parallelism().map_or(1, |n| n.get());
        let cfg = &cfg;
        let mut out = Vec::with_capacity(seeds.len());
        for chunk in seeds.chunks(workers) {
            thread::scope(|scope| {
                let handles: Vec<_> = chunk
                    .iter()
                    .map(|&seed| scope.spawn(move || run_seed(args, cfg, seed)))
                    .collect();
                for h in handles {
                    out.push(h.join().expect("solver thread panicked"));
                }
            });
        }
        out
    };

    let mut code = 0;
    for result in results {
        match result {
            Ok(summary) => {
                println!("{}", summary_line(args, &cfg, &summary));
                code = code.max(summary.exit_code());
            }
            Err(err) => {
                eprintln!("error: {err}");
                code = code.max(err.exit_code());
            }
        }
    }
    Ok(code)
}

/// Builds, solves and writes the files for one seed.
pub fn run_seed(args: &RunArgs, cfg: &SolverConfig, seed: u64) -> Result<RunSummary, CliError> {
    let kind = ProblemKind::from(args.problem);
    let mut spec = InstanceSpec::new(kind, seed).with_cond_cap(args.cond_cap);
    if let Some(n) = args.n {
        spec = spec.with_dim(n);
    }
    let built = spec.build().map_err(|e| CliError::Usage(format!("cannot build instance: {e}")))?;

    let trace_path = seeded_path(&args.out, seed, args.repeat);
    write_text(&instance_path(&trace_path), &spec.to_kv())?;

    let mut dump = match &args.dump_iterates {
        Some(p) => Some(BufWriter::new(create(&seeded_path(p, seed, args.repeat))?)),
        None => None,
    };
    let mut dump_err = None;
    let report = solve_with_observer(&built.problem, &built.start, cfg, |_, x| {
        if let Some(w) = dump.as_mut() {
            if let Err(e) = write_vector(w, x) {
                dump_err.get_or_insert(e);
            }
        }
    })?;
    if let Some(e) = dump_err {
        return Err(CliError::Input(format!("writing iterates: {e}")));
    }
    if let Some(mut w) = dump {
        w.flush().map_err(|e| CliError::Input(e.to_string()))?;
    }

    let mut out = BufWriter::new(create(&trace_path)?);
    write_trace(&mut out, &report.trace).map_err(|e| CliError::Input(e.to_string()))?;
    out.flush().map_err(|e| CliError::Input(e.to_string()))?;

    let known = built.problem.known_solution();
    if let (Some(path), Some(x_star)) = (&args.known_solution, known) {
        let mut w = BufWriter::new(create(&seeded_path(path, seed, args.repeat))?);
        write_vector(&mut w, x_star).map_err(|e| CliError::Input(e.to_string()))?;
        w.flush().map_err(|e| CliError::Input(e.to_string()))?;
    }
    let known_error = known.map(|x_star| (&report.solution - x_star).norm());
    Ok(RunSummary { seed, report, known_error, trace_path })
}

pub fn summary_line(args: &RunArgs, cfg: &SolverConfig, s: &RunSummary) -> String {
    let r = &s.report;
    let step = match cfg.step_mode {
        StepMode::Adaptive => "adaptive".to_string(),
        StepMode::Fixed(tau) => format!("fixed({tau})"),
    };
    let mut line = format!(
        "status={} iterations={} final_e_n={:.3e} wall_ms={:.3} op_evals={} problem={} n={} seed={} \
         mu={} delta={} sigma={} gamma={} tol={:e} step={} trace={}",
        r.status.as_str(),
        r.iterations,
        r.final_e_n().unwrap_or(f64::NAN),
        r.elapsed.as_secs_f64() * 1e3,
        r.op_evals,
        ProblemKind::from(args.problem),
        r.solution.len(),
        s.seed,
        cfg.mu,
        cfg.delta,
        cfg.sigma,
        cfg.gamma,
        cfg.e_tol,
        step,
        s.trace_path.display(),
    );
    if let Some(err) = s.known_error {
        line.push_str(&format!(" known_error={err:.3e}"));
    }
    line
}

/// `trace.csv` -> `trace-s7.csv` when several seeds share one `--out`.
pub fn seeded_path(path: &Path, seed: u64, repeat: usize) -> PathBuf {
    if repeat <= 1 {
        return path.to_path_buf();
    }
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}-s{seed}.{}", ext.to_string_lossy()),
        None => format!("{stem}-s{seed}"),
    };
    path.with_file_name(name)
}

/// Sidecar describing the instance, so a trace can be regenerated.
pub fn instance_path(trace: &Path) -> PathBuf {
    let mut name = trace.file_name().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(".instance");
    trace.with_file_name(name)
}

fn create(path: &Path) -> Result<File, CliError> {
    File::create(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}
