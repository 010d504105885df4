use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mbvi::problems::ProblemKind;
use mbvi::{SolverConfig, StepMode};

#[derive(Debug, Parser)]
#[command(name = "mbvi", version, about = "Moving-ball solver for variational inequalities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a benchmark instance and write its convergence trace.
    Run(RunArgs),
    /// Check a trace CSV against the method's invariants.
    Audit(AuditArgs),
    /// Write a matplotlib script that plots one or more traces.
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProblemArg {
    Example1,
    Example2,
    Projection,
}

impl From<ProblemArg> for ProblemKind {
    fn from(p: ProblemArg) -> Self {
        match p {
            ProblemArg::Example1 => ProblemKind::Example1,
            ProblemArg::Example2 => ProblemKind::Example2,
            ProblemArg::Projection => ProblemKind::Projection,
        }
    }
}

/// Method parameters shared by `run` and `audit`; defaults are mu=0.01, delta=0.0005,
/// sigma=7, gamma=0.99.
#[derive(Debug, Clone, Args)]
pub struct MethodArgs {
    #[arg(long, default_value_t = 0.01)]
    pub mu: f64,
    #[arg(long, default_value_t = 0.0005)]
    pub delta: f64,
    #[arg(long, default_value_t = 7.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0.99)]
    pub gamma: f64,
    /// Stopping threshold on E_n = |x_n - y_n|.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Use a constant step instead of the line search.
    #[arg(long, value_name = "TAU")]
    pub fixed_step: Option<f64>,
}

impl MethodArgs {
    pub fn config(&self, max_iter: usize) -> SolverConfig {
        SolverConfig {
            mu: self.mu,
            delta: self.delta,
            sigma: self.sigma,
            gamma: self.gamma,
            e_tol: self.tol,
            max_iter,
            step_mode: match self.fixed_step {
                Some(tau) => StepMode::Fixed(tau),
                None => StepMode::Adaptive,
            },
            ..SolverConfig::default()
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long, value_enum)]
    pub problem: ProblemArg,
    /// Dimension (example1 is always 4; example2 defaults to 1000, projection to 5).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = mbvi::problems::DEFAULT_COND_CAP)]
    pub cond_cap: f64,
    #[command(flatten)]
    pub method: MethodArgs,
    #[arg(long, default_value_t = 20_000)]
    pub max_iter: usize,
    /// Trace CSV path.
    #[arg(long, default_value = "trace.csv")]
    pub out: PathBuf,
    /// Write x_n, one vector per line.
    #[arg(long)]
    pub dump_iterates: Option<PathBuf>,
    /// Write the instance's known solution (projection problems only).
    #[arg(long)]
    pub known_solution: Option<PathBuf>,
    /// Run this many consecutive seeds concurrently.
    #[arg(long, default_value_t = 1)]
    pub repeat: usize,
}

#[derive(Debug, Clone, Args)]
pub struct AuditArgs {
    /// Trace CSV written by `run`.
    pub trace: PathBuf,
    #[command(flatten)]
    pub method: MethodArgs,
    /// Iterate dump written by `run --dump-iterates`.
    #[arg(long, visible_alias = "dump-iterates")]
    pub iterates: Option<PathBuf>,
    /// Known solution, one vector on one line.
    #[arg(long)]
    pub known_solution: Option<PathBuf>,
    #[arg(long, default_value_t = mbvi::DEFAULT_FEAS_TOL)]
    pub feas_tol: f64,
    /// Also write the report as CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PlotArgs {
    /// Trace CSVs to plot.
    pub traces: Vec<PathBuf>,
    #[arg(long, default_value = "plot_traces.py")]
    pub out: PathBuf,
}
