//! Command-line front end of the experiment runner.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::Parser;
use surrobench_core::solvers::{parse_override, SolverKind};
use surrobench_core::RunStatus;

use crate::harness::{run_experiment, ConfigError, ExperimentConfig, HarnessError};
use crate::problem::ProblemSpec;

/// Default output directory when `--out-path` is absent.
pub const OUT_ENV: &str = "SURROBENCH_OUT";

#[derive(Parser, Debug)]
#[command(
    name = "surrobench",
    about = "Run surrogate-based optimisers on a benchmark problem and log every evaluation",
    after_help = "Problems: pipe-proxy[:d=..,radius=..], esp-proxy[:slots=..,options=..,window=..,seed=..], \
windwake-toy[:turbines=..,scenarios=..,field=..,rotor=..,spacing=..,seed=..], hpo-proxy, subprocess\n\
Solvers: randomsearch, gp-ucb, rff-local, pwl-low, pwl-high, forest-ucb"
)]
pub struct Args {
    /// Runs per solver (T).
    #[arg(long, default_value_t = 1)]
    pub repetitions: usize,
    /// Directory for run logs.
    #[arg(long, env = OUT_ENV, default_value = "results")]
    pub out_path: PathBuf,
    /// Evaluations per run.
    #[arg(long, default_value_t = 100)]
    pub max_eval: usize,
    /// Random initial evaluations per run (R).
    #[arg(long, default_value_t = 10)]
    pub rand_evals_all: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Stop each run once this many seconds are spent.
    #[arg(long)]
    pub budget_seconds: Option<f64>,
    /// Simulate time instead of sleeping and measuring it.
    #[arg(long)]
    pub virtual_time: bool,
    /// Runs executed in parallel.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Artificial seconds added to each evaluation.
    #[arg(long, default_value_t = 0.0)]
    pub delay: f64,
    /// Standard deviation of additive Gaussian noise.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    /// Solver parameter, `kind.param=value`; repeatable.
    #[arg(long = "override", value_name = "KIND.PARAM=VALUE")]
    pub overrides: Vec<String>,
    /// Command for the subprocess problem; `{input}` is the point file.
    #[arg(long)]
    pub command: Option<String>,
    /// JSON search-space description for the subprocess problem.
    #[arg(long)]
    pub space_file: Option<PathBuf>,
    /// Per-evaluation timeout for the subprocess problem, seconds.
    #[arg(long)]
    pub timeout: Option<f64>,
    /// Problem token.
    pub problem: String,
    /// One or more solver ids.
    #[arg(required = true)]
    pub solvers: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Harness(#[from] HarnessError),
}

impl Args {
    pub fn to_config(&self) -> Result<ExperimentConfig, CliError> {
        let usage = |e: &dyn std::fmt::Display| CliError::Usage(e.to_string());
        let mut problem = ProblemSpec::parse(&self.problem).map_err(|e| usage(&e))?;
        if let ProblemSpec::Subprocess { command, space_file, timeout } = &mut problem {
            *command = self.command.clone().unwrap_or_default();
            *space_file = self.space_file.clone().unwrap_or_default();
            *timeout = self.timeout;
        }
        let solvers = self.solvers.iter().map(|s| SolverKind::parse(s)).collect::<Result<Vec<_>, _>>().map_err(|e| usage(&e))?;
        let overrides = self.overrides.iter().map(|s| parse_override(s)).collect::<Result<Vec<_>, _>>().map_err(|e| usage(&e))?;
        let mut cfg = ExperimentConfig::new(problem, solvers, &self.out_path);
        cfg.overrides = overrides;
        cfg.repetitions = self.repetitions;
        cfg.max_eval = self.max_eval;
        cfg.rand_evals = self.rand_evals_all;
        cfg.base_seed = self.seed;
        cfg.budget_seconds = self.budget_seconds;
        cfg.virtual_time = self.virtual_time;
        cfg.jobs = self.jobs;
        cfg.delay = self.delay;
        cfg.noise = self.noise;
        cfg.validate().map_err(|e| usage(&e))?;
        Ok(cfg)
    }
}

/// Parses `argv` (program name first), runs the experiment and returns the
/// process exit code: 0 on success, 1 if a run aborted or files could not
/// be written, 2 on usage errors.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let cfg = match args.to_config() {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "error: {e}\n\nFor more information, try '--help'.");
            return 2;
        }
    };
    match run_experiment(&cfg) {
        Ok(outputs) => {
            let mut code = 0;
            for o in &outputs {
                match o.status {
                    RunStatus::Aborted => {
                        code = 1;
                        let reason = o.abort_reason.as_deref().unwrap_or("unknown");
                        let _ = writeln!(err, "run {}#{} aborted: {reason}", o.solver_id, o.repetition);
                    }
                    RunStatus::Empty => {
                        let _ = writeln!(err, "run {}#{} is empty: the budget allowed no evaluation", o.solver_id, o.repetition);
                    }
                    RunStatus::Complete => {}
                }
            }
            let _ = writeln!(out, "wrote {} run logs to {}", outputs.len(), cfg.out_path.display());
            code
        }
        Err(HarnessError::Config(e @ ConfigError::RandEvalsExceedMaxEval { .. })) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}
