//! Executes a problem spec: preflight, solve, write artifacts.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use coupled_fpi_core::{preflight, CoupledFixedPoint, HypothesisReport, IterationTrace, Point};
use serde::Serialize;

use crate::spec::{ProblemSpec, SpecError};

pub const EXIT_OK: i32 = 0;
/// Bad input: unreadable or invalid spec, unusable output directory.
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PREFLIGHT: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_NOT_CONVERGED: i32 = 4;

pub const TRACE_FILE: &str = "trace.csv";
pub const REPORT_FILE: &str = "report.json";
pub const TRACE_HEADER: &str = "n,x,y,step_x,step_y,bound,diag,edge_ok_x,edge_ok_y";

/// Environment variable consulted when neither `--seed` nor the spec fixes
/// the sampler seed.
pub const SEED_ENV: &str = "COUPLED_FPI_SEED";

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    /// Solve even if preflight fails.
    pub force: bool,
    /// Overrides the spec's sampler seed.
    pub seed: Option<u64>,
    /// Used when neither `seed` nor the spec sets one.
    pub env_seed: Option<u64>,
    pub max_iter: Option<usize>,
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("{0}: {1}")]
    Io(PathBuf, std::io::Error),
    #[error("invalid value for {SEED_ENV}: '{0}'")]
    EnvSeed(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RunResult {
    Converged {
        fixed_point: CoupledFixedPoint,
        iterations: usize,
        residual: f64,
    },
    NotConverged {
        last: CoupledFixedPoint,
        iterations: usize,
        residual: f64,
    },
    SolverError {
        message: String,
    },
    /// Preflight failed and the run was not forced.
    NotRun,
}

#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub report: HypothesisReport,
    pub trace: Option<IterationTrace>,
    pub result: RunResult,
    pub rng_seed: u64,
    pub forced: bool,
    pub exit_code: i32,
}

#[derive(Serialize)]
struct ReportDocument<'a> {
    instance_id: &'a str,
    rng_seed: u64,
    preflight_passed: bool,
    forced: bool,
    preflight: &'a HypothesisReport,
    result: &'a RunResult,
    exit_code: i32,
}

/// `--seed`, then the spec, then the environment, then 0.
pub fn resolve_seed(cli: Option<u64>, spec: Option<u64>, env: Option<u64>) -> u64 {
    cli.or(spec).or(env).unwrap_or(0)
}

pub fn parse_env_seed(value: Option<&str>) -> Result<Option<u64>, RunError> {
    match value {
        None => Ok(None),
        Some(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| RunError::EnvSeed(v.to_string())),
    }
}

/// Runs `spec` and writes `report.json` (always) and `trace.csv` (whenever
/// the solver produced a trace) into `opts.out_dir`.
pub fn run(spec: &ProblemSpec, opts: &RunOptions) -> Result<RunArtifacts, RunError> {
    let compiled = spec.compile()?;
    let mut problem = compiled.problem;
    if let Some(n) = opts.max_iter {
        if n == 0 {
            return Err(SpecError::Field {
                field: "--max-iter".into(),
                message: "must be at least 1".into(),
            }
            .into());
        }
        problem.solve = problem.solve.clone().max_iter(n);
    }
    let rng_seed = resolve_seed(opts.seed, spec.sampler.rng_seed, opts.env_seed);
    let sampler = compiled.sampler.with_seed(rng_seed);

    let report = preflight(&problem, &sampler);
    let passed = report.satisfies(problem.solve.mode);

    let (trace, result, exit_code) = if !passed && !opts.force {
        (None, RunResult::NotRun, EXIT_PREFLIGHT)
    } else {
        match problem.solve_with(&problem.solve) {
            Ok(sol) => {
                let iterations = sol.trace.len();
                let residual = sol.trace.residual;
                if sol.converged() {
                    let result = RunResult::Converged {
                        fixed_point: sol.fixed_point,
                        iterations,
                        residual,
                    };
                    (Some(sol.trace), result, EXIT_OK)
                } else {
                    let result = RunResult::NotConverged {
                        last: sol.fixed_point,
                        iterations,
                        residual,
                    };
                    (Some(sol.trace), result, EXIT_NOT_CONVERGED)
                }
            }
            Err(e) => (
                None,
                RunResult::SolverError {
                    message: e.to_string(),
                },
                EXIT_SOLVER,
            ),
        }
    };

    let artifacts = RunArtifacts {
        report,
        trace,
        result,
        rng_seed,
        forced: opts.force,
        exit_code,
    };

    std::fs::create_dir_all(&opts.out_dir).map_err(|e| RunError::Io(opts.out_dir.clone(), e))?;
    if let Some(trace) = &artifacts.trace {
        write_atomic(&opts.out_dir.join(TRACE_FILE), trace_csv(trace).as_bytes())?;
    }
    write_atomic(
        &opts.out_dir.join(REPORT_FILE),
        report_json(&artifacts, passed).as_bytes(),
    )?;
    Ok(artifacts)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), RunError> {
    let io = |e: std::io::Error| RunError::Io(path.to_path_buf(), e);
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

pub fn report_json(artifacts: &RunArtifacts, preflight_passed: bool) -> String {
    let doc = ReportDocument {
        instance_id: &artifacts.report.instance_id,
        rng_seed: artifacts.rng_seed,
        preflight_passed,
        forced: artifacts.forced,
        preflight: &artifacts.report,
        result: &artifacts.result,
        exit_code: artifacts.exit_code,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
    s.push('\n');
    s
}

/// Shortest round-trip decimal, switching to exponent form for very large or
/// small magnitudes.
pub fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-5..1e16).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn fmt_point(p: &Point) -> String {
    p.coords()
        .iter()
        .map(|&c| fmt_f64(c))
        .collect::<Vec<_>>()
        .join(";")
}

fn fmt_flag(b: Option<bool>) -> &'static str {
    match b {
        Some(true) => "true",
        Some(false) => "false",
        None => "",
    }
}

/// One row per recorded step. Vector points are `;`-joined.
pub fn trace_csv(trace: &IterationTrace) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for s in &trace.steps {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            s.n,
            fmt_point(&s.x),
            fmt_point(&s.y),
            fmt_f64(s.step_x),
            fmt_f64(s.step_y),
            fmt_f64(s.bound),
            fmt_f64(s.diag),
            fmt_flag(s.edge_ok_x),
            fmt_flag(s.edge_ok_y),
        );
    }
    out
}

const TABLE_HEAD: usize = 12;
const TABLE_TAIL: usize = 3;

/// Human-readable summary for standard output.
pub fn render_table(artifacts: &RunArtifacts) -> String {
    let mut out = String::new();
    let r = &artifacts.report;
    let _ = writeln!(
        out,
        "instance {}  (k = {}, rng seed {})",
        r.instance_id, r.k, artifacts.rng_seed
    );
    for c in &r.certificates {
        let _ = writeln!(
            out,
            "  {:<24} {:<12} {} samples",
            format!("{:?}", c.property),
            format!("{:?}", c.outcome).to_lowercase(),
            c.samples_tested
        );
    }
    let _ = writeln!(
        out,
        "  seed edge                {}",
        if r.seed_edge_ok { "ok" } else { "missing" }
    );
    let _ = writeln!(out, "  applicable result        {:?}", r.theorem_applicable);

    if let Some(trace) = &artifacts.trace {
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "{:>6}  {:>24}  {:>24}  {:>12}  {:>12}",
            "n", "x", "y", "step", "bound"
        );
        let n = trace.steps.len();
        for (i, s) in trace.steps.iter().enumerate() {
            if n > TABLE_HEAD + TABLE_TAIL && i == TABLE_HEAD {
                let _ = writeln!(out, "{:>6}", "...");
            }
            if n > TABLE_HEAD + TABLE_TAIL && (TABLE_HEAD..n - TABLE_TAIL).contains(&i) {
                continue;
            }
            let _ = writeln!(
                out,
                "{:>6}  {:>24}  {:>24}  {:>12.4e}  {:>12.4e}",
                s.n,
                fmt_point(&s.x),
                fmt_point(&s.y),
                s.step_x + s.step_y,
                2.0 * s.bound
            );
        }
    }

    let _ = writeln!(out);
    match &artifacts.result {
        RunResult::Converged {
            fixed_point,
            iterations,
            residual,
        } => {
            let _ = writeln!(
                out,
                "converged after {iterations} steps to ({}, {}), residual {residual:e}",
                fmt_point(&fixed_point.x),
                fmt_point(&fixed_point.y)
            );
        }
        RunResult::NotConverged {
            last, iterations, ..
        } => {
            let _ = writeln!(
                out,
                "no convergence in {iterations} steps; last iterate ({}, {})",
                fmt_point(&last.x),
                fmt_point(&last.y)
            );
        }
        RunResult::SolverError { message } => {
            let _ = writeln!(out, "solver error: {message}");
        }
        RunResult::NotRun => {
            let _ = writeln!(
                out,
                "preflight failed; solver not run (use --force to override)"
            );
        }
    }
    out
}
