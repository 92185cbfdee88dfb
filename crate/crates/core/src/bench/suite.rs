use std::io::{Read, Write};
use std::path::Path;
use std::time::Instant;

use super::{default_threads, parallel_map};
use crate::error::{Error, Result};
use crate::probgen::{read_problem, ManifestEntry};
use crate::problem::QuadraticProblem;
use crate::solver::{accuracy, reference_objective, solve, Algorithm, SolverConfig, Termination};

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub solvers: Vec<Algorithm>,
    pub tols: Vec<f64>,
    pub mv_budget: u64,
    /// Budget basis for the reference solve that defines `F*`.
    pub reference_budget: u64,
    pub threads: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            solvers: Algorithm::ALL.to_vec(),
            tols: vec![1e-4, 1e-10],
            mv_budget: 50_000,
            reference_budget: 50_000,
            threads: default_threads(),
        }
    }
}

/// One `(problem, solver, tol)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub problem: String,
    pub solver: String,
    pub tol: f64,
    /// Products to first reach `tol`; `None` is a failure.
    pub mv: Option<u64>,
    /// Wall time of the run, prorated to `mv` when the target was reached.
    pub seconds: f64,
    /// Accuracy at the first record meeting `tol`, or the best reached.
    pub accuracy: f64,
    /// `solved`, the run status on failure, or `error: ...`.
    pub status: String,
}

impl BenchRow {
    pub fn is_error(&self) -> bool {
        self.status.starts_with("error")
    }
}

#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub rows: Vec<BenchRow>,
    /// Reference objective per problem, in input order.
    pub f_star: Vec<(String, Option<f64>)>,
}

impl SuiteResult {
    pub fn has_errors(&self) -> bool {
        self.rows.iter().any(BenchRow::is_error)
    }
}

fn error_rows(id: &str, opts: &SuiteOptions, err: &Error) -> Vec<BenchRow> {
    let mut rows = Vec::new();
    for alg in &opts.solvers {
        for &tol in &opts.tols {
            rows.push(BenchRow {
                problem: id.to_string(),
                solver: alg.name().to_string(),
                tol,
                mv: None,
                seconds: 0.0,
                accuracy: f64::NAN,
                status: format!("error: {err}"),
            });
        }
    }
    rows
}

fn bench_problem(id: &str, problem: &QuadraticProblem, opts: &SuiteOptions) -> Result<(f64, Vec<BenchRow>)> {
    let f_star = reference_objective(problem, opts.reference_budget)?;
    let tol_min = opts.tols.iter().copied().fold(f64::INFINITY, f64::min);
    let mut rows = Vec::new();
    for &alg in &opts.solvers {
        let cfg = SolverConfig {
            tol: tol_min,
            termination: Termination::ReferenceObjective(f_star),
            mv_budget: opts.mv_budget,
            ..SolverConfig::new(alg)
        };
        let start = Instant::now();
        let trace = solve(problem, &cfg)?;
        let elapsed = start.elapsed().as_secs_f64();
        let best = accuracy(trace.best_f(), f_star);
        for &tol in &opts.tols {
            let hit = trace.mv_to_tol(f_star, tol);
            let row = match hit {
                Some(mv) => {
                    let acc = trace
                        .records
                        .iter()
                        .find(|r| r.mv == mv)
                        .map_or(accuracy(trace.initial_f, f_star), |r| accuracy(r.f, f_star));
                    BenchRow {
                        problem: id.to_string(),
                        solver: alg.name().to_string(),
                        tol,
                        mv: Some(mv),
                        seconds: elapsed * mv as f64 / trace.mv_total.max(1) as f64,
                        accuracy: acc,
                        status: "solved".into(),
                    }
                }
                None => BenchRow {
                    problem: id.to_string(),
                    solver: alg.name().to_string(),
                    tol,
                    mv: None,
                    seconds: elapsed,
                    accuracy: best,
                    status: trace.status.label().into(),
                },
            };
            rows.push(row);
        }
    }
    Ok((f_star, rows))
}

fn run_items<T: Sync>(items: &[T], opts: &SuiteOptions, load: impl Fn(&T) -> (String, Result<QuadraticProblem>) + Sync) -> Result<SuiteResult> {
    if opts.solvers.is_empty() || opts.tols.is_empty() {
        return Err(Error::argument("need at least one solver and one tolerance"));
    }
    if opts.tols.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::argument("tolerances must be positive"));
    }
    let per_problem = parallel_map(items, opts.threads, |item| {
        let (id, problem) = load(item);
        match problem.and_then(|p| bench_problem(&id, &p, opts)) {
            Ok((f_star, rows)) => (id, Some(f_star), rows),
            Err(e) => {
                let rows = error_rows(&id, opts, &e);
                (id, None, rows)
            }
        }
    });
    let mut result = SuiteResult {
        rows: Vec::new(),
        f_star: Vec::new(),
    };
    for (id, f_star, rows) in per_problem {
        result.f_star.push((id, f_star));
        result.rows.extend(rows);
    }
    Ok(result)
}

/// Benchmarks every manifest instance (paths relative to `base`). A problem
/// that cannot be loaded or solved yields error rows; the suite continues.
pub fn run_suite(entries: &[ManifestEntry], base: &Path, opts: &SuiteOptions) -> Result<SuiteResult> {
    run_items(entries, opts, |e| (e.id.clone(), read_problem(e.resolve(base))))
}

/// As [`run_suite`] for problems already in memory.
pub fn run_problems(problems: &[(String, QuadraticProblem)], opts: &SuiteOptions) -> Result<SuiteResult> {
    run_items(problems, opts, |(id, p)| (id.clone(), Ok(p.clone())))
}

pub fn write_bench_csv<W: Write>(out: W, rows: &[BenchRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["problem", "solver", "tol", "mv", "seconds", "accuracy", "status"])?;
    for r in rows {
        w.write_record([
            r.problem.clone(),
            r.solver.clone(),
            r.tol.to_string(),
            r.mv.map_or_else(|| "FAIL".to_string(), |m| m.to_string()),
            r.seconds.to_string(),
            r.accuracy.to_string(),
            r.status.clone(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<bench>", e))
}

#[derive(serde::Deserialize)]
struct CsvRow {
    problem: String,
    solver: String,
    tol: f64,
    mv: String,
    seconds: f64,
    accuracy: f64,
    status: String,
}

pub fn read_bench_csv<R: Read>(input: R) -> Result<Vec<BenchRow>> {
    let mut r = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for row in r.deserialize() {
        let row: CsvRow = row?;
        let mv = match row.mv.as_str() {
            "FAIL" => None,
            s => Some(s.parse().map_err(|_| Error::argument(format!("bad mv value {s:?}")))?),
        };
        rows.push(BenchRow {
            problem: row.problem,
            solver: row.solver,
            tol: row.tol,
            mv,
            seconds: row.seconds,
            accuracy: row.accuracy,
            status: row.status,
        });
    }
    Ok(rows)
}
