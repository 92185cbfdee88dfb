use std::io::Write;
use std::path::Path;

use super::{parallel_map, SuiteOptions};
use crate::error::{Error, Result};
use crate::probgen::{read_problem, ManifestEntry};
use crate::problem::QuadraticProblem;
use crate::solver::{reference_objective, solve, AlphaBalance, Algorithm, RunStatus, SolverConfig, Termination};

const SWEEP_TOL: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub problem: String,
    pub factor: f64,
    pub mv: Option<u64>,
    pub status: RunStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub factor: f64,
    /// Mean over problems of `mv(factor) / mv(1)`; infinite if any run failed.
    pub mean_inflation: f64,
    pub converged: usize,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub cells: Vec<SweepCell>,
}

fn sweep_one(id: &str, p: &QuadraticProblem, f_star: f64, factor: f64, mv_budget: u64) -> Result<SweepCell> {
    let cfg = SolverConfig {
        tol: SWEEP_TOL,
        termination: Termination::ReferenceObjective(f_star),
        mv_budget,
        alpha_bal: AlphaBalance::InvL { factor },
        ..SolverConfig::new(Algorithm::Iicg2)
    };
    let trace = solve(p, &cfg)?;
    Ok(SweepCell {
        problem: id.to_string(),
        factor,
        mv: trace.mv_to_tol(f_star, SWEEP_TOL),
        status: trace.status,
    })
}

/// iiCG-2 at accuracy `1e-4` with `α_bal = 1/(factor·L)` for each factor, on
/// problems with known `F*`. Factor 1 is always run as the baseline.
pub fn alpha_sweep_problems(
    problems: &[(String, QuadraticProblem, f64)],
    factors: &[f64],
    mv_budget: u64,
    threads: usize,
) -> Result<SweepResult> {
    if factors.iter().any(|f| !(*f > 0.0) || !f.is_finite()) {
        return Err(Error::argument("factors must be positive and finite"));
    }
    let mut all = vec![1.0];
    all.extend(factors.iter().copied().filter(|f| *f != 1.0));
    let jobs: Vec<(usize, f64)> = (0..problems.len())
        .flat_map(|p| all.iter().map(move |f| (p, *f)))
        .collect();
    let cells = parallel_map(&jobs, threads, |(p, factor)| {
        let (id, prob, f_star) = &problems[*p];
        sweep_one(id, prob, *f_star, *factor, mv_budget)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let rows = factors
        .iter()
        .map(|&factor| {
            let mut sum = 0.0;
            let mut used = 0usize;
            let mut converged = 0usize;
            for p in 0..problems.len() {
                let base = cells[p * all.len()].mv;
                let mine = cells
                    .iter()
                    .skip(p * all.len())
                    .take(all.len())
                    .find(|c| c.factor == factor)
                    .and_then(|c| c.mv);
                converged += mine.is_some() as usize;
                if let Some(b) = base {
                    used += 1;
                    sum += mine.map_or(f64::INFINITY, |m| m as f64 / b.max(1) as f64);
                }
            }
            SweepRow {
                factor,
                mean_inflation: if used == 0 { f64::NAN } else { sum / used as f64 },
                converged,
                total: problems.len(),
            }
        })
        .collect();
    Ok(SweepResult { rows, cells })
}

/// Loads every manifest instance, computes its reference objective, and runs
/// [`alpha_sweep_problems`].
pub fn alpha_sweep(entries: &[ManifestEntry], base: &Path, factors: &[f64], opts: &SuiteOptions) -> Result<SweepResult> {
    let loaded = parallel_map(entries, opts.threads, |e| -> Result<(String, QuadraticProblem, f64)> {
        let p = read_problem(e.resolve(base))?;
        let f_star = reference_objective(&p, opts.reference_budget)?;
        Ok((e.id.clone(), p, f_star))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    alpha_sweep_problems(&loaded, factors, opts.mv_budget, opts.threads)
}

pub fn write_sweep_csv<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["factor", "mean_inflation"])?;
    for r in rows {
        w.write_record([r.factor.to_string(), r.mean_inflation.to_string()])?;
    }
    w.flush().map_err(|e| Error::io("<sweep>", e))
}
