use std::collections::BTreeMap;
use std::io::Write;

use super::BenchRow;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Mv,
    Time,
}

/// `ρ_s(θ)` evaluated at every breakpoint ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileCurve {
    pub solver: String,
    /// `(θ, ρ(θ))` pairs with `θ` ascending.
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub curves: Vec<ProfileCurve>,
    pub warnings: Vec<String>,
}

const METRIC_FLOOR: f64 = 1e-9;

/// Performance profile of `metrics[p][s]` (`None` = failure, ratio `+∞`).
///
/// Problems where every solver failed are dropped with a warning; ρ is the
/// fraction of the remaining problems.
pub fn dolan_more_matrix(solvers: &[String], problems: &[String], metrics: &[Vec<Option<f64>>]) -> Result<Profile> {
    if solvers.is_empty() {
        return Err(Error::argument("profile needs at least one solver"));
    }
    let mut warnings = Vec::new();
    let mut ratios: Vec<Vec<Option<f64>>> = Vec::new();
    for (p, row) in metrics.iter().enumerate() {
        if row.len() != solvers.len() {
            return Err(Error::argument(format!("problem {} has {} entries for {} solvers", problems[p], row.len(), solvers.len())));
        }
        let best = row.iter().flatten().map(|m| m.max(METRIC_FLOOR)).fold(f64::INFINITY, f64::min);
        if !best.is_finite() {
            warnings.push(format!("every solver failed on {}; excluded from the profile", problems[p]));
            continue;
        }
        ratios.push(row.iter().map(|m| m.map(|m| m.max(METRIC_FLOOR) / best)).collect());
    }
    if ratios.is_empty() {
        return Err(Error::argument("no problem was solved by any solver"));
    }
    let mut breaks: Vec<f64> = ratios.iter().flatten().flatten().copied().collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let total = ratios.len() as f64;
    let curves = solvers
        .iter()
        .enumerate()
        .map(|(s, name)| ProfileCurve {
            solver: name.clone(),
            points: breaks
                .iter()
                .map(|&theta| {
                    let hits = ratios.iter().filter(|r| r[s].is_some_and(|v| v <= theta)).count();
                    (theta, hits as f64 / total)
                })
                .collect(),
        })
        .collect();
    Ok(Profile { curves, warnings })
}

/// Profile over bench rows; each `(problem, tol)` pair counts as one problem
/// unless `tol` selects a single target.
pub fn dolan_more(rows: &[BenchRow], metric: Metric, tol: Option<f64>) -> Result<Profile> {
    let mut solvers: Vec<String> = Vec::new();
    let mut cells: BTreeMap<(String, u64), BTreeMap<String, Option<f64>>> = BTreeMap::new();
    for r in rows.iter().filter(|r| tol.is_none_or(|t| r.tol == t)) {
        if !solvers.contains(&r.solver) {
            solvers.push(r.solver.clone());
        }
        let value = r.mv.map(|mv| match metric {
            Metric::Mv => mv as f64,
            Metric::Time => r.seconds,
        });
        cells
            .entry((r.problem.clone(), r.tol.to_bits()))
            .or_default()
            .insert(r.solver.clone(), value);
    }
    let mut names = Vec::new();
    let mut metrics = Vec::new();
    for ((problem, tol_bits), by_solver) in &cells {
        names.push(format!("{problem}@{}", f64::from_bits(*tol_bits)));
        metrics.push(solvers.iter().map(|s| by_solver.get(s).copied().flatten()).collect());
    }
    dolan_more_matrix(&solvers, &names, &metrics)
}

pub fn write_profile_csv<W: Write>(out: W, profile: &Profile) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["solver", "log2_theta", "rho"])?;
    for c in &profile.curves {
        for (theta, rho) in &c.points {
            w.write_record([c.solver.clone(), theta.log2().to_string(), rho.to_string()])?;
        }
    }
    w.flush().map_err(|e| Error::io("<profile>", e))
}
