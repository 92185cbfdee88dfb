use std::io::Write;

use crate::error::{Error, Result};
use crate::solver::{accuracy, TraceRecord};

/// Non-dominated `(accuracy, nnz)` pairs, sorted by accuracy ascending.
///
/// `a` dominates `b` when it is no worse in both coordinates and better in
/// one; duplicates collapse to a single point.
pub fn pareto_points(points: &[(f64, usize)]) -> Vec<(f64, usize)> {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut out: Vec<(f64, usize)> = Vec::new();
    for p in sorted {
        if out.last().is_none_or(|last| p.1 < last.1) {
            out.push(p);
        }
    }
    out
}

pub fn pareto_frontier(records: &[TraceRecord], f_star: f64) -> Vec<(f64, usize)> {
    let points: Vec<_> = records.iter().map(|r| (accuracy(r.f, f_star), r.nnz)).collect();
    pareto_points(&points)
}

pub fn write_pareto_csv<W: Write>(out: W, frontier: &[(f64, usize)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["accuracy", "nnz"])?;
    for (acc, nnz) in frontier {
        w.write_record([acc.to_string(), nnz.to_string()])?;
    }
    w.flush().map_err(|e| Error::io("<pareto>", e))
}

/// Run lengths of consecutive CG/cutback records, numbered from 1.
pub fn cg_phase_histogram(records: &[TraceRecord]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut run = 0;
    for r in records {
        if r.step.is_cg_phase() {
            run += 1;
        } else if run > 0 {
            out.push((out.len() + 1, run));
            run = 0;
        }
    }
    if run > 0 {
        out.push((out.len() + 1, run));
    }
    out
}
