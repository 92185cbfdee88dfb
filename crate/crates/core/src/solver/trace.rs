use super::config::Algorithm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepKind {
    Ista,
    SubIsta,
    Cg,
    Cutback,
    /// Line search exhausted its trials and took the `1/L` step.
    LsFallback,
}

impl StepKind {
    pub fn label(self) -> &'static str {
        match self {
            StepKind::Ista => "ISTA",
            StepKind::SubIsta => "SUBISTA",
            StepKind::Cg => "CG",
            StepKind::Cutback => "CUTBACK",
            StepKind::LsFallback => "LSFALLBACK",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "ISTA" => StepKind::Ista,
            "SUBISTA" => StepKind::SubIsta,
            "CG" => StepKind::Cg,
            "CUTBACK" => StepKind::Cutback,
            "LSFALLBACK" => StepKind::LsFallback,
            _ => return None,
        })
    }

    pub fn is_cg_phase(self) -> bool {
        matches!(self, StepKind::Cg | StepKind::Cutback)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Converged,
    BudgetExhausted,
    /// No relative objective change above `1e-16` for 1000 products.
    Stalled,
}

impl RunStatus {
    pub fn label(self) -> &'static str {
        match self {
            RunStatus::Converged => "converged",
            RunStatus::BudgetExhausted => "budget",
            RunStatus::Stalled => "stalled",
        }
    }
}

/// One accepted iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    /// Products used so far, including `L` estimation.
    pub mv: u64,
    pub k: u64,
    pub f: f64,
    pub nnz: usize,
    pub step: StepKind,
    /// Acceptance bound of the line search, for line-search steps.
    pub ls_bound: Option<f64>,
    /// The iterate itself; only captured in theory mode.
    pub x: Option<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct RunTrace {
    pub algorithm: Algorithm,
    pub records: Vec<TraceRecord>,
    pub initial_f: f64,
    /// Products spent before the first step.
    pub initial_mv: u64,
    pub initial_x: Vec<f64>,
    /// Last iterate if converged, otherwise the best one seen.
    pub final_x: Vec<f64>,
    pub final_f: f64,
    pub status: RunStatus,
    pub mv_total: u64,
    pub lipschitz: f64,
    pub ls_memory: usize,
    pub diagnostics: Vec<String>,
}

impl RunTrace {
    pub fn best_f(&self) -> f64 {
        self.records.iter().map(|r| r.f).fold(self.initial_f, f64::min)
    }

    /// Products needed to first reach relative accuracy `tol` against `f_star`.
    pub fn mv_to_tol(&self, f_star: f64, tol: f64) -> Option<u64> {
        if super::accuracy(self.initial_f, f_star) <= tol {
            return Some(self.initial_mv);
        }
        self.records
            .iter()
            .find(|r| super::accuracy(r.f, f_star) <= tol)
            .map(|r| r.mv)
    }

    /// Writes the records as `mv,k,F,nnz,step` rows.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> crate::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["mv", "k", "F", "nnz", "step"])?;
        for r in &self.records {
            w.write_record([
                r.mv.to_string(),
                r.k.to_string(),
                r.f.to_string(),
                r.nnz.to_string(),
                r.step.label().to_string(),
            ])?;
        }
        w.flush().map_err(|e| crate::Error::io("<trace>", e))?;
        Ok(())
    }
}

#[derive(serde::Deserialize)]
struct CsvRow {
    mv: u64,
    k: u64,
    #[serde(rename = "F")]
    f: f64,
    nnz: usize,
    step: String,
}

/// Parses a trace CSV written by [`RunTrace::write_csv`].
pub fn read_trace_csv<R: std::io::Read>(input: R) -> crate::Result<Vec<TraceRecord>> {
    let mut r = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for row in r.deserialize() {
        let row: CsvRow = row?;
        let step = StepKind::parse(&row.step)
            .ok_or_else(|| crate::Error::argument(format!("unknown step type {:?}", row.step)))?;
        out.push(TraceRecord {
            mv: row.mv,
            k: row.k,
            f: row.f,
            nnz: row.nnz,
            step,
            ls_bound: None,
            x: None,
        });
    }
    Ok(out)
}
