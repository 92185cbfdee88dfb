//! Solver loops, termination, and run traces.
//!
//! Every solve works on a private fork of the problem's operator, so the
//! matrix-vector count it reports is exactly the number of products it made,
//! including the power iterations used to estimate `L` and every line-search
//! trial.

mod config;
mod fista;
mod iicg;
mod istabb;
mod lipschitz;
mod trace;

pub use config::{AlphaBalance, AlphaPolicy, Algorithm, SolverConfig, Termination};
pub use lipschitz::estimate_lipschitz;
pub use trace::{read_trace_csv, RunStatus, RunTrace, StepKind, TraceRecord};

use crate::error::{check_len, Result};
use crate::linalg::{nnz, norm_inf};
use crate::problem::QuadraticProblem;
use crate::subgrad::v_norm_inf;

/// Relative gap `(F_k − F*) / max(|F*|, 1e-12)`.
pub fn accuracy(f: f64, f_star: f64) -> f64 {
    (f - f_star) / f_star.abs().max(1e-12)
}

/// Runs the configured algorithm on a private fork of `problem`.
pub fn solve(problem: &QuadraticProblem, cfg: &SolverConfig) -> Result<RunTrace> {
    cfg.validate()?;
    let mut run = Run::start(problem, cfg)?;
    if run.status.is_none() {
        match cfg.algorithm {
            Algorithm::Iicg1 => iicg::run(&mut run, iicg::Variant::One)?,
            Algorithm::Iicg2 => iicg::run(&mut run, iicg::Variant::Two)?,
            Algorithm::Fista => fista::run(&mut run)?,
            Algorithm::IstaBb => istabb::run(&mut run)?,
        }
    }
    Ok(run.finish())
}

/// Settings for the high-accuracy reference solve that defines `F*`.
pub fn reference_config(mv_budget: u64) -> SolverConfig {
    SolverConfig {
        termination: Termination::SubgradientNorm,
        tol: 1e-13,
        mv_budget: 4 * mv_budget,
        ..SolverConfig::new(Algorithm::Iicg2)
    }
}

/// Best objective value found by the reference solve.
pub fn reference_objective(problem: &QuadraticProblem, mv_budget: u64) -> Result<f64> {
    Ok(solve(problem, &reference_config(mv_budget))?.best_f())
}

/// State of one iterate as seen by the bookkeeping: point, `Ax − b`, `F`.
pub(crate) struct Iterate {
    pub x: Vec<f64>,
    pub g: Vec<f64>,
    pub f: f64,
}

/// Bookkeeping shared by all drivers.
pub(crate) struct Run<'a> {
    pub problem: QuadraticProblem,
    pub cfg: &'a SolverConfig,
    pub lipschitz: f64,
    pub current: Iterate,
    trace: RunTrace,
    k: u64,
    threshold_v: f64,
    best: (f64, Vec<f64>),
    last_f: f64,
    last_progress_mv: u64,
    pub status: Option<RunStatus>,
}

const STALL_WINDOW: u64 = 1000;
const STALL_RTOL: f64 = 1e-16;

impl<'a> Run<'a> {
    fn start(problem: &QuadraticProblem, cfg: &'a SolverConfig) -> Result<Self> {
        let problem = problem.fork();
        let n = problem.n();
        let lipschitz = match cfg.lipschitz {
            Some(l) => l,
            None => estimate_lipschitz(&problem.op, cfg.seed)?,
        };
        let x = match &cfg.x0 {
            Some(x0) => {
                check_len("initial point", n, x0.len())?;
                x0.clone()
            }
            None => vec![0.0; n],
        };
        let g = if x.iter().all(|v| *v == 0.0) {
            problem.b.iter().map(|b| -b).collect()
        } else {
            problem.eval_gradient(&x)?
        };
        let f = problem.objective_with_gradient(&x, &g);
        let v0 = v_norm_inf(&x, &g, problem.tau);
        let mv = problem.op.mv_count();
        let trace = RunTrace {
            algorithm: cfg.algorithm,
            records: Vec::new(),
            initial_f: f,
            initial_mv: mv,
            initial_x: x.clone(),
            final_x: Vec::new(),
            final_f: f,
            status: RunStatus::BudgetExhausted,
            mv_total: mv,
            lipschitz,
            ls_memory: cfg.ls.memory,
            diagnostics: Vec::new(),
        };
        let mut run = Self {
            lipschitz,
            cfg,
            threshold_v: cfg.tol * v0.max(1.0),
            best: (f, x.clone()),
            last_f: f,
            last_progress_mv: mv,
            current: Iterate { x, g, f },
            trace,
            k: 0,
            status: None,
            problem,
        };
        if run.converged() {
            run.status = Some(RunStatus::Converged);
        } else if mv >= cfg.mv_budget {
            run.status = Some(RunStatus::BudgetExhausted);
        }
        Ok(run)
    }

    pub fn mv(&self) -> u64 {
        self.problem.op.mv_count()
    }

    pub fn remaining(&self) -> u64 {
        self.cfg.mv_budget.saturating_sub(self.mv())
    }

    pub fn tau(&self) -> f64 {
        self.problem.tau
    }

    /// Steplength for the constant-step policy.
    pub fn step_alpha(&self) -> f64 {
        1.0 / self.lipschitz
    }

    /// Steplength used in `ψ` for the gradient balance test.
    pub fn alpha_bal(&self) -> f64 {
        match self.cfg.alpha_bal {
            AlphaBalance::InvL { factor } => 1.0 / (factor * self.lipschitz),
            AlphaBalance::Fixed(a) => a,
        }
    }

    fn converged(&self) -> bool {
        self.converged_at(&self.current)
    }

    fn converged_at(&self, it: &Iterate) -> bool {
        match self.cfg.termination {
            Termination::SubgradientNorm => v_norm_inf(&it.x, &it.g, self.problem.tau) <= self.threshold_v,
            Termination::ReferenceObjective(f_star) => accuracy(it.f, f_star) <= self.cfg.tol,
        }
    }

    /// For subgradient termination, re-derive `g` with an explicit (charged)
    /// product before trusting a recurrence-updated gradient. Returns true if
    /// `it.g` was replaced.
    pub fn confirm_gradient(&mut self, it: &mut Iterate) -> Result<bool> {
        if self.cfg.termination != Termination::SubgradientNorm || !self.converged_at(it) {
            return Ok(false);
        }
        if self.remaining() == 0 {
            return Ok(false);
        }
        it.g = self.problem.eval_gradient(&it.x)?;
        it.f = self.problem.objective_with_gradient(&it.x, &it.g);
        Ok(true)
    }

    pub fn diagnostic(&mut self, msg: String) {
        self.trace.diagnostics.push(msg);
    }

    /// Makes `it` the current iterate and appends a trace record. Returns
    /// true when the run has to stop (see `status`).
    pub fn record(&mut self, it: Iterate, step: StepKind, ls_bound: Option<f64>) -> bool {
        self.k += 1;
        let mv = self.mv();
        if self.cfg.theory_checks {
            self.check_residual(&it);
        }
        self.trace.records.push(TraceRecord {
            mv,
            k: self.k,
            f: it.f,
            nnz: nnz(&it.x),
            step,
            ls_bound,
            x: self.cfg.theory_checks.then(|| it.x.clone()),
        });
        if it.f < self.best.0 {
            self.best = (it.f, it.x.clone());
        }
        let rel = (it.f - self.last_f).abs() / self.last_f.abs().max(f64::MIN_POSITIVE);
        if rel >= STALL_RTOL {
            self.last_progress_mv = mv;
        }
        self.last_f = it.f;
        self.current = it;

        if self.converged() {
            self.status = Some(RunStatus::Converged);
        } else if mv >= self.cfg.mv_budget {
            self.status = Some(RunStatus::BudgetExhausted);
        } else if mv - self.last_progress_mv >= STALL_WINDOW {
            self.status = Some(RunStatus::Stalled);
        }
        self.status.is_some()
    }

    /// Flags a budget stop that happened before an iterate could be produced.
    pub fn exhausted(&mut self) {
        self.status = Some(RunStatus::BudgetExhausted);
    }

    /// Theory mode: compare the carried gradient with an uncharged product.
    fn check_residual(&mut self, it: &Iterate) {
        let Ok(ax) = self.problem.op.apply_uncounted(&it.x) else {
            return;
        };
        let explicit = self.problem.gradient_with_ax(&ax);
        let scale = self.lipschitz * norm_inf(&it.x).max(1.0) + norm_inf(&self.problem.b);
        let drift = explicit
            .iter()
            .zip(&it.g)
            .fold(0.0, |m, (a, b)| f64::max(m, (a - b).abs()));
        if drift > 1e-8 * scale {
            let msg = format!("k={}: gradient drift {drift:.3e} exceeds {:.3e}", self.k + 1, 1e-8 * scale);
            self.trace.diagnostics.push(msg);
        }
    }

    fn finish(mut self) -> RunTrace {
        let status = self.status.unwrap_or(RunStatus::BudgetExhausted);
        let (final_x, final_f) = if status == RunStatus::Converged {
            (self.current.x, self.current.f)
        } else {
            (self.best.1, self.best.0)
        };
        self.trace.status = status;
        self.trace.final_x = final_x;
        self.trace.final_f = final_f;
        self.trace.mv_total = self.problem.op.mv_count();
        self.trace
    }
}
