//! First-order steps: full ISTA, subspace ISTA, and the Barzilai-Borwein
//! variant with a nonmonotone backtracking line search.

use std::collections::VecDeque;

use crate::error::{check_len, Error, Result};
use crate::linalg::{dot, norm_sq, soft_threshold, sub};
use crate::problem::QuadraticProblem;

/// `softthreshold(x − αg, ατ)` componentwise; equals `x − αω − αψ`.
pub fn ista_step(x: &[f64], g: &[f64], tau: f64, alpha: f64) -> Result<Vec<f64>> {
    check_len("ista gradient", x.len(), g.len())?;
    Ok(x.iter()
        .zip(g)
        .map(|(&xi, &gi)| soft_threshold(xi - alpha * gi, alpha * tau))
        .collect())
}

/// ISTA on the nonzero coordinates only; zeros stay exactly zero.
/// Equals `x − αψ`.
pub fn subspace_ista_step(x: &[f64], g: &[f64], tau: f64, alpha: f64) -> Result<Vec<f64>> {
    check_len("subspace ista gradient", x.len(), g.len())?;
    Ok(x.iter()
        .zip(g)
        .map(|(&xi, &gi)| {
            if xi == 0.0 {
                0.0
            } else {
                soft_threshold(xi - alpha * gi, alpha * tau)
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IstaMode {
    Full,
    Subspace,
}

impl IstaMode {
    pub fn step(self, x: &[f64], g: &[f64], tau: f64, alpha: f64) -> Result<Vec<f64>> {
        match self {
            IstaMode::Full => ista_step(x, g, tau, alpha),
            IstaMode::Subspace => subspace_ista_step(x, g, tau, alpha),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSearchParams {
    /// Number of past objective values in the nonmonotone window.
    pub memory: usize,
    /// Sufficient-decrease constant ξ.
    pub xi: f64,
    /// Trials before the line search gives up and takes the fallback step.
    pub max_halvings: u32,
}

impl Default for LineSearchParams {
    fn default() -> Self {
        Self {
            memory: 5,
            xi: 0.005,
            max_halvings: 60,
        }
    }
}

/// FIFO of the last `M` accepted objective values.
#[derive(Debug, Clone)]
pub struct LineSearchMemory {
    window: VecDeque<f64>,
    pub xi: f64,
    pub max_halvings: u32,
}

impl LineSearchMemory {
    /// Window filled with `f0`.
    pub fn new(params: LineSearchParams, f0: f64) -> Result<Self> {
        if params.memory == 0 || params.max_halvings == 0 {
            return Err(Error::argument("line search memory and max_halvings must be positive"));
        }
        if !f0.is_finite() {
            return Err(Error::argument("initial objective must be finite"));
        }
        Ok(Self {
            window: vec![f0; params.memory].into(),
            xi: params.xi,
            max_halvings: params.max_halvings,
        })
    }

    pub fn max(&self) -> f64 {
        self.window.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.window.iter().copied()
    }

    /// Shift in a newly accepted value, dropping the oldest.
    pub fn push(&mut self, f: f64) {
        self.window.pop_back();
        self.window.push_front(f);
    }
}

/// An accepted line-search step.
#[derive(Debug, Clone)]
pub struct BbStep {
    pub x: Vec<f64>,
    /// `Ax − b` at the new point.
    pub g: Vec<f64>,
    pub f: f64,
    /// Steplength of the accepted trial.
    pub alpha: f64,
    pub mv_used: u64,
    /// The trial budget ran out and the `1/L` fallback was taken.
    pub fallback: bool,
    /// Right-hand side of the acceptance test the step passed.
    pub bound: Option<f64>,
}

/// Barzilai-Borwein steplength `sᵀs / sᵀAs` with `As = g − g_prev`.
/// Falls back to `alpha_fallback` when no usable curvature pair exists.
pub fn bb_steplength(
    x: &[f64],
    g: &[f64],
    prev: Option<(&[f64], &[f64])>,
    alpha_fallback: f64,
) -> f64 {
    let Some((x_prev, g_prev)) = prev else {
        return alpha_fallback;
    };
    let s = sub(x, x_prev);
    let y = sub(g, g_prev);
    let ss = norm_sq(&s);
    let sy = dot(&s, &y);
    let alpha = ss / sy;
    if ss > 0.0 && sy > 0.0 && alpha.is_finite() {
        alpha
    } else {
        alpha_fallback
    }
}

/// Trial point, its gradient and objective.
type Trial = (Vec<f64>, Vec<f64>, f64);

/// One ISTA-BB-LS step from `x` (with gradient `g`).
///
/// Trial `t` uses steplength `α_B·2⁻ᵗ`; the trial point is accepted when
/// `F(x_F) ≤ max(window) − (α/2)·ξ·‖x − x_F‖²`, `α` being that trial's
/// steplength (the steplength is halved before the test). Each trial costs one
/// matrix-vector product, which also yields the new gradient. After
/// `max_halvings` rejected trials the step `1/L` is taken unconditionally.
///
/// Returns `Ok(None)` if `mv_limit` products are used up before a step is
/// accepted. The accepted objective value is shifted into `mem`.
#[allow(clippy::too_many_arguments)]
pub fn ista_bb_ls(
    problem: &QuadraticProblem,
    x: &[f64],
    g: &[f64],
    prev: Option<(&[f64], &[f64])>,
    mode: IstaMode,
    mem: &mut LineSearchMemory,
    alpha_fallback: f64,
    mv_limit: u64,
) -> Result<Option<BbStep>> {
    check_len("line search point", problem.n(), x.len())?;
    check_len("line search gradient", problem.n(), g.len())?;
    if !(alpha_fallback > 0.0) {
        return Err(Error::argument("fallback steplength must be positive"));
    }
    let tau = problem.tau;
    let f_ref = mem.max();
    let mut alpha = bb_steplength(x, g, prev, alpha_fallback);
    let mut used = 0u64;

    let evaluate = |alpha: f64, used: &mut u64| -> Result<Option<Trial>> {
        if *used >= mv_limit {
            return Ok(None);
        }
        let x_f = mode.step(x, g, tau, alpha)?;
        let ax = problem.op.apply(&x_f)?;
        *used += 1;
        let f = problem.objective_with_ax(&x_f, &ax)?;
        Ok(Some((x_f, problem.gradient_with_ax(&ax), f)))
    };

    for _ in 0..mem.max_halvings {
        let Some((x_f, g_f, f)) = evaluate(alpha, &mut used)? else {
            return Ok(None);
        };
        let halved = alpha / 2.0;
        let bound = f_ref - halved * mem.xi * norm_sq(&sub(x, &x_f));
        if f <= bound {
            mem.push(f);
            return Ok(Some(BbStep {
                x: x_f,
                g: g_f,
                f,
                alpha,
                mv_used: used,
                fallback: false,
                bound: Some(bound),
            }));
        }
        alpha = halved;
    }

    let Some((x_f, g_f, f)) = evaluate(alpha_fallback, &mut used)? else {
        return Ok(None);
    };
    mem.push(f);
    Ok(Some(BbStep {
        x: x_f,
        g: g_f,
        f,
        alpha: alpha_fallback,
        mv_used: used,
        fallback: true,
        bound: None,
    }))
}
