use super::{AlphaPolicy, Iterate, Run, StepKind};
use crate::error::Result;
use crate::steps::{ista_bb_ls, IstaMode, LineSearchMemory};

/// First-order step shared by the drivers. Returns `None` when the budget
/// ran out first.
pub(super) fn first_order(
    run: &mut Run,
    mode: IstaMode,
    prev: Option<(&[f64], &[f64])>,
    mem: &mut LineSearchMemory,
) -> Result<Option<(Iterate, StepKind, Option<f64>)>> {
    let tau = run.tau();
    let alpha = run.step_alpha();
    let plain = match mode {
        IstaMode::Full => StepKind::Ista,
        IstaMode::Subspace => StepKind::SubIsta,
    };
    match run.cfg.alpha_policy {
        AlphaPolicy::ConstantInvL => {
            if run.remaining() == 0 {
                return Ok(None);
            }
            let cur = &run.current;
            let x = mode.step(&cur.x, &cur.g, tau, alpha)?;
            let ax = run.problem.op.apply(&x)?;
            let f = run.problem.objective_with_ax(&x, &ax)?;
            let g = run.problem.gradient_with_ax(&ax);
            Ok(Some((Iterate { x, g, f }, plain, None)))
        }
        AlphaPolicy::BbLineSearch => {
            let limit = run.remaining();
            let cur = &run.current;
            let step = ista_bb_ls(&run.problem, &cur.x, &cur.g, prev, mode, mem, alpha, limit)?;
            Ok(step.map(|s| {
                let kind = if s.fallback { StepKind::LsFallback } else { plain };
                (Iterate { x: s.x, g: s.g, f: s.f }, kind, s.bound)
            }))
        }
    }
}

pub(super) fn run(run: &mut Run) -> Result<()> {
    let mut mem = LineSearchMemory::new(run.cfg.ls, run.current.f)?;
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    loop {
        let p = prev.as_ref().map(|(x, g)| (x.as_slice(), g.as_slice()));
        let Some((next, kind, bound)) = first_order(run, IstaMode::Full, p, &mut mem)? else {
            run.exhausted();
            return Ok(());
        };
        prev = Some((run.current.x.clone(), run.current.g.clone()));
        if run.record(next, kind, bound) {
            return Ok(());
        }
    }
}
