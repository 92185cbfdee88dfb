use super::istabb::first_order;
use super::{Iterate, Run, StepKind};
use crate::cg::{cg_step, cutback_step, init_cg_cycle, sufficient_decrease, CgOutcome};
use crate::error::Result;
use crate::linalg::{norm2, norm_sq};
use crate::steps::{IstaMode, LineSearchMemory};
use crate::subgrad::{is_balanced, v_norm_sq};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(super) enum Variant {
    /// Full ISTA between CG cycles.
    One,
    /// Subspace ISTA when the gradient is balanced, full ISTA otherwise.
    Two,
}

pub(super) fn run(run: &mut Run, variant: Variant) -> Result<()> {
    let tau = run.tau();
    let c = run.cfg.c;
    let curvature_eps = 1e-14 * run.lipschitz;
    let rho_tol = run
        .cfg
        .cg_rho_tol
        .unwrap_or_else(|| 1e-14 * (1.0 + norm2(&run.problem.b)));
    let mut mem = LineSearchMemory::new(run.cfg.ls, run.current.f)?;
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;

    loop {
        let alpha_bal = run.alpha_bal();
        let mode = match variant {
            Variant::One => IstaMode::Full,
            Variant::Two if is_balanced(&run.current.x, &run.current.g, tau, alpha_bal) => IstaMode::Subspace,
            Variant::Two => IstaMode::Full,
        };
        let p = prev.as_ref().map(|(x, g)| (x.as_slice(), g.as_slice()));
        let Some((next, kind, bound)) = first_order(run, mode, p, &mut mem)? else {
            run.exhausted();
            return Ok(());
        };
        if commit(run, &mut prev, next, kind, bound) {
            return Ok(());
        }

        let mut state = init_cg_cycle(&run.current.x, &run.current.g, tau)?;
        loop {
            if !is_balanced(&run.current.x, &run.current.g, tau, alpha_bal) {
                break;
            }
            if norm_sq(&state.rho).sqrt() <= rho_tol {
                break;
            }
            if run.remaining() == 0 {
                run.exhausted();
                return Ok(());
            }
            let trial = match cg_step(&state, &run.problem.op, curvature_eps)? {
                CgOutcome::Step(t) => t,
                CgOutcome::CurvatureBreak { curvature } => {
                    run.diagnostic(format!("curvature {curvature:.3e} ended a cg cycle"));
                    break;
                }
            };
            let g_new = trial.state.gradient(tau);
            let f_new = run.problem.objective_with_gradient(&trial.state.x, &g_new);
            let cur = &run.current;
            if trial.crossed && !sufficient_decrease(f_new, cur.f, v_norm_sq(&cur.x, &cur.g, tau), c) {
                let (x, step) = cutback_step(&cur.x, &state.x_cg, &state.d);
                let g: Vec<f64> = match step {
                    Some(a) => cur.g.iter().zip(&trial.ad).map(|(g, ad)| g + a * ad).collect(),
                    None => cur.g.clone(),
                };
                let f = run.problem.objective_with_gradient(&x, &g);
                if commit(run, &mut prev, Iterate { x, g, f }, StepKind::Cutback, None) {
                    return Ok(());
                }
                break;
            }

            let mut it = Iterate {
                x: trial.state.x.clone(),
                g: g_new,
                f: f_new,
            };
            let refreshed = run.confirm_gradient(&mut it)?;
            prev = Some((run.current.x.clone(), run.current.g.clone()));
            if run.record(it, StepKind::Cg, None) {
                return Ok(());
            }
            if refreshed {
                break;
            }
            state = trial.state;
        }
    }
}

/// Records `next`, keeping the previous point for the BB pair when it moved.
fn commit(
    run: &mut Run,
    prev: &mut Option<(Vec<f64>, Vec<f64>)>,
    next: Iterate,
    kind: StepKind,
    bound: Option<f64>,
) -> bool {
    if next.x != run.current.x {
        *prev = Some((run.current.x.clone(), run.current.g.clone()));
    }
    run.record(next, kind, bound)
}
