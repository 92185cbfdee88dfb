use super::{Iterate, Run, StepKind};
use crate::error::Result;
use crate::steps::ista_step;

/// Accelerated proximal gradient with `α = 1/L`. One product per iteration:
/// `Ay` is extrapolated from the two most recent explicit `Ax`.
pub(super) fn run(run: &mut Run) -> Result<()> {
    let tau = run.tau();
    let alpha = run.step_alpha();
    let b = run.problem.b.clone();
    let mut x_prev = run.current.x.clone();
    let mut ax_prev: Vec<f64> = run.current.g.iter().zip(&b).map(|(g, b)| g + b).collect();
    let mut y = x_prev.clone();
    let mut ay = ax_prev.clone();
    let mut t = 1.0f64;
    loop {
        if run.remaining() == 0 {
            run.exhausted();
            return Ok(());
        }
        let gy: Vec<f64> = ay.iter().zip(&b).map(|(a, b)| a - b).collect();
        let x = ista_step(&y, &gy, tau, alpha)?;
        let ax = run.problem.op.apply(&x)?;
        let f = run.problem.objective_with_ax(&x, &ax)?;
        let g = run.problem.gradient_with_ax(&ax);

        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let beta = (t - 1.0) / t_next;
        y = x.iter().zip(&x_prev).map(|(a, p)| a + beta * (a - p)).collect();
        ay = ax.iter().zip(&ax_prev).map(|(a, p)| a + beta * (a - p)).collect();
        x_prev = x.clone();
        ax_prev = ax;
        t = t_next;

        if run.record(Iterate { x, g, f }, StepKind::Ista, None) {
            return Ok(());
        }
    }
}
