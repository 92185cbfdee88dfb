//! Projected conjugate gradient on the orthant model
//!
//! ```text
//! q(x; x_cg) = ½xᵀAx + (−b + τ·sgn(x_cg))ᵀx,   x_i = 0 wherever x_cg_i = 0
//! ```
//!
//! `q` equals `F` on the orthant of the anchor `x_cg`. Iterates may leave that
//! orthant; the driver decides (sufficient decrease or [`cutback`]) whether
//! such a step is kept.

use crate::error::{check_len, Error, Result};
use crate::linalg::{axpy, dot, norm_sq, same_signs, sgn};
use crate::problem::CountingOperator;

#[derive(Debug, Clone, PartialEq)]
pub struct CgState {
    pub x: Vec<f64>,
    /// `Ax − b + τ·sgn(x_cg)`
    pub r: Vec<f64>,
    /// `r` projected onto the anchor's support.
    pub rho: Vec<f64>,
    pub d: Vec<f64>,
    pub x_cg: Vec<f64>,
    /// `rᵀρ`
    pub rho_dot: f64,
}

impl CgState {
    /// Smooth gradient `Ax − b` recovered from the residual, no product needed.
    pub fn gradient(&self, tau: f64) -> Vec<f64> {
        self.r
            .iter()
            .zip(&self.x_cg)
            .map(|(ri, ai)| ri - tau * sgn(*ai))
            .collect()
    }
}

fn project(v: &[f64], x_cg: &[f64]) -> Vec<f64> {
    v.iter()
        .zip(x_cg)
        .map(|(vi, ai)| if *ai == 0.0 { 0.0 } else { *vi })
        .collect()
}

/// Starts a cycle anchored at `x`; `g` must be `Ax − b`.
pub fn init_cg_cycle(x: &[f64], g: &[f64], tau: f64) -> Result<CgState> {
    check_len("cg gradient", x.len(), g.len())?;
    let r: Vec<f64> = x.iter().zip(g).map(|(xi, gi)| gi + tau * sgn(*xi)).collect();
    let rho = project(&r, x);
    let d = rho.iter().map(|v| -v).collect();
    let rho_dot = dot(&r, &rho);
    Ok(CgState {
        x: x.to_vec(),
        r,
        rho,
        d,
        x_cg: x.to_vec(),
        rho_dot,
    })
}

/// A CG step that has been computed but not yet committed.
#[derive(Debug, Clone)]
pub struct CgTrial {
    pub state: CgState,
    /// The new point left the anchor orthant (exact zeros count as leaving).
    pub crossed: bool,
    /// `Ad` for the direction just used.
    pub ad: Vec<f64>,
    pub alpha: f64,
}

#[derive(Debug, Clone)]
pub enum CgOutcome {
    Step(CgTrial),
    /// `dᵀAd ≤ ε_curv·‖d‖²`; the cycle has to end.
    CurvatureBreak { curvature: f64 },
}

/// One projected CG iteration; costs one matrix-vector product.
///
/// `curvature_eps` is the threshold relative to `‖d‖²` below which the
/// direction is treated as singular.
pub fn cg_step(s: &CgState, op: &CountingOperator, curvature_eps: f64) -> Result<CgOutcome> {
    let dd = norm_sq(&s.d);
    if dd == 0.0 {
        return Err(Error::argument("cg_step called with a zero direction"));
    }
    let ad = op.apply(&s.d)?;
    let curvature = dot(&s.d, &ad);
    if !(curvature > curvature_eps * dd) {
        return Ok(CgOutcome::CurvatureBreak { curvature });
    }
    let alpha = s.rho_dot / curvature;

    let mut x = s.x.clone();
    axpy(alpha, &s.d, &mut x);
    let mut r = s.r.clone();
    axpy(alpha, &ad, &mut r);
    let rho = project(&r, &s.x_cg);
    let rho_dot = dot(&r, &rho);
    let beta = if s.rho_dot > 0.0 { rho_dot / s.rho_dot } else { 0.0 };
    let d = rho
        .iter()
        .zip(&s.d)
        .map(|(p, di)| -p + beta * di)
        .collect();
    let crossed = !same_signs(&x, &s.x_cg);
    Ok(CgOutcome::Step(CgTrial {
        state: CgState {
            x,
            r,
            rho,
            d,
            x_cg: s.x_cg.clone(),
            rho_dot,
        },
        crossed,
        ad,
        alpha,
    }))
}

/// Truncates a CG step to the boundary of the anchor orthant.
///
/// Returns the new point and the step taken along `d` (`None` when `x_k`
/// itself is already outside the anchor orthant and is returned unchanged).
pub fn cutback_step(x_k: &[f64], x_cg: &[f64], d: &[f64]) -> (Vec<f64>, Option<f64>) {
    if !same_signs(x_k, x_cg) {
        return (x_k.to_vec(), None);
    }
    let mut step = f64::INFINITY;
    for ((&xi, &ai), &di) in x_k.iter().zip(x_cg).zip(d) {
        if ai != 0.0 && sgn(di) == -sgn(ai) && xi * di < 0.0 {
            step = step.min(-xi / di);
        }
    }
    if !step.is_finite() {
        // Nothing blocks the direction: take the full step.
        let x = x_k.iter().zip(d).map(|(xi, di)| xi + di).collect();
        return (x, Some(1.0));
    }
    let x = x_k
        .iter()
        .zip(x_cg)
        .zip(d)
        .map(|((&xi, &ai), &di)| {
            let blocking = ai != 0.0 && sgn(di) == -sgn(ai) && xi * di < 0.0 && -xi / di <= step;
            if blocking {
                0.0
            } else {
                let v = xi + step * di;
                // roundoff may push a non-blocking coordinate a hair past zero
                if sgn(v) != sgn(ai) { 0.0 } else { v }
            }
        })
        .collect();
    (x, Some(step))
}

pub fn cutback(x_k: &[f64], x_cg: &[f64], d: &[f64]) -> Vec<f64> {
    cutback_step(x_k, x_cg, d).0
}

/// `½xᵀ(Ax) + (−b + τ·sgn(x_cg))ᵀx` from a supplied `Ax`.
pub fn orthant_model_value(x: &[f64], x_cg: &[f64], ax: &[f64], b: &[f64], tau: f64) -> f64 {
    x.iter()
        .zip(x_cg)
        .zip(ax.iter().zip(b))
        .map(|((&xi, &ai), (&axi, &bi))| 0.5 * xi * axi + (-bi + tau * sgn(ai)) * xi)
        .sum()
}

/// `F_next ≤ F_curr − c·‖v_curr‖²`
pub fn sufficient_decrease(f_next: f64, f_curr: f64, v_norm_sq: f64, c: f64) -> bool {
    f_next <= f_curr - c * v_norm_sq
}
