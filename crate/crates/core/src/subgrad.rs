//! Pieces of the minimum-norm subgradient of `F`.
//!
//! For a point `x` with smooth gradient `g = Ax − b`:
//!
//! - `ω` lives on the zero coordinates: `g_i − τ·sgn(g_i)` where `|g_i| > τ`,
//!   zero otherwise. It measures what releasing zero variables would gain.
//! - `ψ(α)` lives on the nonzero coordinates: the prox displacement of one
//!   ISTA step with steplength `α`, divided by `α`.
//! - `φ` lives on the nonzero coordinates: `g_i + τ·sgn(x_i)`.
//! - `v = ω + φ` is the minimum-norm subgradient; `v = 0` iff `x` is optimal.
//!
//! A coordinate counts as zero when it compares equal to `0.0`, so `-0.0` is
//! zero as well.

use crate::error::{check_len, Result};
use crate::linalg::{norm_sq, sgn, soft_threshold};

#[derive(Debug, Clone, PartialEq)]
pub struct SubgradientParts {
    pub omega: Vec<f64>,
    pub psi: Vec<f64>,
    pub phi: Vec<f64>,
    pub v: Vec<f64>,
    pub alpha_used: f64,
}

impl SubgradientParts {
    pub fn compute(x: &[f64], g: &[f64], tau: f64, alpha: f64) -> Result<Self> {
        let omega = compute_omega(x, g, tau)?;
        let psi = compute_psi(x, g, tau, alpha)?;
        let phi = compute_phi(x, g, tau)?;
        let v = omega.iter().zip(&phi).map(|(o, p)| o + p).collect();
        Ok(Self {
            omega,
            psi,
            phi,
            v,
            alpha_used: alpha,
        })
    }

    pub fn balanced(&self) -> bool {
        gradient_balance(&self.omega, &self.psi)
    }
}

#[inline]
pub(crate) fn omega_i(x: f64, g: f64, tau: f64) -> f64 {
    if x != 0.0 || g.abs() <= tau {
        0.0
    } else {
        g - tau * sgn(g)
    }
}

#[inline]
pub(crate) fn psi_i(x: f64, g: f64, tau: f64, alpha: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        (x - soft_threshold(x - alpha * g, alpha * tau)) / alpha
    }
}

#[inline]
pub(crate) fn phi_i(x: f64, g: f64, tau: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        g + tau * sgn(x)
    }
}

#[inline]
pub(crate) fn v_i(x: f64, g: f64, tau: f64) -> f64 {
    omega_i(x, g, tau) + phi_i(x, g, tau)
}

pub fn compute_omega(x: &[f64], g: &[f64], tau: f64) -> Result<Vec<f64>> {
    check_len("omega gradient", x.len(), g.len())?;
    Ok(x.iter().zip(g).map(|(&xi, &gi)| omega_i(xi, gi, tau)).collect())
}

pub fn compute_psi(x: &[f64], g: &[f64], tau: f64, alpha: f64) -> Result<Vec<f64>> {
    check_len("psi gradient", x.len(), g.len())?;
    Ok(x.iter()
        .zip(g)
        .map(|(&xi, &gi)| psi_i(xi, gi, tau, alpha))
        .collect())
}

pub fn compute_phi(x: &[f64], g: &[f64], tau: f64) -> Result<Vec<f64>> {
    check_len("phi gradient", x.len(), g.len())?;
    Ok(x.iter().zip(g).map(|(&xi, &gi)| phi_i(xi, gi, tau)).collect())
}

pub fn compute_v(x: &[f64], g: &[f64], tau: f64) -> Result<Vec<f64>> {
    check_len("subgradient gradient", x.len(), g.len())?;
    Ok(x.iter().zip(g).map(|(&xi, &gi)| v_i(xi, gi, tau)).collect())
}

/// `‖v(x)‖∞` without allocating.
pub fn v_norm_inf(x: &[f64], g: &[f64], tau: f64) -> f64 {
    x.iter()
        .zip(g)
        .fold(0.0, |m, (&xi, &gi)| m.max(v_i(xi, gi, tau).abs()))
}

/// `‖v(x)‖₂²` without allocating.
pub fn v_norm_sq(x: &[f64], g: &[f64], tau: f64) -> f64 {
    x.iter()
        .zip(g)
        .map(|(&xi, &gi)| v_i(xi, gi, tau).powi(2))
        .sum()
}

/// `‖ω‖² ≤ ‖ψ‖²`. Ties count as balanced.
pub fn gradient_balance(omega: &[f64], psi: &[f64]) -> bool {
    norm_sq(omega) <= norm_sq(psi)
}

/// The balance test evaluated straight from `(x, g)`.
pub fn is_balanced(x: &[f64], g: &[f64], tau: f64, alpha: f64) -> bool {
    let (mut om, mut ps) = (0.0, 0.0);
    for (&xi, &gi) in x.iter().zip(g) {
        om += omega_i(xi, gi, tau).powi(2);
        ps += psi_i(xi, gi, tau, alpha).powi(2);
    }
    om <= ps
}
