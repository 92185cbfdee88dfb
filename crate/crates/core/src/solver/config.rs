use crate::error::{Error, Result};
use crate::steps::LineSearchParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Iicg1,
    Iicg2,
    Fista,
    IstaBb,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Iicg1, Algorithm::Iicg2, Algorithm::Fista, Algorithm::IstaBb];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Iicg1 => "iicg1",
            Algorithm::Iicg2 => "iicg2",
            Algorithm::Fista => "fista",
            Algorithm::IstaBb => "istabb",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "iicg1" => Some(Algorithm::Iicg1),
            "iicg2" => Some(Algorithm::Iicg2),
            "fista" => Some(Algorithm::Fista),
            "istabb" | "istabbls" => Some(Algorithm::IstaBb),
            _ => None,
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// How first-order steps choose their steplength.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaPolicy {
    /// `α = 1/L` every step.
    ConstantInvL,
    /// Barzilai-Borwein steplength with the nonmonotone line search.
    BbLineSearch,
}

/// Steplength used inside `ψ` for the gradient balance test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaBalance {
    /// `1 / (factor·L)`
    InvL { factor: f64 },
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    /// Stop once `(F − F*)/max(|F*|, 1e-12) ≤ tol`.
    ReferenceObjective(f64),
    /// Stop once `‖v(x)‖∞ ≤ tol·max(1, ‖v(x⁰)‖∞)`.
    SubgradientNorm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    /// Sufficient-decrease constant for CG steps that leave the orthant.
    pub c: f64,
    pub alpha_policy: AlphaPolicy,
    pub alpha_bal: AlphaBalance,
    pub tol: f64,
    pub termination: Termination,
    pub mv_budget: u64,
    pub ls: LineSearchParams,
    /// Capture every iterate and check the gradient recurrence against
    /// uncharged explicit products.
    pub theory_checks: bool,
    /// Known largest eigenvalue of `A`; skips the power iteration.
    pub lipschitz: Option<f64>,
    /// Seed of the power iteration start vector.
    pub seed: u64,
    /// Starting point; zero when absent.
    pub x0: Option<Vec<f64>>,
    /// CG cycles stop once `‖ρ‖` drops to this; default `1e-14·(1 + ‖b‖)`.
    pub cg_rho_tol: Option<f64>,
}

impl SolverConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        let alpha_policy = match algorithm {
            Algorithm::Fista => AlphaPolicy::ConstantInvL,
            _ => AlphaPolicy::BbLineSearch,
        };
        Self {
            algorithm,
            c: 1e-4,
            alpha_policy,
            alpha_bal: AlphaBalance::InvL { factor: 1.0 },
            tol: 1e-6,
            termination: Termination::SubgradientNorm,
            mv_budget: 50_000,
            ls: LineSearchParams::default(),
            theory_checks: false,
            lipschitz: None,
            seed: 0,
            x0: None,
            cg_rho_tol: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.mv_budget < 1 {
            return Err(Error::argument("mv_budget must be at least 1"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::argument(format!("tol must be positive, got {}", self.tol)));
        }
        if !(self.c >= 0.0) {
            return Err(Error::argument("c must be nonnegative"));
        }
        if let Some(l) = self.lipschitz {
            if !(l > 0.0) || !l.is_finite() {
                return Err(Error::argument("lipschitz must be positive and finite"));
            }
        }
        match self.alpha_bal {
            AlphaBalance::InvL { factor } if !(factor > 0.0) => {
                return Err(Error::argument("alpha_bal factor must be positive"))
            }
            AlphaBalance::Fixed(a) if !(a > 0.0) => {
                return Err(Error::argument("alpha_bal must be positive"))
            }
            _ => {}
        }
        if self.algorithm == Algorithm::Fista && self.alpha_policy != AlphaPolicy::ConstantInvL {
            return Err(Error::argument("FISTA only supports the constant 1/L steplength"));
        }
        if self.ls.memory == 0 || self.ls.max_halvings == 0 {
            return Err(Error::argument("line search memory and max_halvings must be positive"));
        }
        Ok(())
    }
}
