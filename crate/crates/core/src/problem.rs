//! Problem instances and the work-counting operator.
//!
//! A [`QuadraticProblem`] holds `A` (through a [`CountingOperator`]), `b` and
//! `τ`. The operator data sits behind an `Arc` and is immutable; each
//! operator handle carries its own counter, so concurrent solves on the same
//! data use [`QuadraticProblem::fork`] to get a private count.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::error::{check_len, Error, Result};
use crate::linalg::{dot, norm1, norm2};
use crate::probgen::Rng;

/// Matrix data behind a counting operator.
#[derive(Debug, Clone, PartialEq)]
pub enum Operator {
    /// Full symmetric `n × n` matrix, row-major.
    Dense { n: usize, a: Vec<f64> },
    /// `A = BᵀB + 2γI` with `B` an `m × n` row-major matrix.
    Factored {
        m: usize,
        n: usize,
        b: Vec<f64>,
        gamma: f64,
    },
}

impl Operator {
    pub fn dim(&self) -> usize {
        match self {
            Operator::Dense { n, .. } | Operator::Factored { n, .. } => *n,
        }
    }

    /// `out = A v`. Lengths are the caller's responsibility.
    fn multiply(&self, v: &[f64], out: &mut [f64]) {
        match self {
            Operator::Dense { n, a } => {
                for (i, o) in out.iter_mut().enumerate() {
                    *o = dot(&a[i * n..(i + 1) * n], v);
                }
            }
            Operator::Factored { m, n, b, gamma } => {
                out.iter_mut().zip(v).for_each(|(o, vi)| *o = 2.0 * gamma * vi);
                for r in 0..*m {
                    let row = &b[r * n..(r + 1) * n];
                    let bv = dot(row, v);
                    for (o, bij) in out.iter_mut().zip(row) {
                        *o += bij * bv;
                    }
                }
            }
        }
    }

    /// Row-major dense expansion of `A`.
    pub fn to_dense(&self) -> Vec<f64> {
        match self {
            Operator::Dense { a, .. } => a.clone(),
            Operator::Factored { m, n, b, gamma } => {
                let (m, n) = (*m, *n);
                let mut a = vec![0.0; n * n];
                for i in 0..n {
                    for j in i..n {
                        let s: f64 = (0..m).map(|r| b[r * n + i] * b[r * n + j]).sum();
                        a[i * n + j] = s;
                        a[j * n + i] = s;
                    }
                    a[i * n + i] += 2.0 * gamma;
                }
                a
            }
        }
    }

    /// Cheap upper bound on ‖A‖₂ (Frobenius-based).
    pub fn norm_bound(&self) -> f64 {
        match self {
            Operator::Dense { a, .. } => norm2(a),
            Operator::Factored { b, gamma, .. } => {
                let fro = norm2(b);
                fro * fro + 2.0 * gamma
            }
        }
    }
}

/// Matrix-free application of `A` with a matrix-vector product counter.
///
/// Every call to [`apply`](Self::apply) counts as one unit of work, including
/// the two rectangular products of the factored form.
#[derive(Debug)]
pub struct CountingOperator {
    data: Arc<Operator>,
    count: AtomicU64,
}

impl Clone for CountingOperator {
    /// The clone shares the matrix data and starts from the current count,
    /// but counts independently afterwards.
    fn clone(&self) -> Self {
        Self {
            data: Arc::clone(&self.data),
            count: AtomicU64::new(self.mv_count()),
        }
    }
}

impl CountingOperator {
    pub fn dense(n: usize, a: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::argument("dimension must be positive"));
        }
        let len = n
            .checked_mul(n)
            .ok_or_else(|| Error::argument("dimension overflows"))?;
        check_len("dense matrix", len, a.len())?;
        Ok(Self::from_operator(Operator::Dense { n, a }))
    }

    pub fn factored(m: usize, n: usize, b: Vec<f64>, gamma: f64) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::argument("dimensions must be positive"));
        }
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(Error::argument(format!("gamma must be finite and >= 0, got {gamma}")));
        }
        let len = m
            .checked_mul(n)
            .ok_or_else(|| Error::argument("dimension overflows"))?;
        check_len("factor matrix", len, b.len())?;
        Ok(Self::from_operator(Operator::Factored { m, n, b, gamma }))
    }

    pub fn from_operator(op: Operator) -> Self {
        Self {
            data: Arc::new(op),
            count: AtomicU64::new(0),
        }
    }

    pub fn dim(&self) -> usize {
        self.data.dim()
    }

    pub fn operator(&self) -> &Operator {
        &self.data
    }

    pub fn mv_count(&self) -> u64 {
        self.count.load(Ordering::Relaxed)
    }

    /// A handle on the same data with its counter at zero.
    pub fn fork(&self) -> Self {
        Self {
            data: Arc::clone(&self.data),
            count: AtomicU64::new(0),
        }
    }

    /// Returns `Av` and charges one matrix-vector product.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim()];
        self.apply_into(v, &mut out)?;
        Ok(out)
    }

    pub fn apply_into(&self, v: &[f64], out: &mut [f64]) -> Result<()> {
        check_len("operator input", self.dim(), v.len())?;
        check_len("operator output", self.dim(), out.len())?;
        self.count.fetch_add(1, Ordering::Relaxed);
        self.data.multiply(v, out);
        Ok(())
    }

    /// `Av` without touching the counter. Reserved for diagnostics that must
    /// not be billed to a solve.
    pub fn apply_uncounted(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_len("operator input", self.dim(), v.len())?;
        let mut out = vec![0.0; self.dim()];
        self.data.multiply(v, &mut out);
        Ok(out)
    }
}

/// `minimize ½xᵀAx − bᵀx + τ‖x‖₁`
#[derive(Debug, Clone)]
pub struct QuadraticProblem {
    pub op: CountingOperator,
    pub b: Vec<f64>,
    pub tau: f64,
}

const PROBE_COUNT: usize = 3;
const PROBE_SEED: u64 = 0x0005_EED0_FA11;
const PROBE_TOL: f64 = 1e-10;

impl QuadraticProblem {
    /// Validates `τ ≥ 0`, the length of `b`, and probes `A` for symmetry and
    /// positive semi-definiteness with a few random vectors (uncharged).
    pub fn new(op: CountingOperator, b: Vec<f64>, tau: f64) -> Result<Self> {
        check_len("linear term b", op.dim(), b.len())?;
        if !(tau >= 0.0) || !tau.is_finite() {
            return Err(Error::argument(format!("tau must be finite and >= 0, got {tau}")));
        }
        let problem = Self { op, b, tau };
        problem.probe_operator()?;
        Ok(problem)
    }

    fn probe_operator(&self) -> Result<()> {
        // The factored form is symmetric PSD by construction.
        if matches!(self.op.operator(), Operator::Factored { .. }) {
            return Ok(());
        }
        let n = self.n();
        let scale = self.op.operator().norm_bound();
        let mut rng = Rng::new(PROBE_SEED);
        for _ in 0..PROBE_COUNT {
            let u: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
            let v: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
            let au = self.op.apply_uncounted(&u)?;
            let av = self.op.apply_uncounted(&v)?;
            let (nu, nv) = (norm2(&u), norm2(&v));
            if (dot(&u, &av) - dot(&v, &au)).abs() > PROBE_TOL * nu * nv * scale {
                return Err(Error::argument("operator is not symmetric"));
            }
            if dot(&v, &av) < -PROBE_TOL * scale * nv * nv {
                return Err(Error::argument("operator is not positive semi-definite"));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.op.dim()
    }

    /// Same data, fresh matrix-vector counter.
    pub fn fork(&self) -> Self {
        Self {
            op: self.op.fork(),
            b: self.b.clone(),
            tau: self.tau,
        }
    }

    /// `F(x)`, one matrix-vector product.
    pub fn eval_objective(&self, x: &[f64]) -> Result<f64> {
        let ax = self.op.apply(x)?;
        self.objective_with_ax(x, &ax)
    }

    /// `F(x)` from a precomputed `Ax`; no matrix-vector product.
    pub fn objective_with_ax(&self, x: &[f64], ax: &[f64]) -> Result<f64> {
        check_len("objective point", self.n(), x.len())?;
        check_len("cached Ax", self.n(), ax.len())?;
        Ok(0.5 * dot(x, ax) - dot(&self.b, x) + self.tau * norm1(x))
    }

    /// `F(x)` from the smooth gradient `g = Ax − b`; no matrix-vector product.
    pub fn objective_with_gradient(&self, x: &[f64], g: &[f64]) -> f64 {
        // ½xᵀAx − bᵀx = ½xᵀ(g + b) − bᵀx = ½xᵀ(g − b)
        let smooth: f64 = x
            .iter()
            .zip(g.iter().zip(&self.b))
            .map(|(xi, (gi, bi))| xi * (gi - bi))
            .sum();
        0.5 * smooth + self.tau * norm1(x)
    }

    /// `g(x) = Ax − b`, one matrix-vector product.
    pub fn eval_gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        let ax = self.op.apply(x)?;
        Ok(self.gradient_with_ax(&ax))
    }

    pub fn gradient_with_ax(&self, ax: &[f64]) -> Vec<f64> {
        ax.iter().zip(&self.b).map(|(a, b)| a - b).collect()
    }
}
