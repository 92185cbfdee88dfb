//! Test-side oracles built on nalgebra, sharing no numerics with the library.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use ql1::{Operator, QuadraticProblem};

pub struct Dense {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub tau: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
}

impl Dense {
    pub fn from_problem(p: &QuadraticProblem) -> Self {
        let a = match p.op.operator() {
            Operator::Dense { n, a } => DMatrix::from_row_slice(*n, *n, a),
            Operator::Factored { m, n, b, gamma } => {
                let bm = DMatrix::from_row_slice(*m, *n, b);
                bm.transpose() * &bm + DMatrix::identity(*n, *n) * (2.0 * gamma)
            }
        };
        let eig = SymmetricEigen::new(a.clone()).eigenvalues;
        Self {
            lambda_min: eig.min(),
            lambda_max: eig.max(),
            b: DVector::from_column_slice(&p.b),
            tau: p.tau,
            a,
        }
    }

    pub fn n(&self) -> usize {
        self.b.len()
    }

    pub fn grad(&self, x: &[f64]) -> DVector<f64> {
        &self.a * DVector::from_column_slice(x) - &self.b
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        let xv = DVector::from_column_slice(x);
        0.5 * xv.dot(&(&self.a * &xv)) - self.b.dot(&xv) + self.tau * xv.lp_norm(1)
    }

    /// Minimum-norm subgradient, straight from its three-case definition.
    pub fn v(&self, x: &[f64]) -> Vec<f64> {
        let g = self.grad(x);
        (0..self.n())
            .map(|i| {
                if x[i] != 0.0 {
                    g[i] + self.tau * x[i].signum()
                } else if g[i].abs() <= self.tau {
                    0.0
                } else {
                    g[i] - self.tau * g[i].signum()
                }
            })
            .collect()
    }

    pub fn omega(&self, x: &[f64]) -> Vec<f64> {
        let v = self.v(x);
        (0..self.n()).map(|i| if x[i] == 0.0 { v[i] } else { 0.0 }).collect()
    }

    pub fn phi(&self, x: &[f64]) -> Vec<f64> {
        let v = self.v(x);
        (0..self.n()).map(|i| if x[i] != 0.0 { v[i] } else { 0.0 }).collect()
    }

    /// `ψ_i = (x_i − y_i)/α` where `y_i` minimizes the scalar model
    /// `g_i(y − x_i) + (y − x_i)²/(2α) + τ|y|`, found by comparing the three
    /// candidate stationary points.
    pub fn psi(&self, x: &[f64], alpha: f64) -> Vec<f64> {
        let g = self.grad(x);
        (0..self.n())
            .map(|i| {
                if x[i] == 0.0 {
                    return 0.0;
                }
                let model = |y: f64| g[i] * (y - x[i]) + (y - x[i]).powi(2) / (2.0 * alpha) + self.tau * y.abs();
                let pos = x[i] - alpha * (g[i] + self.tau);
                let neg = x[i] - alpha * (g[i] - self.tau);
                let mut y = 0.0;
                for cand in [(pos > 0.0).then_some(pos), (neg < 0.0).then_some(neg)].into_iter().flatten() {
                    if model(cand) < model(y) {
                        y = cand;
                    }
                }
                (x[i] - y) / alpha
            })
            .collect()
    }

    /// Cyclic coordinate descent to a tight fixed point; returns `(x*, F*)`.
    pub fn coordinate_descent(&self) -> (Vec<f64>, f64) {
        let n = self.n();
        let mut x = vec![0.0; n];
        let mut ax = DVector::<f64>::zeros(n);
        for _ in 0..200_000 {
            let mut change = 0.0f64;
            for i in 0..n {
                let aii = self.a[(i, i)];
                let gi = ax[i] - self.b[i];
                let z = x[i] - gi / aii;
                let t = self.tau / aii;
                let new = z.signum() * (z.abs() - t).max(0.0);
                let delta = new - x[i];
                if delta != 0.0 {
                    ax.axpy(delta, &self.a.column(i), 1.0);
                    x[i] = new;
                    change = change.max(delta.abs());
                }
            }
            if change <= 1e-15 * (1.0 + x.iter().fold(0.0f64, |m, v| m.max(v.abs()))) {
                break;
            }
        }
        let f = self.objective(&x);
        (x, f)
    }
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| f64::max(m, x.abs()))
}

pub fn signs(x: &[f64]) -> Vec<i8> {
    x.iter()
        .map(|v| if *v > 0.0 { 1 } else if *v < 0.0 { -1 } else { 0 })
        .collect()
}
