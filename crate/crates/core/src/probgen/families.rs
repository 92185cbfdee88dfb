use super::Rng;
use crate::error::{Error, Result};
use crate::problem::{CountingOperator, QuadraticProblem};
#[cfg(test)]
use crate::problem::Operator;

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceMeta {
    pub family: &'static str,
    pub seed: u64,
    /// Parameter names and values in generator argument order.
    pub params: Vec<(&'static str, f64)>,
}

#[derive(Debug, Clone)]
pub struct GeneratedInstance {
    pub problem: QuadraticProblem,
    /// Known minimizer, for the strict-complementarity family.
    pub x_star: Option<Vec<f64>>,
    pub meta: InstanceMeta,
}

const MAX_ELEMENTS: usize = (isize::MAX as usize) / std::mem::size_of::<f64>();

fn checked_area(rows: usize, cols: usize) -> Result<usize> {
    rows.checked_mul(cols)
        .filter(|&len| len <= MAX_ELEMENTS)
        .ok_or_else(|| Error::argument(format!("{rows} x {cols} matrix does not fit in memory")))
}

fn nonneg(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::argument(format!("{name} must be finite and >= 0, got {v}")))
    }
}

fn normals(rng: &mut Rng, len: usize, scale: f64) -> Vec<f64> {
    (0..len).map(|_| scale * rng.normal()).collect()
}

/// `c = Bᵀy` for row-major `m × n` `B`.
fn transpose_mul(m: usize, n: usize, b: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for r in 0..m {
        let yr = y[r];
        for (o, bij) in out.iter_mut().zip(&b[r * n..(r + 1) * n]) {
            *o += bij * yr;
        }
    }
    out
}

fn factored_problem(m: usize, n: usize, b: Vec<f64>, y: &[f64], gamma: f64, tau: f64) -> Result<QuadraticProblem> {
    let rhs = transpose_mul(m, n, &b, y);
    QuadraticProblem::new(CountingOperator::factored(m, n, b, gamma)?, rhs, tau)
}

/// Elastic net `A = BᵀB + 2γI`, `b = Bᵀy`.
///
/// Draws: `B` (`m × n`, standard normal), then `y = scale·normal` (`m`).
pub fn gen_elastic_net(m: usize, n: usize, scale: f64, gamma: f64, tau: f64, seed: u64) -> Result<GeneratedInstance> {
    if m == 0 || n == 0 {
        return Err(Error::argument("m and n must be at least 1"));
    }
    let len = checked_area(m, n)?;
    nonneg("gamma", gamma)?;
    nonneg("tau", tau)?;
    if !scale.is_finite() {
        return Err(Error::argument("scale must be finite"));
    }
    let mut rng = Rng::new(seed);
    let b = normals(&mut rng, len, 1.0);
    let y = normals(&mut rng, m, scale);
    Ok(GeneratedInstance {
        problem: factored_problem(m, n, b, &y, gamma, tau)?,
        x_star: None,
        meta: InstanceMeta {
            family: "elastic_net",
            seed,
            params: vec![
                ("m", m as f64),
                ("n", n as f64),
                ("scale", scale),
                ("gamma", gamma),
                ("tau", tau),
            ],
        },
    })
}

/// Compressed sensing: `signal_nnz` spikes of ±1 encoded by `B/√m` plus noise.
///
/// Draws: spike positions (partial Fisher–Yates), spike signs (`u < ½` is
/// negative), `B` (`m × n`, normal, scaled by `1/√m`), noise
/// (`noise_sigma·normal`, `m`).
pub fn gen_sigrec(
    m: usize,
    n: usize,
    signal_nnz: usize,
    noise_sigma: f64,
    gamma: f64,
    tau: f64,
    seed: u64,
) -> Result<GeneratedInstance> {
    if m == 0 || n == 0 {
        return Err(Error::argument("m and n must be at least 1"));
    }
    if m > n {
        return Err(Error::argument(format!("m = {m} exceeds n = {n}")));
    }
    if signal_nnz > n {
        return Err(Error::argument(format!("signal_nnz = {signal_nnz} exceeds n = {n}")));
    }
    let len = checked_area(m, n)?;
    nonneg("noise_sigma", noise_sigma)?;
    nonneg("gamma", gamma)?;
    nonneg("tau", tau)?;

    let mut rng = Rng::new(seed);
    let support = rng.sample_indices(n, signal_nnz);
    let mut signal = vec![0.0; n];
    for &i in &support {
        signal[i] = if rng.uniform() < 0.5 { -1.0 } else { 1.0 };
    }
    let b = normals(&mut rng, len, 1.0 / (m as f64).sqrt());
    let mut y: Vec<f64> = (0..m)
        .map(|r| crate::linalg::dot(&b[r * n..(r + 1) * n], &signal))
        .collect();
    for yr in y.iter_mut() {
        *yr += noise_sigma * rng.normal();
    }
    Ok(GeneratedInstance {
        problem: factored_problem(m, n, b, &y, gamma, tau)?,
        x_star: None,
        meta: InstanceMeta {
            family: "sigrec",
            seed,
            params: vec![
                ("m", m as f64),
                ("n", n as f64),
                ("signal_nnz", signal_nnz as f64),
                ("noise_sigma", noise_sigma),
                ("gamma", gamma),
                ("tau", tau),
            ],
        },
    })
}

/// Orthonormal `Q` from modified Gram–Schmidt on the columns of a row-major
/// `n × n` matrix.
fn orthonormal_columns(n: usize, g: &[f64]) -> Vec<f64> {
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| (0..n).map(|i| g[i * n + j]).collect()).collect();
    for j in 0..n {
        for _ in 0..2 {
            for k in 0..j {
                let (done, rest) = cols.split_at_mut(j);
                let r = crate::linalg::dot(&done[k], &rest[0]);
                crate::linalg::axpy(-r, &done[k], &mut rest[0]);
            }
        }
        let nrm = crate::linalg::norm2(&cols[j]);
        cols[j].iter_mut().for_each(|v| *v /= nrm);
    }
    let mut q = vec![0.0; n * n];
    for (j, col) in cols.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            q[i * n + j] = *v;
        }
    }
    q
}

/// Dense SPD instance with a known minimizer satisfying strict
/// complementarity.
///
/// `A = QDQᵀ` with `λ_max = 1`, `λ_min = 1/cond_target` and the remaining
/// eigenvalues log-uniform in between. Draws: the `n × n` normal matrix for
/// `Q`, the `n − 2` interior eigenvalue exponents, the support of `x*`, then
/// per support entry a sign (`u < ½` negative) and a magnitude `0.5 + u`,
/// then `u_i` for each off-support coordinate in increasing index order.
/// `b = Ax* + τu` with `u = sgn(x*)` on the support.
///
/// `nnz = 0` is accepted and gives `x* = 0`.
pub fn gen_strict_comp(
    n: usize,
    nnz: usize,
    cond_target: f64,
    tau: f64,
    margin: f64,
    seed: u64,
) -> Result<GeneratedInstance> {
    if n == 0 {
        return Err(Error::argument("n must be at least 1"));
    }
    if nnz > n {
        return Err(Error::argument(format!("nnz = {nnz} exceeds n = {n}")));
    }
    if !(cond_target >= 1.0) || !cond_target.is_finite() {
        return Err(Error::argument(format!("cond_target must be finite and >= 1, got {cond_target}")));
    }
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::argument(format!("tau must be positive, got {tau}")));
    }
    if !(margin > 0.0 && margin < 1.0) {
        return Err(Error::argument(format!("margin must lie in (0, 1), got {margin}")));
    }
    let len = checked_area(n, n)?;

    let mut rng = Rng::new(seed);
    let g: Vec<f64> = (0..len).map(|_| rng.normal()).collect();
    let q = orthonormal_columns(n, &g);

    let log_min = -cond_target.ln();
    let mut spectrum = vec![1.0; n];
    if n > 1 {
        spectrum[n - 1] = 1.0 / cond_target;
        for lam in spectrum.iter_mut().take(n - 1).skip(1) {
            *lam = (log_min * rng.uniform()).exp();
        }
    }

    let mut a = vec![0.0; len];
    for i in 0..n {
        for j in i..n {
            let s: f64 = (0..n).map(|k| q[i * n + k] * spectrum[k] * q[j * n + k]).sum();
            a[i * n + j] = s;
            a[j * n + i] = s;
        }
    }

    let mut support = rng.sample_indices(n, nnz);
    support.sort_unstable();
    let mut x_star = vec![0.0; n];
    for &i in &support {
        let sign = if rng.uniform() < 0.5 { -1.0 } else { 1.0 };
        x_star[i] = sign * (0.5 + rng.uniform());
    }
    let mut u = vec![0.0; n];
    for i in 0..n {
        u[i] = if x_star[i] != 0.0 {
            x_star[i].signum()
        } else {
            (2.0 * rng.uniform() - 1.0) * (1.0 - margin)
        };
    }

    let op = CountingOperator::dense(n, a)?;
    let ax = op.apply_uncounted(&x_star)?;
    let b: Vec<f64> = ax.iter().zip(&u).map(|(a, u)| a + tau * u).collect();
    Ok(GeneratedInstance {
        problem: QuadraticProblem::new(op, b, tau)?,
        x_star: Some(x_star),
        meta: InstanceMeta {
            family: "strict_comp",
            seed,
            params: vec![
                ("n", n as f64),
                ("nnz", nnz as f64),
                ("cond", cond_target),
                ("tau", tau),
                ("margin", margin),
            ],
        },
    })
}

#[cfg(test)]
mod tests;
