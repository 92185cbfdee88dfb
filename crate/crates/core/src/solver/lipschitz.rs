use crate::error::Result;
use crate::linalg::{dot, norm2};
use crate::probgen::Rng;
use crate::problem::CountingOperator;

const MAX_ITERS: usize = 200;
const RTOL: f64 = 1e-4;
const SAFETY: f64 = 1.01;

/// Power-iteration estimate of the largest eigenvalue of `A`, inflated by 1%.
///
/// Every product is charged to `op`. Returns 1 for the zero operator.
pub fn estimate_lipschitz(op: &CountingOperator, seed: u64) -> Result<f64> {
    let n = op.dim();
    let mut rng = Rng::new(seed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
    let nv = norm2(&v);
    if n == 0 || nv == 0.0 {
        return Ok(1.0);
    }
    v.iter_mut().for_each(|x| *x /= nv);
    let mut prev: Option<f64> = None;
    let mut rq = 0.0;
    for _ in 0..MAX_ITERS {
        let w = op.apply(&v)?;
        rq = dot(&v, &w);
        let nw = norm2(&w);
        if nw == 0.0 {
            return Ok(1.0);
        }
        if let Some(p) = prev {
            if (rq - p).abs() <= RTOL * rq.abs() {
                break;
            }
        }
        prev = Some(rq);
        v = w.into_iter().map(|x| x / nw).collect();
    }
    if !(rq > 0.0) {
        return Ok(1.0);
    }
    Ok(SAFETY * rq)
}
