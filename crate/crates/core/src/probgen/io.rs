//! QL1P binary problem files (little-endian):
//!
//! ```text
//! "QL1P"  u32 version=1  u8 kind  u64 n
//! kind 0: n·n f64 A (row-major)
//! kind 1: u64 m, m·n f64 B (row-major), f64 gamma
//! n f64 b, f64 tau
//! ```

use std::path::Path;

use crate::error::{Error, Result};
use crate::problem::{CountingOperator, Operator, QuadraticProblem};

const MAGIC: [u8; 4] = *b"QL1P";
const VERSION: u32 = 1;

pub fn write_problem_bytes(p: &QuadraticProblem) -> Vec<u8> {
    let op = p.op.operator();
    let n = op.dim();
    let mut out = Vec::with_capacity(32 + 8 * (n * n + n));
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    let push_all = |out: &mut Vec<u8>, v: &[f64]| v.iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes()));
    match op {
        Operator::Dense { n, a } => {
            out.push(0);
            out.extend_from_slice(&(*n as u64).to_le_bytes());
            push_all(&mut out, a);
        }
        Operator::Factored { m, n, b, gamma } => {
            out.push(1);
            out.extend_from_slice(&(*n as u64).to_le_bytes());
            out.extend_from_slice(&(*m as u64).to_le_bytes());
            push_all(&mut out, b);
            out.extend_from_slice(&gamma.to_le_bytes());
        }
    }
    push_all(&mut out, &p.b);
    out.extend_from_slice(&p.tau.to_le_bytes());
    out
}

pub fn write_problem(path: impl AsRef<Path>, p: &QuadraticProblem) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, write_problem_bytes(p)).map_err(|e| Error::io(path, e))
}

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn format(&self, message: impl Into<String>) -> Error {
        Error::Format {
            offset: self.pos as u64,
            message: message.into(),
        }
    }

    fn take(&mut self, len: usize, what: &str) -> Result<&[u8]> {
        let end = self.pos.checked_add(len).filter(|&e| e <= self.data.len());
        let Some(end) = end else {
            let expected = self.pos as u128 + len as u128;
            return Err(self.format(format!(
                "truncated while reading {what}: expected at least {expected} bytes, file has {}",
                self.data.len()
            )));
        };
        let s = &self.data[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn f64s(&mut self, count: u64, what: &str) -> Result<Vec<f64>> {
        let bytes = count
            .checked_mul(8)
            .and_then(|b| usize::try_from(b).ok())
            .ok_or_else(|| self.format(format!("{what} length {count} overflows")))?;
        let raw = self.take(bytes, what)?;
        Ok(raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }
}

pub fn read_problem_bytes(data: &[u8]) -> Result<QuadraticProblem> {
    let mut r = Reader { data, pos: 0 };
    if r.take(4, "magic")? != MAGIC {
        r.pos = 0;
        return Err(r.format("bad magic, expected \"QL1P\""));
    }
    let version = u32::from_le_bytes(r.take(4, "version")?.try_into().unwrap());
    if version != VERSION {
        r.pos -= 4;
        return Err(r.format(format!("unsupported version {version}")));
    }
    let kind = r.take(1, "kind")?[0];
    let n = r.u64("n")?;
    let as_usize = |v: u64, r: &Reader| usize::try_from(v).map_err(|_| r.format(format!("dimension {v} too large")));
    let op = match kind {
        0 => {
            let a = r.f64s(n.checked_mul(n).ok_or_else(|| r.format("n·n overflows"))?, "matrix A")?;
            CountingOperator::dense(as_usize(n, &r)?, a)?
        }
        1 => {
            let m = r.u64("m")?;
            let b = r.f64s(m.checked_mul(n).ok_or_else(|| r.format("m·n overflows"))?, "matrix B")?;
            let gamma = r.f64("gamma")?;
            CountingOperator::factored(as_usize(m, &r)?, as_usize(n, &r)?, b, gamma)?
        }
        k => {
            r.pos -= 9;
            return Err(r.format(format!("unknown operator kind {k}")));
        }
    };
    let b = r.f64s(n, "vector b")?;
    let tau = r.f64("tau")?;
    if r.pos != data.len() {
        return Err(r.format(format!("{} trailing bytes", data.len() - r.pos)));
    }
    QuadraticProblem::new(op, b, tau)
}

pub fn read_problem(path: impl AsRef<Path>) -> Result<QuadraticProblem> {
    let path = path.as_ref();
    let data = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    read_problem_bytes(&data)
}
