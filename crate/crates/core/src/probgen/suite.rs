//! Suite manifests and the built-in desk-scale suite.
//!
//! Manifest CSV columns: `id,family,seed,params,path`, with `params` written as
//! `key=value;key=value` and `path` relative to the manifest's directory.

use std::path::{Path, PathBuf};

use super::{gen_elastic_net, gen_sigrec, gen_strict_comp, write_problem, GeneratedInstance};
use crate::error::{Error, Result};
use crate::linalg::norm_inf;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    ElasticNet,
    Sigrec,
    StrictComp,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::ElasticNet => "elastic_net",
            Family::Sigrec => "sigrec",
            Family::StrictComp => "strict_comp",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "elastic_net" => Some(Family::ElasticNet),
            "sigrec" => Some(Family::Sigrec),
            "strict_comp" => Some(Family::StrictComp),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    pub id: String,
    pub family: Family,
    pub seed: u64,
    pub params: Vec<(String, f64)>,
    pub path: PathBuf,
}

impl ManifestEntry {
    pub fn param(&self, key: &str) -> Result<f64> {
        self.params
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| *v)
            .ok_or_else(|| Error::argument(format!("{}: missing parameter {key}", self.id)))
    }

    fn count(&self, key: &str) -> Result<usize> {
        let v = self.param(key)?;
        if v >= 0.0 && v.fract() == 0.0 && v <= usize::MAX as f64 {
            Ok(v as usize)
        } else {
            Err(Error::argument(format!("{}: {key} = {v} is not a count", self.id)))
        }
    }

    /// Conditioning regime: the letter before the trailing digits of the id
    /// (`s` singular, `i` ill-conditioned, `m` moderate).
    pub fn regime(&self) -> Option<char> {
        self.id.trim_end_matches(|c: char| c.is_ascii_digit()).chars().last()
    }

    /// Regimes `i` and `m`, where `A` is positive definite with a usable
    /// smallest eigenvalue.
    pub fn is_spd_regime(&self) -> bool {
        matches!(self.regime(), Some('i' | 'm'))
    }

    pub fn generate(&self) -> Result<GeneratedInstance> {
        match self.family {
            Family::ElasticNet => gen_elastic_net(
                self.count("m")?,
                self.count("n")?,
                self.param("scale")?,
                self.param("gamma")?,
                self.param("tau")?,
                self.seed,
            ),
            Family::Sigrec => gen_sigrec(
                self.count("m")?,
                self.count("n")?,
                self.count("signal_nnz")?,
                self.param("noise_sigma")?,
                self.param("gamma")?,
                self.param("tau")?,
                self.seed,
            ),
            Family::StrictComp => gen_strict_comp(
                self.count("n")?,
                self.count("nnz")?,
                self.param("cond")?,
                self.param("tau")?,
                self.param("margin")?,
                self.seed,
            ),
        }
    }

    pub fn resolve(&self, base: &Path) -> PathBuf {
        base.join(&self.path)
    }
}

fn format_params(params: &[(String, f64)]) -> String {
    params
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(";")
}

fn parse_params(s: &str) -> Result<Vec<(String, f64)>> {
    s.split(';')
        .filter(|kv| !kv.is_empty())
        .map(|kv| {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::argument(format!("bad parameter {kv:?}")))?;
            let v = v
                .parse::<f64>()
                .map_err(|_| Error::argument(format!("bad value in parameter {kv:?}")))?;
            Ok((k.to_string(), v))
        })
        .collect()
}

pub fn write_manifest<W: std::io::Write>(out: W, entries: &[ManifestEntry]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["id", "family", "seed", "params", "path"])?;
    for e in entries {
        w.write_record([
            e.id.clone(),
            e.family.name().to_string(),
            e.seed.to_string(),
            format_params(&e.params),
            e.path.to_string_lossy().into_owned(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<manifest>", e))?;
    Ok(())
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<Vec<ManifestEntry>> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for row in r.records() {
        let row = row?;
        if row.len() != 5 {
            return Err(Error::argument(format!("{}: expected 5 columns, got {}", path.display(), row.len())));
        }
        let family = Family::parse(&row[1]).ok_or_else(|| Error::argument(format!("unknown family {:?}", &row[1])))?;
        let seed = row[2]
            .parse()
            .map_err(|_| Error::argument(format!("bad seed {:?}", &row[2])))?;
        out.push(ManifestEntry {
            id: row[0].to_string(),
            family,
            seed,
            params: parse_params(&row[3])?,
            path: PathBuf::from(&row[4]),
        });
    }
    Ok(out)
}

/// Writes every instance file and `manifest.csv` into `dir`.
pub fn write_suite(dir: impl AsRef<Path>, entries: &[ManifestEntry]) -> Result<PathBuf> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for e in entries {
        write_problem(e.resolve(dir), &e.generate()?.problem)?;
    }
    let manifest = dir.join("manifest.csv");
    let file = std::fs::File::create(&manifest).map_err(|e| Error::io(&manifest, e))?;
    write_manifest(std::io::BufWriter::new(file), entries)?;
    Ok(manifest)
}

const REGIMES: [char; 3] = ['s', 'i', 'm'];

fn entry(id: String, family: Family, seed: u64, params: Vec<(&str, f64)>) -> ManifestEntry {
    ManifestEntry {
        path: PathBuf::from(format!("{id}.ql1p")),
        id,
        family,
        seed,
        params: params.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
    }
}

/// Elastic-net group: one `B` per group, `γ` per regime, `τ` as fractions of
/// `‖b‖∞`.
fn elastic_group(name: &str, m: usize, n: usize, scale: f64, seed: u64, gammas: [f64; 3], fracs: [f64; 4]) -> Result<Vec<ManifestEntry>> {
    let b_inf = norm_inf(&gen_elastic_net(m, n, scale, 0.0, 0.0, seed)?.problem.b);
    let mut out = Vec::new();
    for (regime, gamma) in REGIMES.iter().zip(gammas) {
        for (j, frac) in fracs.iter().enumerate() {
            let params = vec![
                ("m", m as f64),
                ("n", n as f64),
                ("scale", scale),
                ("gamma", gamma),
                ("tau", frac * b_inf),
            ];
            out.push(entry(format!("{name}{regime}{}", j + 1), Family::ElasticNet, seed, params));
        }
    }
    Ok(out)
}

/// The 48-instance desk-scale suite: four groups (`myrand`, `spectra`,
/// `sigrec`, `strict`) times three conditioning regimes times four `τ`.
pub fn desk_suite() -> Result<Vec<ManifestEntry>> {
    let mut out = elastic_group("myrand", 250, 500, 2000.0, 11, [0.0, 1e-3, 1.0], [5e-4, 5e-3, 5e-2, 0.5])?;
    out.extend(elastic_group("spectra", 60, 400, 1.0, 12, [0.0, 1e-3, 1.0], [5e-4, 5e-3, 5e-2, 0.5])?);

    let (m, n, spikes, sigma, seed) = (256usize, 1024usize, 32usize, 0.01, 13u64);
    let b_inf = norm_inf(&gen_sigrec(m, n, spikes, sigma, 0.0, 0.0, seed)?.problem.b);
    for (regime, gamma) in REGIMES.iter().zip([0.0, 5e-6, 5e-3]) {
        for (j, frac) in [1e-3, 1e-2, 0.1, 0.5].iter().enumerate() {
            let params = vec![
                ("m", m as f64),
                ("n", n as f64),
                ("signal_nnz", spikes as f64),
                ("noise_sigma", sigma),
                ("gamma", gamma),
                ("tau", frac * b_inf),
            ];
            out.push(entry(format!("sigrec{regime}{}", j + 1), Family::Sigrec, seed, params));
        }
    }

    for (r, (regime, cond)) in REGIMES.iter().zip([1e8, 1e6, 1e3]).enumerate() {
        for (j, (nnz, tau)) in [(25usize, 1e-3), (50, 1e-2), (100, 0.1), (250, 1.0)].iter().enumerate() {
            let params = vec![
                ("n", 500.0),
                ("nnz", *nnz as f64),
                ("cond", cond),
                ("tau", *tau),
                ("margin", 0.2),
            ];
            let seed = 100 + (4 * r + j) as u64;
            out.push(entry(format!("strict{regime}{}", j + 1), Family::StrictComp, seed, params));
        }
    }
    Ok(out)
}
