//! Flat `key = value` configuration with dotted sections.
//!
//! ```text
//! # comment
//! grid.n = 1
//! grid.nodes = 256
//! alpha.beta = 0.3
//! alpha.q.term = 1 0 : -0.3183098861837907 0
//! solver.tol = 1e-8
//! ```
//!
//! Repeated keys accumulate (`alpha.q.term`, `geodesic.f1.term`,
//! `supercanonical.gamma.pole`); for every other key the last value wins.
//! Environment variables `PSH_<KEY>` override file values, with `__` standing
//! for a dot (`PSH_SOLVER__TOL=1e-9`).

use std::collections::BTreeMap;

use num_complex::Complex64;
use psh_core::envelope::SolverOptions;
use psh_core::geometry::{AlphaForm, Herm, TrigPoly, TrigTerm};
use psh_core::{Error, Result};
use serde::Serialize;

pub const ENV_PREFIX: &str = "PSH_";

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    entries: Vec<(String, String)>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::Validation(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let k = k.trim();
            if k.is_empty() || !k.chars().all(|c| c.is_ascii_alphanumeric() || c == '.' || c == '_') {
                return Err(Error::Validation(format!("line {}: bad key `{k}`", lineno + 1)));
            }
            entries.push((k.to_string(), v.trim().to_string()));
        }
        Ok(Self { entries })
    }

    pub fn set(&mut self, key: &str, value: &str) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    /// Applies `PSH_*` overrides from the given variables.
    pub fn apply_env<I: IntoIterator<Item = (String, String)>>(&mut self, vars: I) {
        let mut found: Vec<(String, String)> = vars
            .into_iter()
            .filter_map(|(k, v)| {
                k.strip_prefix(ENV_PREFIX).map(|rest| (rest.to_ascii_lowercase().replace("__", "."), v))
            })
            .collect();
        found.sort();
        for (k, v) in found {
            self.set(&k, &v);
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn get_all(&self, key: &str) -> Vec<&str> {
        self.entries.iter().filter(|(k, _)| k == key).map(|(_, v)| v.as_str()).collect()
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(k, _)| k.as_str())
    }

    /// Effective key/value pairs (last value wins; repeated keys joined by `;`).
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut out: BTreeMap<String, String> = BTreeMap::new();
        for (k, v) in &self.entries {
            if REPEATED.contains(&k.as_str()) {
                out.entry(k.clone()).and_modify(|s| {
                    s.push_str("; ");
                    s.push_str(v)
                }).or_insert_with(|| v.clone());
            } else {
                out.insert(k.clone(), v.clone());
            }
        }
        out
    }

    fn parse_num<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<T>()
                .map(Some)
                .map_err(|_| Error::Validation(format!("`{key}`: cannot parse `{v}`"))),
        }
    }
}

const REPEATED: &[&str] = &[
    "alpha.q.term",
    "geodesic.f0.term",
    "geodesic.f1.term",
    "regularize.psi.term",
    "supercanonical.gamma.pole",
];

const KNOWN: &[&str] = &[
    "grid.n",
    "grid.nodes",
    "alpha.beta",
    "alpha.q.term",
    "solver.method",
    "solver.omega",
    "solver.tol",
    "solver.max_iter",
    "solver.nested",
    "seed",
    "threads",
    "regularize.c",
    "regularize.delta",
    "regularize.k",
    "regularize.point",
    "regularize.psi.term",
    "geodesic.nt",
    "geodesic.f0.term",
    "geodesic.f1.term",
    "supercanonical.lambda",
    "supercanonical.p",
    "supercanonical.gamma.pole",
    "supercanonical.gamma.normalize",
    "supercanonical.source_stride",
    "supercanonical.eval_stride",
    "supercanonical.max_iter",
    "supercanonical.gap_tol",
    "suite.scale",
];

/// `k1 k2 [k3 k4] : cos sin`.
pub fn parse_term(spec: &str) -> Result<TrigTerm> {
    let bad = || Error::Validation(format!("trigonometric term `{spec}`: expected `k1 k2 [k3 k4] : cos sin`"));
    let (ks, cs) = spec.split_once(':').ok_or_else(bad)?;
    let ks: Vec<i32> = ks.split_whitespace().map(|s| s.parse()).collect::<std::result::Result<_, _>>().map_err(|_| bad())?;
    let cs: Vec<f64> = cs.split_whitespace().map(|s| s.parse()).collect::<std::result::Result<_, _>>().map_err(|_| bad())?;
    if !(ks.len() == 2 || ks.len() == 4) || cs.len() != 2 || cs.iter().any(|c| !c.is_finite()) {
        return Err(bad());
    }
    let mut k = [0i32; 4];
    k[..ks.len()].copy_from_slice(&ks);
    Ok(TrigTerm { k, cos: cs[0], sin: cs[1] })
}

fn parse_poly(raw: &RawConfig, key: &str, n: usize) -> Result<TrigPoly> {
    let terms = raw.get_all(key).into_iter().map(parse_term).collect::<Result<Vec<_>>>()?;
    if n == 1 && terms.iter().any(|t| t.k[2] != 0 || t.k[3] != 0) {
        return Err(Error::Validation(format!("`{key}`: frequencies beyond dimension one")));
    }
    Ok(TrigPoly::new(terms))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    Obstacle,
    Disc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scale {
    Quick,
    Full,
}

#[derive(Debug, Clone)]
pub struct RegularizeSettings {
    pub c: f64,
    pub delta: f64,
    pub k: Option<f64>,
    pub point: [f64; 4],
    pub psi: Option<TrigPoly>,
}

#[derive(Debug, Clone)]
pub struct GeodesicSettings {
    pub nt: usize,
    pub f0: TrigPoly,
    pub f1: TrigPoly,
}

#[derive(Debug, Clone)]
pub struct SupercanonicalSettings {
    pub lambda: f64,
    pub p: f64,
    /// `(x, y, c)` in node coordinates.
    pub poles: Vec<(usize, usize, f64)>,
    pub normalize: bool,
    pub source_stride: usize,
    pub eval_stride: usize,
    pub max_iter: usize,
    pub gap_tol: f64,
}

/// Typed run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub n: usize,
    pub nodes: usize,
    pub alpha: AlphaForm,
    pub method: SolverKind,
    pub solver: SolverOptions,
    pub seed: u64,
    pub threads: usize,
    pub regularize: RegularizeSettings,
    pub geodesic: GeodesicSettings,
    pub supercanonical: SupercanonicalSettings,
    pub scale: Scale,
    pub raw: RawConfig,
}

impl RunConfig {
    pub fn from_raw(raw: RawConfig) -> Result<Self> {
        for k in raw.keys() {
            if !KNOWN.contains(&k) {
                return Err(Error::Validation(format!("unknown key `{k}`")));
            }
        }
        let n: usize = raw.parse_num("grid.n")?.unwrap_or(1);
        if n != 1 && n != 2 {
            return Err(Error::Validation(format!("grid.n = {n}: dimension must be 1 or 2")));
        }
        let nodes: usize = raw.parse_num("grid.nodes")?.unwrap_or(64);
        let beta = match raw.get("alpha.beta") {
            None => Herm::identity(n),
            Some(s) => {
                let v: Vec<f64> = s
                    .split_whitespace()
                    .map(|x| x.parse())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::Validation(format!("alpha.beta: cannot parse `{s}`")))?;
                match (n, v.len()) {
                    (1, 1) => Herm::scalar(v[0]),
                    (2, 4) => Herm::two(v[0], v[1], Complex64::new(v[2], v[3])),
                    _ => {
                        return Err(Error::Validation(
                            "alpha.beta: one entry for n = 1, `b11 b22 re im` for n = 2".into(),
                        ))
                    }
                }
            }
        };
        let alpha = AlphaForm::new(beta, parse_poly(&raw, "alpha.q.term", n)?);
        let method = match raw.get("solver.method") {
            None if n == 1 => SolverKind::Obstacle,
            None => SolverKind::Disc,
            Some("obstacle") => SolverKind::Obstacle,
            Some("disc") | Some("disc-average") => SolverKind::Disc,
            Some(m) => return Err(Error::Validation(format!("solver.method `{m}`"))),
        };
        if method == SolverKind::Obstacle && n != 1 {
            return Err(Error::Validation("the obstacle solver needs grid.n = 1".into()));
        }
        let mut solver = SolverOptions::for_dim(n);
        if let Some(v) = raw.parse_num("solver.omega")? {
            solver.omega = v;
        }
        if let Some(v) = raw.parse_num("solver.tol")? {
            solver.tol = v;
        }
        if let Some(v) = raw.parse_num("solver.max_iter")? {
            solver.max_iter = v;
        }
        if let Some(v) = raw.parse_num("solver.nested")? {
            solver.nested = v;
        }
        solver.validate()?;
        let threads = raw.parse_num("threads")?.unwrap_or(1);
        if threads == 0 {
            return Err(Error::Validation("threads must be positive".into()));
        }
        let point = match raw.get("regularize.point") {
            None => [0.0; 4],
            Some(s) => {
                let v: Vec<f64> = s
                    .split_whitespace()
                    .map(|x| x.parse())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::Validation(format!("regularize.point `{s}`")))?;
                if v.len() != 2 * n {
                    return Err(Error::Validation("regularize.point needs 2n coordinates".into()));
                }
                let mut p = [0.0; 4];
                p[..v.len()].copy_from_slice(&v);
                p
            }
        };
        let psi_terms = raw.get_all("regularize.psi.term");
        let regularize = RegularizeSettings {
            c: raw.parse_num("regularize.c")?.unwrap_or(1.0),
            delta: raw.parse_num("regularize.delta")?.unwrap_or(0.125),
            k: raw.parse_num("regularize.k")?,
            point,
            psi: if psi_terms.is_empty() { None } else { Some(parse_poly(&raw, "regularize.psi.term", n)?) },
        };
        let geodesic = GeodesicSettings {
            nt: raw.parse_num("geodesic.nt")?.unwrap_or((nodes / 4).max(2)),
            f0: parse_poly(&raw, "geodesic.f0.term", n)?,
            f1: parse_poly(&raw, "geodesic.f1.term", n)?,
        };
        let mut poles = Vec::new();
        for s in raw.get_all("supercanonical.gamma.pole") {
            let bad = || Error::Validation(format!("supercanonical.gamma.pole `{s}`: expected `x y : c`"));
            let (xy, c) = s.split_once(':').ok_or_else(bad)?;
            let xy: Vec<usize> = xy
                .split_whitespace()
                .map(|v| v.parse())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| bad())?;
            let c: f64 = c.trim().parse().map_err(|_| bad())?;
            if xy.len() != 2 {
                return Err(bad());
            }
            if c >= 1.0 {
                return Err(Error::KltViolation { coeff: c });
            }
            poles.push((xy[0], xy[1], c));
        }
        let supercanonical = SupercanonicalSettings {
            lambda: raw.parse_num("supercanonical.lambda")?.unwrap_or(1.0),
            p: raw.parse_num("supercanonical.p")?.unwrap_or(1.0),
            poles,
            normalize: raw.parse_num("supercanonical.gamma.normalize")?.unwrap_or(false),
            source_stride: raw.parse_num("supercanonical.source_stride")?.unwrap_or(2),
            eval_stride: raw.parse_num("supercanonical.eval_stride")?.unwrap_or((nodes / 4).max(1)),
            max_iter: raw.parse_num("supercanonical.max_iter")?.unwrap_or(500),
            gap_tol: raw.parse_num("supercanonical.gap_tol")?.unwrap_or(1e-7),
        };
        let scale = match raw.get("suite.scale") {
            None | Some("full") => Scale::Full,
            Some("quick") => Scale::Quick,
            Some(s) => return Err(Error::Validation(format!("suite.scale `{s}`"))),
        };
        Ok(Self {
            n,
            nodes,
            alpha,
            method,
            solver,
            seed: raw.parse_num("seed")?.unwrap_or(0),
            threads,
            regularize,
            geodesic,
            supercanonical,
            scale,
            raw,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_raw(RawConfig::parse(text)?)
    }
}
