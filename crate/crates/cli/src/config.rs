//! Run configuration: flat `key = value` lines with dotted sections.
//!
//! ```text
//! # vacuum box, projection against the analytic spectrum
//! geometry.box.size = 1 0.5 0.75
//! geometry.box.cells = 8 4 6
//! material.preset = vacuum
//! solver.methods = projection, penalty
//! reference = analytic-box
//! ```

use std::collections::HashMap;
use std::path::PathBuf;

use cavity_core::eigensolvers::{Backend, Method, SolverConfig};
use cavity_core::materials::{parse_complex, MaterialTensors, Tensor3};
use cavity_core::modes::{ClassificationConfig, Experiment};
use cavity_core::c64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key `{key}` (first set on line {first})")]
    DuplicateKey { line: usize, key: String, first: usize },
    #[error("line {line}: invalid value for `{key}`: {reason}")]
    InvalidValue { line: usize, key: String, reason: String },
    #[error("no geometry given (set one of geometry.box.*, geometry.ball.*, geometry.cylinder.*, geometry.file)")]
    MissingGeometry,
    #[error("line {line}: geometry `{second}` conflicts with `{first}`; exactly one geometry is allowed")]
    ConflictingGeometry { line: usize, first: String, second: String },
    #[error("missing key `{0}`")]
    MissingKey(String),
    #[error("{0}")]
    Invalid(String),
}

/// One `key = value` line; `line` is 1-based, 0 for built-in defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    Box { size: [f64; 3], cells: [usize; 3] },
    Ball { radius: f64, level: usize },
    Cylinder { radius: f64, height: f64, level: usize },
    File { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReferenceChoice {
    None,
    AnalyticBox { count: usize },
    Paper(Experiment),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    pub dump_matrices: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub geometry: Geometry,
    pub material: MaterialTensors,
    /// Preset name, or `custom`.
    pub material_name: String,
    pub methods: Vec<Method>,
    pub solver: SolverConfig,
    pub classification: ClassificationConfig,
    pub reference: ReferenceChoice,
    /// Overrides the reference spectrum's own tolerance.
    pub reference_tolerance: Option<f64>,
    pub output: OutputConfig,
}

const KEYS: &[&str] = &[
    "geometry.box.size",
    "geometry.box.cells",
    "geometry.ball.radius",
    "geometry.ball.level",
    "geometry.cylinder.radius",
    "geometry.cylinder.height",
    "geometry.cylinder.level",
    "geometry.file",
    "material.preset",
    "material.eps_r",
    "material.mu_r",
    "solver.methods",
    "solver.k",
    "solver.alpha",
    "solver.alpha_list",
    "solver.dense_limit",
    "solver.qz_tol",
    "solver.rank_tol_factor",
    "solver.zero_tol_factor",
    "solver.backend",
    "solver.auto_dense_max",
    "solver.shift",
    "solver.krylov_tol",
    "solver.krylov_max_restarts",
    "solver.residual_threshold",
    "solver.match_tol",
    "reference",
    "reference.tolerance",
    "reference.count",
    "output.dir",
    "output.dump_matrices",
];

/// Splits text into entries. Rejects malformed lines, unknown keys and
/// duplicates.
pub fn parse_entries(text: &str) -> Result<Vec<Entry>, ConfigError> {
    let mut out: Vec<Entry> = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or(ConfigError::Syntax { line })?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(ConfigError::Syntax { line });
        }
        if !KEYS.contains(&key) {
            return Err(ConfigError::UnknownKey { line, key: key.to_string() });
        }
        if let Some(&first) = seen.get(key) {
            return Err(ConfigError::DuplicateKey { line, key: key.to_string(), first });
        }
        seen.insert(key.to_string(), line);
        out.push(Entry { line, key: key.to_string(), value: value.to_string() });
    }
    Ok(out)
}

/// Parses and validates a configuration file's text.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    RunConfig::from_entries(&parse_entries(text)?)
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {reason}")]
    Io { path: String, reason: String },
    #[error(transparent)]
    Parse(#[from] ConfigError),
}

pub fn load_entries(path: &std::path::Path) -> Result<Vec<Entry>, LoadError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| LoadError::Io { path: path.display().to_string(), reason: e.to_string() })?;
    Ok(parse_entries(&text)?)
}

pub fn load_config(path: &std::path::Path) -> Result<RunConfig, LoadError> {
    Ok(RunConfig::from_entries(&load_entries(path)?)?)
}

/// Overlays `overrides` on `base`. Any geometry key in `overrides` discards
/// all geometry keys of `base`.
pub fn merge_entries(base: &[Entry], overrides: &[Entry]) -> Vec<Entry> {
    let override_geometry = overrides.iter().any(|e| e.key.starts_with("geometry."));
    let mut out: Vec<Entry> = base
        .iter()
        .filter(|e| !(override_geometry && e.key.starts_with("geometry.")))
        .filter(|e| !overrides.iter().any(|o| o.key == e.key))
        .cloned()
        .collect();
    out.extend(overrides.iter().cloned());
    out
}

struct Lookup<'a> {
    entries: &'a [Entry],
}

impl<'a> Lookup<'a> {
    fn get(&self, key: &str) -> Option<&'a Entry> {
        self.entries.iter().find(|e| e.key == key)
    }

    fn invalid(e: &Entry, reason: impl Into<String>) -> ConfigError {
        ConfigError::InvalidValue { line: e.line, key: e.key.clone(), reason: reason.into() }
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        self.get(key)
            .map(|e| e.value.parse::<T>().map_err(|_| Self::invalid(e, format!("cannot parse `{}`", e.value))))
            .transpose()
    }

    fn positive(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        let v = self.parsed::<f64>(key)?;
        match (v, self.get(key)) {
            (Some(x), Some(e)) if !(x > 0.0 && x.is_finite()) => Err(Self::invalid(e, "must be positive")),
            _ => Ok(v),
        }
    }

    fn required<T>(&self, key: &str, v: Option<T>) -> Result<T, ConfigError> {
        v.ok_or_else(|| ConfigError::MissingKey(key.to_string()))
    }

    fn list<T: std::str::FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, ConfigError> {
        self.get(key)
            .map(|e| {
                e.value
                    .split([',', ' ', '\t'])
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse::<T>().map_err(|_| Self::invalid(e, format!("cannot parse `{s}`"))))
                    .collect::<Result<Vec<T>, _>>()
            })
            .transpose()
    }

    fn triple<T: std::str::FromStr + Copy>(&self, key: &str) -> Result<Option<[T; 3]>, ConfigError> {
        match self.list::<T>(key)? {
            None => Ok(None),
            Some(v) if v.len() == 3 => Ok(Some([v[0], v[1], v[2]])),
            Some(_) => Err(Self::invalid(self.get(key).expect("present"), "expected three values")),
        }
    }

    fn tensor(&self, key: &str) -> Result<Option<Tensor3>, ConfigError> {
        let Some(e) = self.get(key) else { return Ok(None) };
        let parts: Vec<&str> = e.value.split([',', ';']).map(str::trim).collect();
        if parts.len() != 9 {
            return Err(Self::invalid(e, "expected 9 comma-separated complex entries (row-major)"));
        }
        let mut t = [[c64::new(0.0, 0.0); 3]; 3];
        for (i, p) in parts.iter().enumerate() {
            t[i / 3][i % 3] = parse_complex(p).map_err(|err| Self::invalid(e, err.to_string()))?;
        }
        Ok(Some(Tensor3(t)))
    }
}

impl RunConfig {
    pub fn from_entries(entries: &[Entry]) -> Result<Self, ConfigError> {
        let l = Lookup { entries };
        let geometry = Self::geometry(&l)?;

        let preset = l.get("material.preset");
        let (eps, mu) = (l.tensor("material.eps_r")?, l.tensor("material.mu_r")?);
        let (material, material_name) = match (preset, eps.is_some() || mu.is_some()) {
            (Some(p), true) => {
                return Err(Lookup::invalid(p, "a preset cannot be combined with material.eps_r/mu_r"))
            }
            (Some(p), false) => (
                MaterialTensors::preset(&p.value).map_err(|err| Lookup::invalid(p, err.to_string()))?,
                p.value.clone(),
            ),
            (None, true) => {
                let eps = eps.unwrap_or_else(Tensor3::identity);
                let mu = mu.unwrap_or_else(Tensor3::identity);
                let mat = MaterialTensors::new(eps, mu).map_err(|err| ConfigError::Invalid(err.to_string()))?;
                (mat, "custom".to_string())
            }
            (None, false) => (MaterialTensors::vacuum(), "vacuum".to_string()),
        };

        let methods = match l.get("solver.methods") {
            None => vec![Method::Projection],
            Some(e) => {
                let mut out = Vec::new();
                for name in e.value.split([',', ' ']).filter(|s| !s.is_empty()) {
                    let m: Method = name.parse().map_err(|_| Lookup::invalid(e, format!("unknown method `{name}`")))?;
                    if !out.contains(&m) {
                        out.push(m);
                    }
                }
                if out.is_empty() {
                    return Err(Lookup::invalid(e, "at least one method is required"));
                }
                out
            }
        };

        let mut solver = SolverConfig::default();
        if let Some(k) = l.parsed::<usize>("solver.k")? {
            solver.k = k;
        }
        if let Some(a) = l.positive("solver.alpha")? {
            solver.alpha = a;
        }
        if let Some(v) = l.parsed::<usize>("solver.dense_limit")? {
            solver.dense_limit = v;
        }
        if let Some(v) = l.parsed::<f64>("solver.qz_tol")? {
            solver.qz_tol = v;
        }
        if let Some(v) = l.positive("solver.rank_tol_factor")? {
            solver.rank_tol_factor = v;
        }
        if let Some(v) = l.positive("solver.zero_tol_factor")? {
            solver.zero_tol_factor = v;
        }
        if let Some(e) = l.get("solver.backend") {
            solver.backend = e.value.parse::<Backend>().map_err(|err| Lookup::invalid(e, err.to_string()))?;
        }
        if let Some(v) = l.parsed::<usize>("solver.auto_dense_max")? {
            solver.auto_dense_max = v;
        }
        if let Some(e) = l.get("solver.shift") {
            solver.shift = parse_complex(&e.value).map_err(|err| Lookup::invalid(e, err.to_string()))?;
        }
        if let Some(v) = l.positive("solver.krylov_tol")? {
            solver.krylov_tol = v;
        }
        if let Some(v) = l.parsed::<usize>("solver.krylov_max_restarts")? {
            solver.krylov_max_restarts = v;
        }
        solver.validate().map_err(|err| ConfigError::Invalid(err.to_string()))?;

        let mut classification = ClassificationConfig::default();
        classification.residual_threshold = l.positive("solver.residual_threshold")?;
        if let Some(list) = l.list::<f64>("solver.alpha_list")? {
            classification.alpha_list = list;
        }
        if let Some(v) = l.positive("solver.match_tol")? {
            classification.match_tol = v;
        }
        classification.validate().map_err(|err| ConfigError::Invalid(err.to_string()))?;

        let count = l.parsed::<usize>("reference.count")?.unwrap_or(5);
        let reference = match l.get("reference") {
            None => ReferenceChoice::None,
            Some(e) => match e.value.as_str() {
                "none" => ReferenceChoice::None,
                "analytic-box" => {
                    if !matches!(geometry, Geometry::Box { .. }) {
                        return Err(Lookup::invalid(e, "analytic-box needs a box geometry"));
                    }
                    ReferenceChoice::AnalyticBox { count: count.max(1) }
                }
                other => ReferenceChoice::Paper(
                    other.parse::<Experiment>().map_err(|err| Lookup::invalid(e, err.to_string()))?,
                ),
            },
        };
        let reference_tolerance = l.positive("reference.tolerance")?;

        let output = OutputConfig {
            dir: l.get("output.dir").map(|e| PathBuf::from(&e.value)),
            dump_matrices: l.parsed::<bool>("output.dump_matrices")?.unwrap_or(false),
        };

        Ok(RunConfig {
            geometry,
            material,
            material_name,
            methods,
            solver,
            classification,
            reference,
            reference_tolerance,
            output,
        })
    }

    fn geometry(l: &Lookup<'_>) -> Result<Geometry, ConfigError> {
        let family = |key: &str| key.strip_prefix("geometry.").map(|rest| rest.split('.').next().unwrap_or(rest).to_string());
        let mut first: Option<String> = None;
        for e in l.entries {
            if let Some(f) = family(&e.key) {
                match &first {
                    None => first = Some(f),
                    Some(g) if *g != f => {
                        return Err(ConfigError::ConflictingGeometry { line: e.line, first: g.clone(), second: f })
                    }
                    _ => {}
                }
            }
        }
        let at_least_one = |key: &str, v: usize| -> Result<usize, ConfigError> {
            if v == 0 {
                Err(Lookup::invalid(l.get(key).expect("present"), "must be at least 1"))
            } else {
                Ok(v)
            }
        };
        match first.as_deref() {
            None => Err(ConfigError::MissingGeometry),
            Some("box") => {
                let size = l.required("geometry.box.size", l.triple::<f64>("geometry.box.size")?)?;
                if !size.iter().all(|v| *v > 0.0 && v.is_finite()) {
                    return Err(Lookup::invalid(l.get("geometry.box.size").expect("present"), "sizes must be positive"));
                }
                let cells = l.required("geometry.box.cells", l.triple::<usize>("geometry.box.cells")?)?;
                if cells.contains(&0) {
                    return Err(Lookup::invalid(l.get("geometry.box.cells").expect("present"), "cells must be at least 1"));
                }
                Ok(Geometry::Box { size, cells })
            }
            Some("ball") => {
                let radius = l.required("geometry.ball.radius", l.positive("geometry.ball.radius")?)?;
                let level = l.required("geometry.ball.level", l.parsed::<usize>("geometry.ball.level")?)?;
                Ok(Geometry::Ball { radius, level: at_least_one("geometry.ball.level", level)? })
            }
            Some("cylinder") => {
                let radius = l.required("geometry.cylinder.radius", l.positive("geometry.cylinder.radius")?)?;
                let height = l.required("geometry.cylinder.height", l.positive("geometry.cylinder.height")?)?;
                let level = l.required("geometry.cylinder.level", l.parsed::<usize>("geometry.cylinder.level")?)?;
                Ok(Geometry::Cylinder { radius, height, level: at_least_one("geometry.cylinder.level", level)? })
            }
            Some(_) => Ok(Geometry::File { path: PathBuf::from(&l.get("geometry.file").expect("present").value) }),
        }
    }
}

/// Built-in configuration of a validation experiment.
pub fn experiment_entries(which: Experiment) -> Vec<Entry> {
    let text = match which {
        Experiment::Sphere => {
            "geometry.ball.radius = 1\ngeometry.ball.level = 3\nmaterial.preset = vacuum\n\
             solver.methods = penalty, augmented, projection\nreference = sphere\n"
        }
        Experiment::CylinderCase2 => {
            "geometry.cylinder.radius = 0.2\ngeometry.cylinder.height = 0.5\ngeometry.cylinder.level = 3\n\
             material.preset = paper-case2\nsolver.methods = penalty, augmented, projection\nreference = cylinder-case2\n"
        }
        Experiment::CylinderCase4 => {
            "geometry.cylinder.radius = 0.2\ngeometry.cylinder.height = 0.5\ngeometry.cylinder.level = 3\n\
             material.preset = paper-case4\nsolver.methods = penalty, augmented, projection\nreference = cylinder-case4\n"
        }
    };
    parse_entries(text)
        .expect("built-in experiment configuration parses")
        .into_iter()
        .map(|e| Entry { line: 0, ..e })
        .collect()
}
