//! TOML run configuration shared by `train`, `bench` and `sweep`.
//!
//! ```toml
//! out = "runs/demo"
//! seeds = [1, 2, 3]
//! parallel = 4
//!
//! [[datasets]]
//! builtin = "two_arcs"
//! [[datasets]]
//! manifest = "data/iris.toml"   # relative to this file
//!
//! [[methods]]
//! name = "RVFL"
//! [[methods]]
//! name = "sdRVFL(dense-l2)"
//! params = { layers = 2, ae_widths = [40, 40], clf_width = 200, c_ae = 1e3, c_clf = 1e3 }
//!
//! [grid]
//! clf_widths = [100, 200, 400]
//! ```
//!
//! Unknown keys anywhere are rejected.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use rvfl_core::select::{Architecture, GridSpec, HyperParams, Method};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::builtin;
use crate::error::{config_err, Error, Result};
use crate::io::{load_manifest, Prepared};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodEntry {
    pub name: String,
    /// Needed only for names outside the preset list.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arch: Option<Architecture>,
    /// Fixed hyperparameters; `train` and `sweep` search when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<HyperParams>,
    /// Replaces the run-level grid for this method.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_out")]
    pub out: PathBuf,
    /// Selection uses the first seed; test scores average over all.
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    /// Worker threads for grid cells.
    #[serde(default = "default_parallel")]
    pub parallel: usize,
    /// Significance level for the post-hoc test.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    pub datasets: Vec<DatasetEntry>,
    pub methods: Vec<MethodEntry>,
    #[serde(default)]
    pub grid: GridSpec,
}

fn default_out() -> PathBuf {
    PathBuf::from("runs")
}

fn default_seeds() -> Vec<u64> {
    (1..=10).collect()
}

fn default_parallel() -> usize {
    1
}

fn default_alpha() -> f64 {
    0.05
}

/// A method with the grid it searches.
#[derive(Clone, Debug, PartialEq)]
pub struct ResolvedMethod {
    pub method: Method,
    pub params: Option<HyperParams>,
    pub grid: GridSpec,
}

impl RunConfig {
    /// Parses and validates; manifest paths are made relative to `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| config_err!("config: {e}"))?;
        for d in &mut cfg.datasets {
            if let Some(m) = &mut d.manifest {
                if m.is_relative() {
                    *m = base.join(&*m);
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        RunConfig::parse(&text, base).map_err(|e| match e {
            Error::Config(msg) => config_err!("{}: {msg}", path.display()),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(config_err!("`seeds` must not be empty"));
        }
        if self.parallel == 0 {
            return Err(config_err!("`parallel` must be at least 1"));
        }
        if !(self.alpha == 0.05 || self.alpha == 0.10) {
            return Err(config_err!("`alpha` must be 0.05 or 0.10, got {}", self.alpha));
        }
        if self.datasets.is_empty() || self.methods.is_empty() {
            return Err(config_err!("at least one dataset and one method are required"));
        }
        for d in &self.datasets {
            match (&d.builtin, &d.manifest) {
                (Some(b), None) if !builtin::names().contains(&b.as_str()) => {
                    return Err(config_err!(
                        "unknown builtin dataset '{b}' (available: {})",
                        builtin::names().join(", ")
                    ))
                }
                (Some(_), None) | (None, Some(_)) => {}
                _ => return Err(config_err!("each dataset needs exactly one of `builtin` or `manifest`")),
            }
        }
        let mut seen = BTreeSet::new();
        for m in self.resolve_methods()? {
            if !seen.insert(m.method.name.clone()) {
                return Err(config_err!("method '{}' is listed twice", m.method.name));
            }
            m.grid
                .validate_for(&m.method)
                .map_err(|e| config_err!("grid for {}: {e}", m.method.name))?;
            if let Some(p) = &m.params {
                m.method
                    .build(p, 0, &m.grid.solver)
                    .map_err(|e| config_err!("params for {}: {e}", m.method.name))?;
            }
        }
        Ok(())
    }

    pub fn resolve_methods(&self) -> Result<Vec<ResolvedMethod>> {
        self.methods
            .iter()
            .map(|e| {
                let method = match e.arch {
                    Some(arch) => Method::new(e.name.clone(), arch),
                    None => e.name.parse().map_err(|_| {
                        let known: Vec<String> = Method::presets().into_iter().map(|m| m.name).collect();
                        config_err!("unknown method '{}' (presets: {})", e.name, known.join(", "))
                    })?,
                };
                Ok(ResolvedMethod {
                    method,
                    params: e.params.clone(),
                    grid: e.grid.clone().unwrap_or_else(|| self.grid.clone()),
                })
            })
            .collect()
    }

    /// Loads every dataset; names must be unique across the run.
    pub fn load_datasets(&self) -> Result<Vec<Prepared>> {
        let mut out = Vec::new();
        for d in &self.datasets {
            let loaded = match (&d.builtin, &d.manifest) {
                (Some(b), _) => builtin::load(b)?,
                (_, Some(m)) => load_manifest(m)?,
                _ => unreachable!("validated"),
            };
            out.extend(loaded);
        }
        let mut seen = BTreeSet::new();
        for p in &out {
            if !seen.insert(p.dataset.name().to_string()) {
                return Err(config_err!("dataset '{}' is listed twice", p.dataset.name()));
            }
        }
        Ok(out)
    }

    /// Hex SHA-256 over everything that affects results. Output location
    /// and thread count are excluded.
    pub fn fingerprint(&self) -> String {
        #[derive(Serialize)]
        struct Key<'a> {
            seeds: &'a [u64],
            datasets: &'a [DatasetEntry],
            methods: &'a [MethodEntry],
            grid: &'a GridSpec,
        }
        let key = Key {
            seeds: &self.seeds,
            datasets: &self.datasets,
            methods: &self.methods,
            grid: &self.grid,
        };
        let json = serde_json::to_string(&key).expect("config serializes");
        Sha256::digest(json.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}
