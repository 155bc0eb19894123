//! Delimited feature files, partition index files and dataset manifests.
//!
//! A manifest is a small TOML file next to the data:
//!
//! ```toml
//! name = "two_arcs"
//! data = "two_arcs.csv"
//! label = "last"        # column index, header name, "first" or "last"
//! header = true
//! scaling = "minmax"    # or "zscore", "none"
//!
//! [[splits]]
//! name = "holdout"
//! train = "two_arcs.train"
//! validation = "two_arcs.val"
//! test = "two_arcs.test"
//! ```
//!
//! Index files hold one zero-based row index per line; blank lines and lines
//! starting with `#` are skipped. Relative paths resolve against the
//! manifest's directory.

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use rvfl_core::data::{fit_apply_scaling, Dataset, Partitions, ScalingMethod, ScalingStats};
use rvfl_core::numerics::Matrix;
use serde::{Deserialize, Serialize};

use crate::error::{config_err, Error, Result};

/// Which column holds the class label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LabelColumn {
    Index(usize),
    /// A header name, or `first` / `last` when no header column matches.
    Name(String),
}

impl Default for LabelColumn {
    fn default() -> Self {
        LabelColumn::Name("last".into())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CsvSchema {
    pub label: LabelColumn,
    pub header: bool,
    pub delimiter: char,
}

impl Default for CsvSchema {
    fn default() -> Self {
        CsvSchema {
            label: LabelColumn::default(),
            header: false,
            delimiter: ',',
        }
    }
}

/// Parsed table: features, dense class ids and the raw label of each id.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub x: Matrix,
    pub labels: Vec<usize>,
    pub class_names: Vec<String>,
    pub feature_names: Vec<String>,
}

fn label_index(schema: &CsvSchema, headers: Option<&csv::StringRecord>, width: usize) -> Result<usize> {
    let idx = match &schema.label {
        LabelColumn::Index(i) => *i,
        LabelColumn::Name(name) => {
            let by_header = headers.and_then(|h| h.iter().position(|c| c == name));
            match (by_header, name.as_str()) {
                (Some(i), _) => i,
                (None, "first") => 0,
                (None, "last") => width.saturating_sub(1),
                (None, _) => return Err(config_err!("label column '{name}' not found in header")),
            }
        }
    };
    if idx >= width {
        return Err(config_err!("label column {idx} out of range for {width} columns"));
    }
    Ok(idx)
}

/// Sorted distinct labels, numerically when every label parses as a number.
fn class_order(raw: &[String]) -> Vec<String> {
    let distinct: BTreeSet<&String> = raw.iter().collect();
    let mut names: Vec<String> = distinct.into_iter().cloned().collect();
    let numeric: Option<Vec<f64>> = names.iter().map(|s| s.parse::<f64>().ok()).collect();
    if let Some(values) = numeric {
        let mut pairs: Vec<(f64, String)> = values.into_iter().zip(names).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        names = pairs.into_iter().map(|p| p.1).collect();
    }
    names
}

/// Parses a delimited table. `source` names the input in error messages.
pub fn parse_table(reader: impl Read, schema: &CsvSchema, source: &str) -> Result<Table> {
    if !schema.delimiter.is_ascii() {
        return Err(config_err!("{source}: delimiter must be a single ASCII character"));
    }
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(schema.header)
        .delimiter(schema.delimiter as u8)
        .trim(csv::Trim::All)
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(reader);
    let headers = if schema.header {
        Some(rdr.headers().map_err(|e| config_err!("{source}: header: {e}"))?.clone())
    } else {
        None
    };
    let mut width = headers.as_ref().map(|h| h.len());
    let mut label_col = None;
    let mut values = Vec::new();
    let mut raw_labels = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| config_err!("{source}: row {row}: {e}"))?;
        let line = rec.position().map_or(0, |p| p.line());
        let w = *width.get_or_insert(rec.len());
        if rec.len() != w {
            return Err(config_err!(
                "{source}: row {row} (line {line}) has {} fields, expected {w}",
                rec.len()
            ));
        }
        if w < 2 {
            return Err(config_err!("{source}: need at least one feature column and a label column"));
        }
        let lc = match label_col {
            Some(c) => c,
            None => *label_col.insert(label_index(schema, headers.as_ref(), w)?),
        };
        for (col, field) in rec.iter().enumerate() {
            if col == lc {
                raw_labels.push(field.to_string());
                continue;
            }
            let v: f64 = field.parse().map_err(|_| {
                let name = headers
                    .as_ref()
                    .and_then(|h| h.get(col))
                    .map(|n| format!(" ('{n}')"))
                    .unwrap_or_default();
                config_err!("{source}: row {row} (line {line}), column {col}{name}: '{field}' is not a number")
            })?;
            if !v.is_finite() {
                return Err(config_err!("{source}: row {row} (line {line}), column {col}: non-finite value"));
            }
            values.push(v);
        }
    }
    let (Some(w), Some(lc)) = (width, label_col) else {
        return Err(config_err!("{source}: no data rows"));
    };
    let classes = class_order(&raw_labels);
    let ids: HashMap<&str, usize> = classes.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
    let labels = raw_labels.iter().map(|l| ids[l.as_str()]).collect();
    let feature_names = (0..w)
        .filter(|&c| c != lc)
        .map(|c| {
            headers
                .as_ref()
                .and_then(|h| h.get(c))
                .map_or_else(|| format!("x{c}"), str::to_string)
        })
        .collect();
    let n = raw_labels.len();
    Ok(Table {
        x: Matrix::from_vec(n, w - 1, values)?,
        labels,
        class_names: classes,
        feature_names,
    })
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "data".into(), |s| s.to_string_lossy().into_owned())
}

/// Loads a delimited file; every row starts in the train partition.
pub fn load_csv(path: &Path, schema: &CsvSchema) -> Result<(Dataset, Vec<String>)> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let t = parse_table(file, schema, &path.display().to_string())?;
    let k = t.class_names.len();
    Ok((Dataset::with_classes(stem(path), t.x, t.labels, k)?, t.class_names))
}

pub fn parse_indices(text: &str, source: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let i = line
            .parse()
            .map_err(|_| config_err!("{source}: line {}: '{line}' is not a row index", n + 1))?;
        out.push(i);
    }
    Ok(out)
}

pub fn read_indices(path: &Path) -> Result<Vec<usize>> {
    parse_indices(&read_text(path)?, &path.display().to_string())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scaling {
    #[default]
    MinMax,
    ZScore,
    None,
}

impl Scaling {
    pub fn method(self) -> Option<ScalingMethod> {
        match self {
            Scaling::MinMax => Some(ScalingMethod::MinMax),
            Scaling::ZScore => Some(ScalingMethod::ZScore),
            Scaling::None => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitFiles {
    pub name: String,
    pub train: PathBuf,
    #[serde(default)]
    pub validation: Option<PathBuf>,
    #[serde(default)]
    pub test: Option<PathBuf>,
    #[serde(default = "yes")]
    pub disjoint: bool,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    /// Defaults to the data file's stem.
    #[serde(default)]
    pub name: Option<String>,
    pub data: PathBuf,
    #[serde(default)]
    pub label: LabelColumn,
    #[serde(default)]
    pub header: bool,
    #[serde(default = "comma")]
    pub delimiter: char,
    #[serde(default)]
    pub scaling: Scaling,
    pub splits: Vec<SplitFiles>,
}

fn comma() -> char {
    ','
}

/// A dataset with partitions attached and scaling fitted on its train rows.
#[derive(Clone, Debug, PartialEq)]
pub struct Prepared {
    pub dataset: Dataset,
    /// Map from raw features to the features the model sees.
    pub scaling: Option<ScalingStats>,
    pub class_names: Vec<String>,
}

impl Manifest {
    pub fn parse(text: &str, source: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| config_err!("{source}: {e}"))
    }

    pub fn schema(&self) -> CsvSchema {
        CsvSchema {
            label: self.label.clone(),
            header: self.header,
            delimiter: self.delimiter,
        }
    }

    /// Builds one dataset per split. `fetch` returns the text of a file
    /// named in the manifest. Datasets are named `name` for a single split
    /// and `name/split` otherwise.
    pub fn prepare(&self, fetch: &dyn Fn(&Path) -> Result<String>) -> Result<Vec<Prepared>> {
        if self.splits.is_empty() {
            return Err(config_err!("manifest for '{}' lists no splits", self.data.display()));
        }
        let source = self.data.display().to_string();
        let table = parse_table(fetch(&self.data)?.as_bytes(), &self.schema(), &source)?;
        let base = self.name.clone().unwrap_or_else(|| stem(&self.data));
        let k = table.class_names.len();
        let mut out = Vec::with_capacity(self.splits.len());
        for s in &self.splits {
            let indices = |p: &Option<PathBuf>| -> Result<Vec<usize>> {
                match p {
                    Some(p) => parse_indices(&fetch(p)?, &p.display().to_string()),
                    None => Ok(Vec::new()),
                }
            };
            let parts = Partitions {
                train: parse_indices(&fetch(&s.train)?, &s.train.display().to_string())?,
                validation: indices(&s.validation)?,
                test: indices(&s.test)?,
                disjoint: s.disjoint,
            };
            let name = if self.splits.len() == 1 {
                base.clone()
            } else {
                format!("{base}/{}", s.name)
            };
            let ds = Dataset::with_classes(name, table.x.clone(), table.labels.clone(), k)?
                .with_partitions(parts)
                .map_err(|e| config_err!("split '{}' of {source}: {e}", s.name))?;
            let (dataset, scaling) = match self.scaling.method() {
                Some(m) => {
                    let (d, st) = fit_apply_scaling(&ds, m)?;
                    (d, Some(st))
                }
                None => (ds, None),
            };
            out.push(Prepared {
                dataset,
                scaling,
                class_names: table.class_names.clone(),
            });
        }
        Ok(out)
    }
}

/// Reads a manifest from disk; paths inside resolve against its directory.
pub fn load_manifest(path: &Path) -> Result<Vec<Prepared>> {
    let manifest = Manifest::parse(&read_text(path)?, &path.display().to_string())?;
    let dir = path.parent().unwrap_or(Path::new(".")).to_path_buf();
    manifest.prepare(&|p: &Path| read_text(&dir.join(p)))
}
