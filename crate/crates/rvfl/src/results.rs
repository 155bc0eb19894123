//! The benchmark results table.
//!
//! Column order is part of the file format; append new columns at the end.
//! `train_time_ms` is the only column that varies between identical runs.

use std::fs;
use std::path::Path;

use rvfl_core::select::{EvalResult, HyperParams};
use serde::{Deserialize, Serialize};

use crate::error::{config_err, Error, Result};

pub const COLUMNS: [&str; 19] = [
    "dataset",
    "method",
    "status",
    "layers",
    "ae_widths",
    "clf_width",
    "c_ae",
    "c_clf",
    "sigma",
    "noise",
    "validation_accuracy",
    "test_accuracy",
    "test_accuracy_std",
    "auc",
    "hidden_nodes",
    "seeds",
    "converged",
    "train_time_ms",
    "error",
];

/// Columns excluded when comparing runs for reproducibility.
pub const TIME_COLUMNS: [&str; 1] = ["train_time_ms"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Failed,
}

/// One row; field order matches [`COLUMNS`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub dataset: String,
    pub method: String,
    pub status: Status,
    pub layers: Option<usize>,
    /// Encoder widths joined with `;`.
    pub ae_widths: String,
    pub clf_width: Option<usize>,
    pub c_ae: Option<f64>,
    pub c_clf: Option<f64>,
    pub sigma: Option<f64>,
    pub noise: Option<f64>,
    pub validation_accuracy: Option<f64>,
    pub test_accuracy: Option<f64>,
    pub test_accuracy_std: Option<f64>,
    pub auc: Option<f64>,
    pub hidden_nodes: Option<usize>,
    pub seeds: usize,
    pub converged: Option<bool>,
    pub train_time_ms: Option<f64>,
    pub error: String,
}

impl ResultRow {
    /// A row with the hyperparameter columns filled and no scores.
    pub fn new(dataset: &str, method: &str, status: Status, seeds: usize, p: Option<&HyperParams>) -> Self {
        let p = p.cloned().unwrap_or_default();
        ResultRow {
            dataset: dataset.into(),
            method: method.into(),
            status,
            layers: p.layers,
            ae_widths: p.ae_widths.iter().map(ToString::to_string).collect::<Vec<_>>().join(";"),
            clf_width: p.clf_width,
            c_ae: p.c_ae,
            c_clf: p.c_clf,
            sigma: p.sigma,
            noise: p.noise,
            validation_accuracy: None,
            test_accuracy: None,
            test_accuracy_std: None,
            auc: None,
            hidden_nodes: None,
            seeds,
            converged: None,
            train_time_ms: None,
            error: String::new(),
        }
    }

    pub fn from_eval(r: &EvalResult) -> Self {
        ResultRow {
            validation_accuracy: Some(r.validation_accuracy),
            test_accuracy: Some(r.test_accuracy),
            test_accuracy_std: Some(r.test_accuracy_std),
            auc: r.auc,
            hidden_nodes: Some(r.hidden_nodes),
            converged: Some(r.converged),
            train_time_ms: Some(r.train_time_ms),
            ..ResultRow::new(&r.dataset, &r.method, Status::Ok, r.seeds, Some(&r.params))
        }
    }

    pub fn failed(dataset: &str, method: &str, seeds: usize, error: &str) -> Self {
        ResultRow {
            // keep the table one line per row
            error: error.replace(['\n', '\r'], " "),
            ..ResultRow::new(dataset, method, Status::Failed, seeds, None)
        }
    }

    pub fn key(&self) -> (String, String) {
        (self.dataset.clone(), self.method.clone())
    }
}

pub fn to_csv(rows: &[ResultRow]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    let fail = |e: csv::Error| Error::Runtime(format!("writing results: {e}"));
    w.write_record(COLUMNS).map_err(fail)?;
    for r in rows {
        w.serialize(r).map_err(fail)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Runtime(format!("writing results: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Writes through a temporary file so readers never see a partial table.
pub fn write_rows(path: &Path, rows: &[ResultRow]) -> Result<()> {
    write_atomic(path, &to_csv(rows)?)
}

pub(crate) fn write_atomic(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, text).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

pub fn parse_rows(text: &str, source: &str) -> Result<Vec<ResultRow>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| config_err!("{source}: {e}"))?;
    if header.iter().ne(COLUMNS) {
        return Err(config_err!("{source}: header does not match the results format"));
    }
    rdr.deserialize()
        .enumerate()
        .map(|(i, r)| r.map_err(|e| config_err!("{source}: row {i}: {e}")))
        .collect()
}

pub fn read_rows(path: &Path) -> Result<Vec<ResultRow>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_rows(&text, &path.display().to_string())
}

/// The CSV text with time columns blanked, for reproducibility checks.
pub fn without_time_columns(text: &str) -> Result<String> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_reader(text.as_bytes());
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut drop = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| config_err!("results: {e}"))?;
        if i == 0 {
            drop = rec.iter().map(|c| TIME_COLUMNS.contains(&c)).collect();
        }
        let kept: Vec<&str> = rec.iter().zip(&drop).map(|(v, d)| if *d && i > 0 { "" } else { v }).collect();
        w.write_record(kept).map_err(|e| Error::Runtime(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Runtime(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("utf-8"))
}
