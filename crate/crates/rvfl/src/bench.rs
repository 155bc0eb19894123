//! Benchmark driver: every method on every dataset, resumable.
//!
//! Progress lives in two files under the output directory. `results.csv`
//! holds finished rows in (dataset, method) order and `run_manifest.json`
//! records the config fingerprint and which cells are done. Both are
//! replaced atomically after each cell, results first, so an interrupted
//! run loses at most the cell in flight. A row whose cell is missing from
//! the manifest is recomputed on resume.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use rvfl_core::select::grid_search;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{config_err, Error, Result};
use crate::results::{read_rows, write_atomic, write_rows, ResultRow};
use crate::runtime::{runner, WallClock};

pub const RESULTS_FILE: &str = "results.csv";
pub const MANIFEST_FILE: &str = "run_manifest.json";

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub config_hash: String,
    /// `[dataset, method]` pairs with a row in the results table.
    pub completed: Vec<(String, String)>,
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| config_err!("{}: {e}", path.display()))
    }

    fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        write_atomic(path, &(text + "\n"))
    }
}

#[derive(Clone, Debug, Default)]
pub struct BenchOptions {
    pub out: Option<PathBuf>,
    pub resume: bool,
    pub parallel: Option<usize>,
    /// Stop after this many newly finished cells, as if interrupted.
    pub stop_after: Option<usize>,
    pub quiet: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchSummary {
    pub results: PathBuf,
    pub ran: usize,
    pub skipped: usize,
    pub failed: usize,
    /// False when `stop_after` cut the run short.
    pub finished: bool,
}

pub fn run_bench(cfg: &RunConfig, opts: &BenchOptions) -> Result<BenchSummary> {
    let out = opts.out.clone().unwrap_or_else(|| cfg.out.clone());
    let results_path = out.join(RESULTS_FILE);
    let manifest_path = out.join(MANIFEST_FILE);
    let hash = cfg.fingerprint();

    let mut manifest = RunManifest {
        config_hash: hash.clone(),
        completed: Vec::new(),
    };
    let mut rows: Vec<ResultRow> = Vec::new();
    if opts.resume && manifest_path.exists() {
        let prev = RunManifest::load(&manifest_path)?;
        if prev.config_hash != hash {
            return Err(config_err!(
                "{} was written by a different configuration; rerun without --resume",
                manifest_path.display()
            ));
        }
        let done: BTreeSet<_> = prev.completed.iter().cloned().collect();
        if results_path.exists() {
            rows = read_rows(&results_path)?.into_iter().filter(|r| done.contains(&r.key())).collect();
        }
        let have: BTreeSet<_> = rows.iter().map(ResultRow::key).collect();
        manifest.completed = prev.completed.into_iter().filter(|k| have.contains(k)).collect();
    }

    let datasets = cfg.load_datasets()?;
    let methods = cfg.resolve_methods()?;
    let cells: Vec<(usize, usize)> = (0..datasets.len())
        .flat_map(|d| (0..methods.len()).map(move |m| (d, m)))
        .collect();
    let done: BTreeSet<_> = manifest.completed.iter().cloned().collect();
    let pool = runner(opts.parallel.unwrap_or(cfg.parallel))?;
    let clock = WallClock::default();

    let order = |r: &ResultRow| {
        cells
            .iter()
            .position(|&(d, m)| datasets[d].dataset.name() == r.dataset && methods[m].method.name == r.method)
            .unwrap_or(usize::MAX)
    };
    let mut summary = BenchSummary {
        results: results_path.clone(),
        ran: 0,
        skipped: 0,
        failed: 0,
        finished: true,
    };
    write_rows(&results_path, &rows)?;
    manifest.save(&manifest_path)?;
    for (i, &(d, m)) in cells.iter().enumerate() {
        let ds = &datasets[d].dataset;
        let rm = &methods[m];
        let key = (ds.name().to_string(), rm.method.name.clone());
        if done.contains(&key) {
            summary.skipped += 1;
            continue;
        }
        if opts.stop_after.is_some_and(|n| summary.ran >= n) {
            summary.finished = false;
            break;
        }
        let row = match grid_search(ds, &rm.method, &rm.grid, &cfg.seeds, pool.as_ref(), &clock) {
            Ok(r) => ResultRow::from_eval(&r),
            Err(e) => {
                summary.failed += 1;
                ResultRow::failed(&key.0, &key.1, cfg.seeds.len(), &e.to_string())
            }
        };
        if !opts.quiet {
            let score = row.test_accuracy.map_or_else(|| format!("failed: {}", row.error), |a| format!("{a:.4}"));
            eprintln!("[{}/{}] {} / {}: {score}", i + 1, cells.len(), key.0, key.1);
        }
        rows.push(row);
        rows.sort_by_key(|r| order(r));
        write_rows(&results_path, &rows)?;
        manifest.completed.push(key);
        manifest.save(&manifest_path)?;
        summary.ran += 1;
    }
    Ok(summary)
}
