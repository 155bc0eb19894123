//! Trains one model per (dataset, method) pair and saves it.

use std::path::PathBuf;

use rvfl_core::data::Role;
use rvfl_core::model::fit;
use rvfl_core::select::{accuracy, auc, select, Clock, SelectionView};

use crate::config::RunConfig;
use crate::file_stem;
use crate::error::{config_err, Result};
use crate::model_file::ModelFile;
use crate::results::{read_rows, write_rows, ResultRow, Status};
use crate::runtime::{runner, WallClock};

pub const METRICS_FILE: &str = "train_metrics.csv";

#[derive(Clone, Debug, Default)]
pub struct TrainOptions {
    pub dataset: Option<String>,
    pub method: Option<String>,
    /// Defaults to the first configured seed.
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub parallel: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct Trained {
    pub model_path: PathBuf,
    pub row: ResultRow,
}

/// Fixed `params` are used as given; otherwise they are selected on the
/// validation rows. The metrics row is appended to `train_metrics.csv`.
pub fn run_train(cfg: &RunConfig, opts: &TrainOptions) -> Result<Vec<Trained>> {
    let out = opts.out.clone().unwrap_or_else(|| cfg.out.clone());
    let seed = opts.seed.unwrap_or(cfg.seeds[0]);
    let datasets: Vec<_> = cfg
        .load_datasets()?
        .into_iter()
        .filter(|p| opts.dataset.as_deref().is_none_or(|d| d == p.dataset.name()))
        .collect();
    let methods: Vec<_> = cfg
        .resolve_methods()?
        .into_iter()
        .filter(|m| opts.method.as_deref().is_none_or(|n| n == m.method.name))
        .collect();
    if datasets.is_empty() {
        return Err(config_err!("no dataset named '{}' in the config", opts.dataset.as_deref().unwrap_or("")));
    }
    if methods.is_empty() {
        return Err(config_err!("no method named '{}' in the config", opts.method.as_deref().unwrap_or("")));
    }
    let pool = runner(opts.parallel.unwrap_or(cfg.parallel))?;
    let clock = WallClock::default();
    let metrics_path = out.join(METRICS_FILE);
    let mut log = if metrics_path.exists() { read_rows(&metrics_path)? } else { Vec::new() };
    let mut trained = Vec::new();
    for p in &datasets {
        let ds = &p.dataset;
        for rm in &methods {
            let (params, val_acc) = match &rm.params {
                Some(hp) => (hp.clone(), None),
                None => {
                    let sel = select(&SelectionView::new(ds)?, &rm.method, &rm.grid, seed, pool.as_ref())?;
                    (sel.params, Some(sel.validation_accuracy))
                }
            };
            let train = if rm.grid.retrain_on_train_val {
                let parts = ds.partitions();
                ds.rows(&parts.train.iter().chain(&parts.validation).copied().collect::<Vec<_>>())
            } else {
                ds.split(Role::Train)
            };
            let spec = rm.method.build(&params, seed, &rm.grid.solver)?;
            let t0 = clock.now_ms();
            let model = fit(&spec, &train.x, &train.y)?;
            let elapsed = clock.now_ms() - t0;

            let score = |role| -> Result<Option<(f64, Option<f64>)>> {
                let s = ds.split(role);
                if s.is_empty() {
                    return Ok(None);
                }
                let pred = model.predict(&s.x)?;
                let a = accuracy(&s.labels, &pred.labels)?;
                let u = (ds.n_classes() == 2).then(|| auc(&pred.scores.col(1), &s.labels).ok()).flatten();
                Ok(Some((a, u)))
            };
            let validation = match val_acc {
                Some(v) => Some(v),
                None => score(Role::Validation)?.map(|s| s.0),
            };
            let test = score(Role::Test)?;
            let row = ResultRow {
                validation_accuracy: validation,
                test_accuracy: test.map(|t| t.0),
                test_accuracy_std: test.map(|_| 0.0),
                auc: test.and_then(|t| t.1),
                hidden_nodes: Some(model.hidden_nodes()),
                converged: Some(model.converged()),
                train_time_ms: Some(elapsed),
                ..ResultRow::new(ds.name(), &rm.method.name, Status::Ok, 1, Some(&params))
            };

            let path = out
                .join("models")
                .join(format!("{}__{}.json", file_stem(ds.name()), file_stem(&rm.method.name)));
            ModelFile::new(ds.name(), rm.method.clone(), params, seed, p.scaling.clone(), p.class_names.clone(), model)
                .save(&path)?;
            log.push(row.clone());
            write_rows(&metrics_path, &log)?;
            trained.push(Trained { model_path: path, row });
        }
    }
    Ok(trained)
}
