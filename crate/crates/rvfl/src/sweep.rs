//! One-at-a-time and grid sensitivity sweeps around a base configuration.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;
use rvfl_core::data::{Dataset, Role};
use rvfl_core::model::fit;
use rvfl_core::select::{accuracy, select, HyperParams, SelectionView};

use crate::config::{ResolvedMethod, RunConfig};
use crate::error::{config_err, Error, Result};
use crate::file_stem;
use crate::runtime::runner;

/// Swept hyperparameter. `N` is the encoder width for stacked methods and
/// the classifier width otherwise; `C` sets every C the method uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Axis {
    Layers,
    Width,
    C,
    Noise,
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "L" => Ok(Axis::Layers),
            "N" => Ok(Axis::Width),
            "C" => Ok(Axis::C),
            "nu" => Ok(Axis::Noise),
            other => Err(config_err!("unknown sweep axis '{other}' (use L, N, C or nu)")),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::Layers => "L",
            Axis::Width => "N",
            Axis::C => "C",
            Axis::Noise => "nu",
        })
    }
}

#[derive(Clone, Debug)]
pub struct SweepOptions {
    pub dataset: String,
    pub method: String,
    pub axes: Vec<Axis>,
    pub out: Option<PathBuf>,
    pub parallel: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    /// One value per axis, in [`SweepTable::axes`] order.
    pub values: Vec<f64>,
    pub validation_accuracy: Option<f64>,
    pub test_accuracy: f64,
    pub test_accuracy_std: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepTable {
    pub base: HyperParams,
    pub axes: Vec<Axis>,
    pub points: Vec<SweepPoint>,
}

fn axis_values(rm: &ResolvedMethod, axis: Axis) -> Result<Vec<f64>> {
    let ax = rm.method.axes();
    let g = &rm.grid;
    let (used, values): (bool, Vec<f64>) = match axis {
        Axis::Layers => (ax.layers, g.layers.iter().map(|&v| v as f64).collect()),
        Axis::Width if ax.ae_width => (true, g.ae_widths.iter().map(|&v| v as f64).collect()),
        Axis::Width => (ax.clf_width, g.clf_widths.iter().map(|&v| v as f64).collect()),
        Axis::C => (ax.c_ae || ax.c_clf, g.c_values.clone()),
        Axis::Noise => (ax.noise, g.noise_values.clone()),
    };
    if !used {
        return Err(config_err!("{} has no '{axis}' hyperparameter", rm.method.name));
    }
    if values.is_empty() {
        return Err(config_err!("grid has no values for axis '{axis}'"));
    }
    Ok(values)
}

fn apply(rm: &ResolvedMethod, base: &HyperParams, axes: &[Axis], values: &[f64]) -> HyperParams {
    let ax = rm.method.axes();
    let mut hp = base.clone();
    let mut pairs: Vec<(Axis, f64)> = axes.iter().copied().zip(values.iter().copied()).collect();
    // depth first so a width applies to every layer
    pairs.sort_by_key(|p| p.0);
    for (axis, v) in pairs {
        match axis {
            Axis::Layers => {
                let l = v as usize;
                let w = hp.ae_widths.first().copied().unwrap_or(0);
                hp.layers = Some(l);
                hp.ae_widths.resize(l, w);
            }
            Axis::Width if ax.ae_width => hp.ae_widths.iter_mut().for_each(|w| *w = v as usize),
            Axis::Width => hp.clf_width = Some(v as usize),
            Axis::C => {
                if ax.c_ae {
                    hp.c_ae = Some(v);
                }
                if ax.c_clf {
                    hp.c_clf = Some(v);
                }
            }
            Axis::Noise => hp.noise = Some(v),
        }
    }
    hp
}

fn score(ds: &Dataset, rm: &ResolvedMethod, hp: &HyperParams, seeds: &[u64]) -> Result<(Option<f64>, f64, f64)> {
    let train = ds.split(Role::Train);
    let val = ds.split(Role::Validation);
    let test = ds.split(Role::Test);
    if test.is_empty() {
        return Err(config_err!("dataset '{}' has no test rows", ds.name()));
    }
    let (mut va, mut te) = (Vec::new(), Vec::new());
    for &seed in seeds {
        let model = fit(&rm.method.build(hp, seed, &rm.grid.solver)?, &train.x, &train.y)?;
        if !val.is_empty() {
            va.push(accuracy(&val.labels, &model.predict(&val.x)?.labels)?);
        }
        te.push(accuracy(&test.labels, &model.predict(&test.x)?.labels)?);
    }
    let n = te.len() as f64;
    let mean = te.iter().sum::<f64>() / n;
    let std = (te.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / n).sqrt();
    let val_mean = (!va.is_empty()).then(|| va.iter().sum::<f64>() / va.len() as f64);
    Ok((val_mean, mean, std))
}

/// Cartesian product of the grid values on `axes`, every other
/// hyperparameter held at the method's fixed `params` or, failing that,
/// at the validation-selected point.
pub fn run_sweep(cfg: &RunConfig, opts: &SweepOptions) -> Result<SweepTable> {
    if opts.axes.is_empty() {
        return Err(config_err!("at least one sweep axis is required"));
    }
    let mut axes = opts.axes.clone();
    axes.dedup();
    let prepared = cfg.load_datasets()?;
    let ds = &prepared
        .iter()
        .find(|p| p.dataset.name() == opts.dataset)
        .ok_or_else(|| config_err!("no dataset named '{}' in the config", opts.dataset))?
        .dataset;
    let rm = cfg
        .resolve_methods()?
        .into_iter()
        .find(|m| m.method.name == opts.method)
        .ok_or_else(|| config_err!("no method named '{}' in the config", opts.method))?;
    let values: Vec<Vec<f64>> = axes.iter().map(|&a| axis_values(&rm, a)).collect::<Result<_>>()?;

    let threads = opts.parallel.unwrap_or(cfg.parallel);
    let base = match &rm.params {
        Some(p) => p.clone(),
        None => select(&SelectionView::new(ds)?, &rm.method, &rm.grid, cfg.seeds[0], runner(threads)?.as_ref())?.params,
    };
    let mut grid: Vec<Vec<f64>> = vec![Vec::new()];
    for vs in &values {
        grid = grid
            .into_iter()
            .flat_map(|prefix| {
                vs.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Runtime(format!("thread pool: {e}")))?;
    let points = pool.install(|| {
        grid.par_iter()
            .map(|v| {
                let (val, mean, std) = score(ds, &rm, &apply(&rm, &base, &axes, v), &cfg.seeds)?;
                Ok(SweepPoint {
                    values: v.clone(),
                    validation_accuracy: val,
                    test_accuracy: mean,
                    test_accuracy_std: std,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(SweepTable { base, axes, points })
}

impl SweepTable {
    /// Long format: one column per axis, then the scores.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let fail = |e: csv::Error| Error::Runtime(format!("writing sweep: {e}"));
        let mut header: Vec<String> = self.axes.iter().map(ToString::to_string).collect();
        header.extend(["validation_accuracy", "test_accuracy", "test_accuracy_std"].map(String::from));
        w.write_record(&header).map_err(fail)?;
        for p in &self.points {
            let mut rec: Vec<String> = p.values.iter().map(ToString::to_string).collect();
            rec.push(p.validation_accuracy.map_or_else(String::new, |v| v.to_string()));
            rec.push(p.test_accuracy.to_string());
            rec.push(p.test_accuracy_std.to_string());
            w.write_record(&rec).map_err(fail)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Runtime(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("utf-8"))
    }

    pub fn file_name(dataset: &str, method: &str, axes: &[Axis]) -> String {
        let axes: Vec<String> = axes.iter().map(ToString::to_string).collect();
        format!("sweep__{}__{}__{}.csv", file_stem(dataset), file_stem(method), axes.join("-"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axes_parse() {
        let a: Vec<Axis> = "C,N".split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(a, vec![Axis::C, Axis::Width]);
        assert!("sigma".parse::<Axis>().is_err());
    }
}
