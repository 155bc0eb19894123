//! Validation-driven grid search and test evaluation.
//!
//! Selection runs on a [`SelectionView`], which copies only the train and
//! validation rows out of a dataset. Test rows are read by [`evaluate`] once
//! the hyperparameters are fixed.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::grid::{expand_grid, first_stage, second_stage, GridSpec, HyperParams, SearchPolicy, SolverSettings};
use super::method::Method;
use super::metrics::{accuracy, auc};
use crate::data::{Dataset, Role, Split};
use crate::error::{bail, Result};
use crate::model::{fit, Model};

/// Millisecond wall clock supplied by the host.
pub trait Clock {
    fn now_ms(&self) -> f64;
}

/// Clock that always reads zero, for hosts without a timer.
pub struct NoClock;

impl Clock for NoClock {
    fn now_ms(&self) -> f64 {
        0.0
    }
}

/// Validation outcome of one grid cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CellScore {
    pub correct: usize,
    pub total: usize,
    pub hidden_nodes: usize,
}

impl CellScore {
    pub fn accuracy(&self) -> f64 {
        self.correct as f64 / self.total as f64
    }
}

pub type CellFn<'a> = dyn Fn(usize) -> Result<CellScore> + Sync + 'a;

/// Evaluates cells `0..n`; results must come back in index order.
pub trait CellRunner {
    fn map(&self, n: usize, f: &CellFn<'_>) -> Vec<Result<CellScore>>;
}

pub struct Sequential;

impl CellRunner for Sequential {
    fn map(&self, n: usize, f: &CellFn<'_>) -> Vec<Result<CellScore>> {
        (0..n).map(f).collect()
    }
}

/// Train and validation rows of a dataset; the test rows are not copied.
#[derive(Clone, Debug)]
pub struct SelectionView {
    pub train: Split,
    pub validation: Split,
}

impl SelectionView {
    pub fn new(ds: &Dataset) -> Result<Self> {
        let validation = ds.split(Role::Validation);
        if validation.is_empty() {
            bail!(Argument, "dataset '{}' has no validation rows to select on", ds.name());
        }
        Ok(SelectionView {
            train: ds.split(Role::Train),
            validation,
        })
    }
}

/// Trains on `train` and scores `eval`.
pub fn score_point(
    train: &Split,
    eval: &Split,
    method: &Method,
    hp: &HyperParams,
    seed: u64,
    settings: &SolverSettings,
) -> Result<(CellScore, Model)> {
    let spec = method.build(hp, seed, settings)?;
    let model = fit(&spec, &train.x, &train.y)?;
    let pred = model.predict(&eval.x)?;
    let correct = pred.labels.iter().zip(&eval.labels).filter(|(a, b)| a == b).count();
    Ok((
        CellScore {
            correct,
            total: eval.len(),
            hidden_nodes: model.hidden_nodes(),
        },
        model,
    ))
}

/// Outcome of the selection phase.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub params: HyperParams,
    pub validation_accuracy: f64,
    pub hidden_nodes: usize,
    /// Grid cells trained.
    pub cells: usize,
}

fn best_of(
    view: &SelectionView,
    method: &Method,
    grid: &[HyperParams],
    seed: u64,
    settings: &SolverSettings,
    runner: &dyn CellRunner,
) -> Result<(usize, CellScore)> {
    let f = |i: usize| score_point(&view.train, &view.validation, method, &grid[i], seed, settings).map(|r| r.0);
    let scores = runner.map(grid.len(), &f);
    let mut best: Option<(usize, CellScore)> = None;
    for (i, s) in scores.into_iter().enumerate() {
        let s = s?;
        // more correct wins, then fewer hidden nodes, then earlier cell
        let better = match &best {
            None => true,
            Some((_, b)) => {
                s.correct > b.correct || (s.correct == b.correct && s.hidden_nodes < b.hidden_nodes)
            }
        };
        if better {
            best = Some((i, s));
        }
    }
    best.ok_or_else(|| crate::Error::Argument("empty hyperparameter grid".into()))
}

/// Picks the hyperparameters with the best validation accuracy.
pub fn select(
    view: &SelectionView,
    method: &Method,
    spec: &GridSpec,
    seed: u64,
    runner: &dyn CellRunner,
) -> Result<Selection> {
    let stage_wise = spec.policy == SearchPolicy::StageWise;
    let first = if stage_wise {
        first_stage(spec, method)?
    } else {
        expand_grid(spec, method)?
    };
    let (i, s) = best_of(view, method, &first, seed, &spec.solver, runner)?;
    let mut cells = first.len();
    let mut winner = (first[i].clone(), s);
    if stage_wise {
        let mut second = second_stage(spec, method, &winner.0);
        if !second.is_empty() {
            cells += second.len();
            second.insert(0, winner.0.clone());
            // the first-stage winner is re-scored as cell 0 so it competes
            let (j, s2) = best_of(view, method, &second, seed, &spec.solver, runner)?;
            winner = (second.swap_remove(j), s2);
        }
    }
    Ok(Selection {
        validation_accuracy: winner.1.accuracy(),
        hidden_nodes: winner.1.hidden_nodes,
        params: winner.0,
        cells,
    })
}

/// One row of benchmark output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub dataset: String,
    pub method: String,
    pub params: HyperParams,
    pub validation_accuracy: f64,
    /// Mean over seeds.
    pub test_accuracy: f64,
    pub test_accuracy_std: f64,
    /// Mean over seeds; binary problems only.
    pub auc: Option<f64>,
    pub hidden_nodes: usize,
    /// Mean wall-clock training time per seed.
    pub train_time_ms: f64,
    pub seeds: usize,
    pub converged: bool,
}

/// Refits the selected configuration per seed and scores the test rows.
pub fn evaluate(
    ds: &Dataset,
    method: &Method,
    spec: &GridSpec,
    selection: &Selection,
    seeds: &[u64],
    clock: &dyn Clock,
) -> Result<EvalResult> {
    if seeds.is_empty() {
        bail!(Argument, "at least one seed is required");
    }
    let test = ds.split(Role::Test);
    if test.is_empty() {
        bail!(Argument, "dataset '{}' has no test rows", ds.name());
    }
    let train = if spec.retrain_on_train_val {
        let p = ds.partitions();
        let idx: Vec<usize> = p.train.iter().chain(&p.validation).copied().collect();
        ds.rows(&idx)
    } else {
        ds.split(Role::Train)
    };
    let binary = ds.n_classes() == 2;
    let mut accs = Vec::with_capacity(seeds.len());
    let mut aucs = Vec::with_capacity(seeds.len());
    let mut time = 0.0;
    let mut hidden = 0;
    let mut converged = true;
    for &seed in seeds {
        let mspec = method.build(&selection.params, seed, &spec.solver)?;
        let t0 = clock.now_ms();
        let model = fit(&mspec, &train.x, &train.y)?;
        time += clock.now_ms() - t0;
        hidden = model.hidden_nodes();
        converged &= model.converged();
        let pred = model.predict(&test.x)?;
        accs.push(accuracy(&test.labels, &pred.labels)?);
        if binary {
            // undefined when the test rows hold a single class
            if let Ok(a) = auc(&pred.scores.col(1), &test.labels) {
                aucs.push(a);
            }
        }
    }
    let n = seeds.len() as f64;
    let mean = accs.iter().sum::<f64>() / n;
    let var = accs.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / n;
    Ok(EvalResult {
        dataset: ds.name().into(),
        method: method.name.clone(),
        params: selection.params.clone(),
        validation_accuracy: selection.validation_accuracy,
        test_accuracy: mean,
        test_accuracy_std: libm::sqrt(var),
        auc: (binary && aucs.len() == seeds.len()).then(|| aucs.iter().sum::<f64>() / n),
        hidden_nodes: hidden,
        train_time_ms: time / n,
        seeds: seeds.len(),
        converged,
    })
}

/// Selection on `seeds[0]`, then test evaluation averaged over `seeds`.
pub fn grid_search(
    ds: &Dataset,
    method: &Method,
    spec: &GridSpec,
    seeds: &[u64],
    runner: &dyn CellRunner,
    clock: &dyn Clock,
) -> Result<EvalResult> {
    let Some(&first) = seeds.first() else {
        bail!(Argument, "at least one seed is required");
    };
    let view = SelectionView::new(ds)?;
    let selection = select(&view, method, spec, first, runner)?;
    evaluate(ds, method, spec, &selection, seeds, clock)
}
