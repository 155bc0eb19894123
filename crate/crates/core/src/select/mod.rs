//! Hyperparameter grids, method presets, grid search and metrics.

pub mod grid;
pub mod method;
pub mod metrics;
pub mod search;

pub use grid::{expand_grid, GridSpec, HyperParams, SearchPolicy, SolverSettings};
pub use method::{Architecture, ClassifierKind, Method, NoiseKind, RegKind};
pub use metrics::{accuracy, auc};
pub use search::{
    evaluate, grid_search, score_point, select, CellFn, CellRunner, CellScore, Clock, EvalResult, NoClock,
    Selection, SelectionView, Sequential,
};
