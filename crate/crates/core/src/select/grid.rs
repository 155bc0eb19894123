//! Hyperparameter grids.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::method::{Architecture, ClassifierKind, Method};
use crate::error::{bail, Result};
use crate::numerics::Activation;

/// How the grid is walked by the search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchPolicy {
    /// All axes except the classifier width with the width pinned, then the
    /// classifier width and C with everything else fixed at the winner.
    #[default]
    StageWise,
    /// Full cartesian product.
    Full,
}

/// Solver knobs that are not searched.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSettings {
    pub activation: Activation,
    /// l1 share of the elastic-net penalty.
    pub alpha_mix: f64,
    pub l1_max_iters: usize,
    pub admm_max_iters: usize,
    pub rescale: bool,
    pub corrupt_all_layers: bool,
    pub kernel_row_cap: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            activation: Activation::Sigmoid,
            alpha_mix: 0.5,
            l1_max_iters: 500,
            admm_max_iters: 1000,
            rescale: true,
            corrupt_all_layers: true,
            kernel_row_cap: crate::deep::DEFAULT_KERNEL_ROW_CAP,
        }
    }
}

fn exp_grid() -> Vec<f64> {
    [-7, -5, -3, -1, 1, 3, 5, 7].iter().map(|&e| libm::pow(10.0, e as f64)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub ae_widths: Vec<usize>,
    pub clf_widths: Vec<usize>,
    pub c_values: Vec<f64>,
    pub sigma_values: Vec<f64>,
    pub noise_values: Vec<f64>,
    /// Encoder layer counts.
    pub layers: Vec<usize>,
    pub policy: SearchPolicy,
    /// Classifier width during the first stage of the stage-wise policy.
    pub stage_clf_width: usize,
    /// Same width for every encoder layer.
    pub tie_ae_widths: bool,
    /// Refit on train + validation before scoring the test rows.
    pub retrain_on_train_val: bool,
    pub solver: SolverSettings,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            ae_widths: (1..=20).map(|i| 10 * i).collect(),
            clf_widths: (1..=20).map(|i| 100 * i).collect(),
            c_values: exp_grid(),
            sigma_values: exp_grid(),
            noise_values: vec![0.05, 0.1, 0.15, 0.3, 0.5, 0.75],
            layers: vec![2],
            policy: SearchPolicy::StageWise,
            stage_clf_width: 500,
            tie_ae_widths: true,
            retrain_on_train_val: false,
            solver: SolverSettings::default(),
        }
    }
}

/// One grid point. Axes a method does not use stay `None` / empty.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HyperParams {
    #[serde(default)]
    pub layers: Option<usize>,
    #[serde(default)]
    pub ae_widths: Vec<usize>,
    #[serde(default)]
    pub clf_width: Option<usize>,
    #[serde(default)]
    pub c_ae: Option<f64>,
    #[serde(default)]
    pub c_clf: Option<f64>,
    #[serde(default)]
    pub sigma: Option<f64>,
    #[serde(default)]
    pub noise: Option<f64>,
}

impl HyperParams {
    /// Σ random encoder widths + random classifier width.
    pub fn hidden_nodes(&self, method: &Method) -> usize {
        let clf = self.clf_width.unwrap_or(0);
        match method.arch {
            Architecture::Shallow { classifier } => {
                if classifier == ClassifierKind::Kelm {
                    0
                } else {
                    clf
                }
            }
            Architecture::Stack { classifier, .. } => {
                let enc: usize = self.ae_widths.iter().sum();
                enc + if classifier == ClassifierKind::Kelm { 0 } else { clf }
            }
            Architecture::KernelStack => 0,
        }
    }
}

impl GridSpec {
    pub fn validate_for(&self, method: &Method) -> Result<()> {
        let ax = method.axes();
        let checks = [
            (ax.layers, self.layers.is_empty(), "layers"),
            (ax.ae_width, self.ae_widths.is_empty(), "ae_widths"),
            (ax.c_ae || ax.c_clf, self.c_values.is_empty(), "c_values"),
            (ax.noise, self.noise_values.is_empty(), "noise_values"),
            (ax.sigma, self.sigma_values.is_empty(), "sigma_values"),
            (ax.clf_width, self.clf_widths.is_empty(), "clf_widths"),
        ];
        for (used, empty, name) in checks {
            if used && empty {
                bail!(Argument, "grid axis `{name}` is empty but {method} uses it");
            }
        }
        if ax.layers && self.layers.contains(&0) {
            bail!(Argument, "layer counts must be at least 1");
        }
        if self.c_values.iter().chain(&self.sigma_values).any(|v| !(*v > 0.0) || !v.is_finite()) {
            bail!(Argument, "C and sigma grid values must be positive and finite");
        }
        Ok(())
    }
}

fn widths_for_depth(spec: &GridSpec, depth: usize) -> Vec<Vec<usize>> {
    if spec.tie_ae_widths {
        return spec.ae_widths.iter().map(|&w| vec![w; depth]).collect();
    }
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..depth {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                spec.ae_widths.iter().map(move |&w| {
                    let mut p = prefix.clone();
                    p.push(w);
                    p
                })
            })
            .collect();
    }
    out
}

fn opt<T: Copy>(used: bool, values: &[T]) -> Vec<Option<T>> {
    if used {
        values.iter().map(|&v| Some(v)).collect()
    } else {
        vec![None]
    }
}

fn product(spec: &GridSpec, method: &Method, clf_widths: &[usize]) -> Vec<HyperParams> {
    let ax = method.axes();
    let mut out = Vec::new();
    for layers in opt(ax.layers, &spec.layers) {
        let width_sets = if ax.ae_width {
            widths_for_depth(spec, layers.unwrap_or(1))
        } else {
            vec![Vec::new()]
        };
        for ae_widths in &width_sets {
            for c_ae in opt(ax.c_ae, &spec.c_values) {
                for noise in opt(ax.noise, &spec.noise_values) {
                    for sigma in opt(ax.sigma, &spec.sigma_values) {
                        for clf_width in opt(ax.clf_width, clf_widths) {
                            for c_clf in opt(ax.c_clf, &spec.c_values) {
                                out.push(HyperParams {
                                    layers,
                                    ae_widths: ae_widths.clone(),
                                    clf_width,
                                    c_ae,
                                    c_clf,
                                    sigma,
                                    noise,
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Cartesian product over the axes `method` uses, classifier axes innermost.
pub fn expand_grid(spec: &GridSpec, method: &Method) -> Result<Vec<HyperParams>> {
    spec.validate_for(method)?;
    Ok(product(spec, method, &spec.clf_widths))
}

/// First stage of the stage-wise policy: classifier width pinned.
pub fn first_stage(spec: &GridSpec, method: &Method) -> Result<Vec<HyperParams>> {
    spec.validate_for(method)?;
    if !method.axes().clf_width {
        return expand_grid(spec, method);
    }
    Ok(product(spec, method, &[spec.stage_clf_width]))
}

/// Second stage: classifier width × C around the first-stage winner.
pub fn second_stage(spec: &GridSpec, method: &Method, best: &HyperParams) -> Vec<HyperParams> {
    if !method.axes().clf_width {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(spec.clf_widths.len() * spec.c_values.len());
    for &w in &spec.clf_widths {
        for &c in &spec.c_values {
            out.push(HyperParams {
                clf_width: Some(w),
                c_clf: Some(c),
                ..best.clone()
            });
        }
    }
    out
}
