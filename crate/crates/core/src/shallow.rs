//! Single-hidden-layer randomized classifiers: RVFL, ELM and kernel ELM.
//!
//! RVFL and ELM share one training path. The hidden layer `H = a(XW + b)` is
//! drawn once and never trained; only the output weights are solved in
//! closed form. RVFL feeds `D = [H, X, 1]` to the output layer (direct links
//! plus an output bias realised as a constant column), ELM feeds `D = H`.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};
use crate::numerics::{concat_cols, seeded_uniform, Activation, Matrix, RngState};
use crate::solvers::{kernel_matrix, krr_fit, ridge, KernelSpec, RidgeConfig, SolveMode};

/// Range for the random hidden weights and biases.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitRange {
    pub lo: f64,
    pub hi: f64,
}

impl Default for InitRange {
    fn default() -> Self {
        InitRange { lo: -1.0, hi: 1.0 }
    }
}

/// Fixed random hidden layer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomLayer {
    /// input_dim × hidden
    pub weights: Matrix,
    pub bias: Vec<f64>,
    pub activation: Activation,
}

impl RandomLayer {
    /// Draws weights then biases from `rng`, both on `init`.
    pub fn generate(
        input_dim: usize,
        hidden: usize,
        activation: Activation,
        init: InitRange,
        rng: &mut RngState,
    ) -> Result<Self> {
        if hidden == 0 {
            bail!(Argument, "hidden layer width must be at least 1");
        }
        let weights = seeded_uniform(input_dim, hidden, init.lo, init.hi, rng)?;
        let bias = seeded_uniform(1, hidden, init.lo, init.hi, rng)?.into_vec();
        Ok(RandomLayer {
            weights,
            bias,
            activation,
        })
    }

    pub fn width(&self) -> usize {
        self.weights.cols()
    }

    pub fn input_dim(&self) -> usize {
        self.weights.rows()
    }

    /// `a(XW + b)`
    pub fn forward(&self, x: &Matrix) -> Result<Matrix> {
        let mut h = x.matmul(&self.weights)?;
        h.add_row_vector(&self.bias)?;
        self.activation.apply_inplace(&mut h);
        Ok(h)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShallowKind {
    Rvfl,
    Elm,
    Kelm,
}

/// Hyperparameters of an RVFL/ELM network.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomNetConfig {
    pub hidden: usize,
    pub lambda: f64,
    #[serde(default)]
    pub activation: Activation,
    #[serde(default)]
    pub init: InitRange,
    pub direct_links: bool,
    pub output_bias: bool,
    #[serde(default)]
    pub mode: SolveMode,
}

impl RandomNetConfig {
    pub fn rvfl(hidden: usize, lambda: f64) -> Self {
        RandomNetConfig {
            hidden,
            lambda,
            activation: Activation::default(),
            init: InitRange::default(),
            direct_links: true,
            output_bias: true,
            mode: SolveMode::Auto,
        }
    }

    pub fn elm(hidden: usize, lambda: f64) -> Self {
        RandomNetConfig::rvfl(hidden, lambda).ablate_direct_links()
    }

    /// Removes the input-to-output path: the direct links and the output bias.
    pub fn ablate_direct_links(mut self) -> Self {
        self.direct_links = false;
        self.output_bias = false;
        self
    }

    pub fn kind(&self) -> ShallowKind {
        if self.direct_links {
            ShallowKind::Rvfl
        } else {
            ShallowKind::Elm
        }
    }
}

/// A trained single-hidden-layer classifier.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShallowModel {
    pub kind: ShallowKind,
    pub input_dim: usize,
    pub n_outputs: usize,
    /// Absent for kernel ELM.
    pub layer: Option<RandomLayer>,
    pub direct_links: bool,
    /// β (hidden [+ input_dim]) × outputs, or α (n_train × outputs) for kernel ELM.
    pub output: Matrix,
    pub output_bias: Option<Vec<f64>>,
    pub kernel: Option<KernelSpec>,
    /// Training inputs kept for kernel evaluation.
    pub support: Option<Matrix>,
}

/// Class scores and argmax labels.
#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub scores: Matrix,
    pub labels: Vec<usize>,
}

impl Prediction {
    pub fn from_scores(scores: Matrix) -> Self {
        let labels = scores.argmax_rows();
        Prediction { scores, labels }
    }
}

fn check_training(x: &Matrix, y: &Matrix) -> Result<()> {
    if x.rows() == 0 {
        bail!(Argument, "training set is empty");
    }
    if x.rows() != y.rows() {
        bail!(Shape, "{} input rows but {} target rows", x.rows(), y.rows());
    }
    Ok(())
}

/// Trains an RVFL or ELM network; which one depends on `cfg.direct_links`.
pub fn train_random_net(
    x: &Matrix,
    y: &Matrix,
    cfg: &RandomNetConfig,
    rng: &mut RngState,
) -> Result<ShallowModel> {
    check_training(x, y)?;
    if cfg.lambda < 0.0 || !cfg.lambda.is_finite() {
        bail!(Argument, "lambda must be non-negative, got {}", cfg.lambda);
    }
    let layer = RandomLayer::generate(x.cols(), cfg.hidden, cfg.activation, cfg.init, rng)?;
    let d = design(&layer, x, cfg.direct_links, cfg.output_bias)?;
    let full = ridge(
        &d,
        y,
        RidgeConfig {
            lambda: cfg.lambda,
            mode: cfg.mode,
        },
    )?;
    let (output, output_bias) = if cfg.output_bias {
        let rows = full.rows() - 1;
        (full.slice_rows(0..rows)?, Some(full.row(rows).to_vec()))
    } else {
        (full, None)
    };
    Ok(ShallowModel {
        kind: cfg.kind(),
        input_dim: x.cols(),
        n_outputs: y.cols(),
        layer: Some(layer),
        direct_links: cfg.direct_links,
        output,
        output_bias,
        kernel: None,
        support: None,
    })
}

fn design(layer: &RandomLayer, x: &Matrix, direct_links: bool, bias: bool) -> Result<Matrix> {
    let h = layer.forward(x)?;
    let ones;
    let mut parts: Vec<&Matrix> = Vec::with_capacity(3);
    parts.push(&h);
    if direct_links {
        parts.push(x);
    }
    if bias {
        ones = Matrix::filled(x.rows(), 1, 1.0);
        parts.push(&ones);
    }
    if parts.len() == 1 {
        return Ok(h);
    }
    concat_cols(&parts)
}

/// RVFL with `hidden` sigmoid units on `[-1, 1]`, direct links and output bias.
pub fn rvfl_train(x: &Matrix, y: &Matrix, hidden: usize, lambda: f64, seed: u64) -> Result<ShallowModel> {
    train_random_net(x, y, &RandomNetConfig::rvfl(hidden, lambda), &mut RngState::new(seed))
}

/// ELM: the RVFL draw without direct links or output bias.
pub fn elm_train(x: &Matrix, y: &Matrix, hidden: usize, lambda: f64, seed: u64) -> Result<ShallowModel> {
    train_random_net(x, y, &RandomNetConfig::elm(hidden, lambda), &mut RngState::new(seed))
}

/// Kernel ELM, i.e. kernel ridge regression on one-hot targets.
pub fn kelm_train(x: &Matrix, y: &Matrix, kernel: &KernelSpec, lambda: f64) -> Result<ShallowModel> {
    check_training(x, y)?;
    let k = kernel_matrix(x, x, kernel)?;
    let alpha = krr_fit(&k, y, lambda)?;
    Ok(ShallowModel {
        kind: ShallowKind::Kelm,
        input_dim: x.cols(),
        n_outputs: y.cols(),
        layer: None,
        direct_links: false,
        output: alpha,
        output_bias: None,
        kernel: Some(*kernel),
        support: Some(x.clone()),
    })
}

impl ShallowModel {
    /// Hidden units counted toward model complexity; zero for kernel models.
    pub fn hidden_nodes(&self) -> usize {
        self.layer.as_ref().map_or(0, RandomLayer::width)
    }

    pub fn scores(&self, x: &Matrix) -> Result<Matrix> {
        if x.cols() != self.input_dim {
            bail!(
                Shape,
                "model expects {} features, got {}",
                self.input_dim,
                x.cols()
            );
        }
        match (&self.layer, &self.kernel, &self.support) {
            (Some(layer), _, _) => {
                let d = design(layer, x, self.direct_links, false)?;
                let mut s = d.matmul(&self.output)?;
                if let Some(b) = &self.output_bias {
                    s.add_row_vector(b)?;
                }
                Ok(s)
            }
            (None, Some(kernel), Some(support)) => {
                kernel_matrix(x, support, kernel)?.matmul(&self.output)
            }
            _ => bail!(Argument, "model has neither a hidden layer nor a kernel"),
        }
    }

    pub fn predict(&self, x: &Matrix) -> Result<Prediction> {
        Ok(Prediction::from_scores(self.scores(x)?))
    }
}

pub fn predict(model: &ShallowModel, x: &Matrix) -> Result<Prediction> {
    model.predict(x)
}
