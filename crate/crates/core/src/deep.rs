//! Stacked randomized autoencoders with a closed-form classifier on top.
//!
//! Layer `i` trains an autoencoder on its input, encodes the clean input and
//! optionally rescales the result per feature to `[-1, 1]`. What each layer
//! and the classifier receive is fixed by [`Connectivity`]:
//!
//! | mode   | layer i input            | classifier input        |
//! |--------|--------------------------|-------------------------|
//! | plain  | `H_{i-1}`                | `H_L`                   |
//! | direct | `H_{i-1}`                | `[H_L, X]`              |
//! | dense  | `[X, H_1, …, H_{i-1}]`   | `[X, H_1, …, H_L]`      |
//!
//! with `H_0 = X`.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::autoencoder::{encode, rand_ae_train, AeRegularizer, AutoencoderSpec, CorruptionSpec, EncoderWeights};
use crate::data::{Dataset, Role, ScalingMethod, ScalingStats};
use crate::error::{bail, Result};
use crate::numerics::{concat_cols, derive_seed, Activation, Matrix, RngState, Stream};
use crate::shallow::{kelm_train, train_random_net, Prediction, RandomNetConfig, ShallowModel};
use crate::solvers::KernelSpec;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Connectivity {
    #[default]
    Plain,
    Direct,
    Dense,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ClassifierSpec {
    /// RVFL or ELM, depending on `direct_links`.
    Random(RandomNetConfig),
    Kernel { kernel: KernelSpec, lambda: f64 },
}

impl ClassifierSpec {
    pub fn hidden(&self) -> usize {
        match self {
            ClassifierSpec::Random(c) => c.hidden,
            ClassifierSpec::Kernel { .. } => 0,
        }
    }
}

/// Default cap on training rows for any kernel layer or kernel classifier.
pub const DEFAULT_KERNEL_ROW_CAP: usize = 5000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeepConfig {
    /// One spec per encoder layer; must be non-empty.
    pub layers: Vec<AutoencoderSpec>,
    pub connectivity: Connectivity,
    pub classifier: ClassifierSpec,
    pub seed: u64,
    /// Rescale each layer output to `[-1, 1]` with train-set min/max.
    #[serde(default = "yes")]
    pub rescale: bool,
    /// Corrupt every layer's input; when false only layer 1 is corrupted.
    #[serde(default = "yes")]
    pub corrupt_all_layers: bool,
    #[serde(default = "default_cap")]
    pub kernel_row_cap: usize,
}

fn yes() -> bool {
    true
}

fn default_cap() -> usize {
    DEFAULT_KERNEL_ROW_CAP
}

impl DeepConfig {
    pub fn new(layers: Vec<AutoencoderSpec>, connectivity: Connectivity, classifier: ClassifierSpec, seed: u64) -> Self {
        DeepConfig {
            layers,
            connectivity,
            classifier,
            seed,
            rescale: true,
            corrupt_all_layers: true,
            kernel_row_cap: DEFAULT_KERNEL_ROW_CAP,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            bail!(Argument, "a deep model needs at least one encoder layer");
        }
        for (i, l) in self.layers.iter().enumerate() {
            l.validate()
                .map_err(|e| crate::Error::Argument(format!("layer {}: {e}", i + 1)))?;
        }
        if let ClassifierSpec::Kernel { kernel, lambda } = &self.classifier {
            kernel.validate()?;
            if !(*lambda > 0.0) {
                bail!(Argument, "kernel classifier lambda must be positive");
            }
        }
        Ok(())
    }

    fn uses_kernels(&self) -> bool {
        self.layers.iter().any(AutoencoderSpec::is_kernel)
            || matches!(self.classifier, ClassifierSpec::Kernel { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainedLayer {
    pub input_dim: usize,
    pub activation: Activation,
    pub encoder: EncoderWeights,
    pub scaling: Option<ScalingStats>,
}

impl TrainedLayer {
    pub fn output_dim(&self) -> usize {
        self.encoder.output_dim()
    }

    fn forward(&self, input: &Matrix) -> Result<Matrix> {
        let h = encode(input, &self.encoder, self.activation)?;
        match &self.scaling {
            Some(s) => s.apply(&h),
            None => Ok(h),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeepModel {
    pub input_dim: usize,
    pub connectivity: Connectivity,
    pub layers: Vec<TrainedLayer>,
    pub classifier: ShallowModel,
}

fn layer_input(conn: Connectivity, x: &Matrix, hs: &[Matrix]) -> Result<Matrix> {
    match (conn, hs.last()) {
        (_, None) => Ok(x.clone()),
        (Connectivity::Plain | Connectivity::Direct, Some(h)) => Ok(h.clone()),
        (Connectivity::Dense, Some(_)) => {
            let mut parts: Vec<&Matrix> = Vec::with_capacity(hs.len() + 1);
            parts.push(x);
            parts.extend(hs);
            concat_cols(&parts)
        }
    }
}

fn classifier_input(conn: Connectivity, x: &Matrix, hs: &[Matrix]) -> Result<Matrix> {
    let last = hs.last().expect("at least one layer");
    match conn {
        Connectivity::Plain => Ok(last.clone()),
        Connectivity::Direct => concat_cols(&[last, x]),
        Connectivity::Dense => {
            let mut parts: Vec<&Matrix> = Vec::with_capacity(hs.len() + 1);
            parts.push(x);
            parts.extend(hs);
            concat_cols(&parts)
        }
    }
}

/// Trains on the dataset's train partition.
pub fn deep_train(ds: &Dataset, cfg: &DeepConfig) -> Result<DeepModel> {
    let train = ds.split(Role::Train);
    deep_train_xy(&train.x, &train.y, cfg)
}

pub fn deep_train_xy(x: &Matrix, y: &Matrix, cfg: &DeepConfig) -> Result<DeepModel> {
    cfg.validate()?;
    if x.rows() == 0 {
        bail!(Argument, "training partition is empty");
    }
    if x.rows() != y.rows() {
        bail!(Shape, "{} input rows but {} target rows", x.rows(), y.rows());
    }
    if cfg.uses_kernels() && x.rows() > cfg.kernel_row_cap {
        bail!(
            Resource,
            "{} training rows exceed the kernel cap of {}; kernel layers hold n×n matrices, O(n²) memory",
            x.rows(),
            cfg.kernel_row_cap
        );
    }

    let mut hs: Vec<Matrix> = Vec::with_capacity(cfg.layers.len());
    let mut layers = Vec::with_capacity(cfg.layers.len());
    for (i, spec) in cfg.layers.iter().enumerate() {
        let input = layer_input(cfg.connectivity, x, &hs)?;
        let mut spec = *spec;
        if i > 0 && !cfg.corrupt_all_layers {
            spec.corruption = CorruptionSpec::None;
        }
        let mut rng = RngState::derived(cfg.seed, Stream::Encoder, i as u64);
        let encoder = rand_ae_train(&input, &spec, &mut rng)?;
        let act = if spec.is_kernel() { Activation::Linear } else { spec.activation };
        let h = encode(&input, &encoder, act)?;
        let (h, scaling) = if cfg.rescale {
            let s = ScalingStats::fit(&h, ScalingMethod::MinMax)?;
            (s.apply(&h)?, Some(s))
        } else {
            (h, None)
        };
        layers.push(TrainedLayer {
            input_dim: input.cols(),
            activation: act,
            encoder,
            scaling,
        });
        hs.push(h);
    }

    let top = classifier_input(cfg.connectivity, x, &hs)?;
    let classifier = match &cfg.classifier {
        ClassifierSpec::Random(c) => {
            let mut rng = RngState::new(derive_seed(cfg.seed, Stream::Classifier, 0));
            train_random_net(&top, y, c, &mut rng)?
        }
        ClassifierSpec::Kernel { kernel, lambda } => kelm_train(&top, y, kernel, *lambda)?,
    };
    let model = DeepModel {
        input_dim: x.cols(),
        connectivity: cfg.connectivity,
        layers,
        classifier,
    };
    model.check_ledger()?;
    Ok(model)
}

impl DeepModel {
    /// Input width each layer must see under the connectivity rule.
    pub fn expected_layer_inputs(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.layers.len());
        let mut dense = self.input_dim;
        let mut prev = self.input_dim;
        for l in &self.layers {
            out.push(match self.connectivity {
                Connectivity::Dense => dense,
                _ => prev,
            });
            dense += l.output_dim();
            prev = l.output_dim();
        }
        out
    }

    pub fn expected_classifier_input(&self) -> usize {
        let last = self.layers.last().map_or(0, TrainedLayer::output_dim);
        match self.connectivity {
            Connectivity::Plain => last,
            Connectivity::Direct => last + self.input_dim,
            Connectivity::Dense => {
                self.input_dim + self.layers.iter().map(TrainedLayer::output_dim).sum::<usize>()
            }
        }
    }

    /// Structural check of every layer width against the connectivity rule.
    pub fn check_ledger(&self) -> Result<()> {
        for (i, (l, want)) in self.layers.iter().zip(self.expected_layer_inputs()).enumerate() {
            if l.input_dim != want || l.encoder.input_dim() != want {
                bail!(
                    Shape,
                    "layer {} sees {} inputs, connectivity requires {want}",
                    i + 1,
                    l.input_dim
                );
            }
        }
        let want = self.expected_classifier_input();
        if self.classifier.input_dim != want {
            bail!(
                Shape,
                "classifier sees {} inputs, connectivity requires {want}",
                self.classifier.input_dim
            );
        }
        Ok(())
    }

    /// Σ random encoder widths + classifier width; kernel parts count zero.
    pub fn hidden_nodes(&self) -> usize {
        let enc: usize = self
            .layers
            .iter()
            .filter(|l| matches!(l.encoder, EncoderWeights::Random { .. }))
            .map(TrainedLayer::output_dim)
            .sum();
        enc + self.classifier.hidden_nodes()
    }

    /// True if every iterative decoder solve met its tolerance.
    pub fn converged(&self) -> bool {
        self.layers.iter().all(|l| l.encoder.converged())
    }

    /// Input the classifier sees for `x`.
    pub fn features(&self, x: &Matrix) -> Result<Matrix> {
        if x.cols() != self.input_dim {
            bail!(Shape, "model expects {} features, got {}", self.input_dim, x.cols());
        }
        let mut hs: Vec<Matrix> = Vec::with_capacity(self.layers.len());
        for l in &self.layers {
            let input = layer_input(self.connectivity, x, &hs)?;
            hs.push(l.forward(&input)?);
        }
        classifier_input(self.connectivity, x, &hs)
    }

    pub fn predict(&self, x: &Matrix) -> Result<Prediction> {
        self.classifier.predict(&self.features(x)?)
    }
}

pub fn deep_predict(model: &DeepModel, x: &Matrix) -> Result<Prediction> {
    model.predict(x)
}

/// Multi-layer kernel ELM: kernel autoencoders and a kernel classifier.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MlKelmConfig {
    /// `(kernel, λ)` per encoder layer.
    pub layers: Vec<(KernelSpec, f64)>,
    pub classifier_kernel: KernelSpec,
    pub classifier_lambda: f64,
    #[serde(default = "default_cap")]
    pub row_cap: usize,
    #[serde(default = "yes")]
    pub rescale: bool,
}

pub fn mlkelm_config(cfg: &MlKelmConfig) -> DeepConfig {
    let layers = cfg
        .layers
        .iter()
        .map(|&(kernel, lambda)| AutoencoderSpec::new(0, AeRegularizer::Kernel { kernel, lambda }))
        .collect();
    let mut dc = DeepConfig::new(
        layers,
        Connectivity::Plain,
        ClassifierSpec::Kernel {
            kernel: cfg.classifier_kernel,
            lambda: cfg.classifier_lambda,
        },
        0,
    );
    dc.kernel_row_cap = cfg.row_cap;
    dc.rescale = cfg.rescale;
    dc
}

pub fn mlkelm_train(ds: &Dataset, cfg: &MlKelmConfig) -> Result<DeepModel> {
    deep_train(ds, &mlkelm_config(cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::synthetic;
    use crate::select::accuracy;
    use crate::Error;

    fn l2(width: usize) -> AutoencoderSpec {
        AutoencoderSpec::new(width, AeRegularizer::L2 { lambda: 1e-3 })
    }

    fn rvfl_top(hidden: usize) -> ClassifierSpec {
        ClassifierSpec::Random(RandomNetConfig::rvfl(hidden, 1e-3))
    }

    #[test]
    fn dense_ledger_widths() {
        let mut rng = RngState::new(1);
        let x = crate::numerics::seeded_uniform(40, 8, -1.0, 1.0, &mut rng).unwrap();
        let labels: Vec<usize> = (0..40).map(|i| i % 2).collect();
        let ds = Dataset::new("d", x, labels).unwrap();
        let cfg = DeepConfig::new(vec![l2(10), l2(20), l2(30)], Connectivity::Dense, rvfl_top(15), 5);
        let m = deep_train(&ds, &cfg).unwrap();
        assert_eq!(m.expected_layer_inputs(), vec![8, 18, 38]);
        assert_eq!(m.classifier.input_dim, 68);
        assert_eq!(m.hidden_nodes(), 10 + 20 + 30 + 15);
    }

    #[test]
    fn plain_and_direct_share_encoders() {
        let ds = synthetic::two_arcs(80, 0.1, 2);
        let a = deep_train(&ds, &DeepConfig::new(vec![l2(12), l2(12)], Connectivity::Plain, rvfl_top(20), 9)).unwrap();
        let b = deep_train(&ds, &DeepConfig::new(vec![l2(12), l2(12)], Connectivity::Direct, rvfl_top(20), 9)).unwrap();
        assert_eq!(a.layers, b.layers);
        assert_eq!(a.classifier.input_dim, 12);
        assert_eq!(b.classifier.input_dim, 14);
    }

    #[test]
    fn zero_noise_denoising_is_plain() {
        let ds = synthetic::two_arcs(60, 0.1, 3);
        let plain = DeepConfig::new(vec![l2(10), l2(10)], Connectivity::Dense, rvfl_top(20), 4);
        let mut noisy = plain.clone();
        for l in &mut noisy.layers {
            l.corruption = CorruptionSpec::Gaussian { sigma: 0.0 };
        }
        assert_eq!(deep_train(&ds, &plain).unwrap(), deep_train(&ds, &noisy).unwrap());
    }

    #[test]
    fn single_layer_collapses_to_shallow() {
        let ds = synthetic::blobs(100, 2, 0.3, 4);
        let mut spec = l2(2);
        spec.activation = Activation::Linear;
        let mut cfg = DeepConfig::new(vec![spec], Connectivity::Plain, rvfl_top(30), 6);
        cfg.rescale = false;
        let m = deep_train(&ds, &cfg).unwrap();
        let encoded = encode(ds.x(), &m.layers[0].encoder, Activation::Linear).unwrap();
        let ClassifierSpec::Random(c) = cfg.classifier else { unreachable!() };
        let mut rng = RngState::new(derive_seed(6, Stream::Classifier, 0));
        let shallow = train_random_net(&encoded, ds.y(), &c, &mut rng).unwrap();
        let deep_pred = m.predict(ds.x()).unwrap();
        let shallow_pred = shallow.predict(&encoded).unwrap();
        assert_eq!(deep_pred, shallow_pred);
    }

    #[test]
    fn separable_training_fit() {
        let ds = synthetic::blobs(200, 2, 0.3, 5);
        let cfg = DeepConfig::new(vec![l2(20), l2(20)], Connectivity::Dense, rvfl_top(200), 1);
        let m = deep_train(&ds, &cfg).unwrap();
        let p = deep_predict(&m, ds.x()).unwrap();
        assert!(accuracy(ds.labels(), &p.labels).unwrap() >= 0.99);
        let one = m.predict(&ds.x().slice_rows(0..1).unwrap()).unwrap();
        assert_eq!(one.labels.len(), 1);
        assert_eq!(m.predict(ds.x()).unwrap(), p);
    }

    #[test]
    fn kernel_cap_guard() {
        let ds = synthetic::two_arcs(2000, 0.1, 1);
        let cfg = MlKelmConfig {
            layers: vec![(KernelSpec::Rbf { sigma: 1.0 }, 1e-3)],
            classifier_kernel: KernelSpec::Rbf { sigma: 1.0 },
            classifier_lambda: 1e-3,
            row_cap: 1500,
            rescale: true,
        };
        match mlkelm_train(&ds, &cfg) {
            Err(Error::Resource(msg)) => assert!(msg.contains("O(n²)")),
            other => panic!("expected resource error, got {other:?}"),
        }
    }

    #[test]
    fn mlkelm_deterministic() {
        let ds = synthetic::two_arcs(60, 0.1, 8);
        let cfg = MlKelmConfig {
            layers: vec![(KernelSpec::Rbf { sigma: 1.0 }, 1e-2); 2],
            classifier_kernel: KernelSpec::Rbf { sigma: 1.0 },
            classifier_lambda: 1e-2,
            row_cap: 1500,
            rescale: true,
        };
        let a = mlkelm_train(&ds, &cfg).unwrap();
        assert_eq!(a, mlkelm_train(&ds, &cfg).unwrap());
        assert_eq!(a.hidden_nodes(), 0);
    }

    #[test]
    fn rejects_empty_stack() {
        let ds = synthetic::two_arcs(10, 0.1, 1);
        let cfg = DeepConfig::new(vec![], Connectivity::Plain, rvfl_top(5), 1);
        assert!(matches!(deep_train(&ds, &cfg), Err(Error::Argument(_))));
    }
}
