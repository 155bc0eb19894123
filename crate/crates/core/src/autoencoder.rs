//! Randomized autoencoder layers.
//!
//! The encoder half is a fixed random map `Hr = a(X̃W + b)`; only the decoder
//! `W′` (width × input_dim) is learned, by ridge, lasso, elastic net or kernel
//! ridge, to reconstruct the clean input from `Hr`. The learned decoder is then
//! reused transposed as the layer's forward map: `H = a(X W′ᵀ)`.
//!
//! Corruption only affects the decoder fit; `encode` always sees clean input.

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};
use crate::numerics::{seeded_gaussian, Activation, Matrix, RngState};
use crate::shallow::{InitRange, RandomLayer};
use crate::solvers::{
    admm_elastic_net, fista_lasso, kernel_matrix, krr_fit, ridge, ElasticNetConfig, KernelSpec,
    L1Config, RidgeConfig,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CorruptionSpec {
    #[default]
    None,
    /// Additive `Normal(0, σ²)` noise.
    Gaussian { sigma: f64 },
    /// Zeroes a `nu` fraction of the entries of every row.
    Masking { nu: f64 },
}

impl CorruptionSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            CorruptionSpec::Gaussian { sigma } if !(sigma >= 0.0) || !sigma.is_finite() => {
                bail!(Argument, "gaussian corruption sigma must be >= 0, got {sigma}")
            }
            CorruptionSpec::Masking { nu } if !(0.0..=1.0).contains(&nu) => {
                bail!(Argument, "masking fraction must lie in [0, 1], got {nu}")
            }
            _ => Ok(()),
        }
    }

    /// True when corruption leaves the input untouched and draws nothing.
    pub fn is_identity(&self) -> bool {
        match *self {
            CorruptionSpec::None => true,
            CorruptionSpec::Gaussian { sigma } => sigma == 0.0,
            CorruptionSpec::Masking { nu } => nu == 0.0,
        }
    }

    /// Intensity on the noise axis of a grid: σ or ν.
    pub fn level(&self) -> f64 {
        match *self {
            CorruptionSpec::None => 0.0,
            CorruptionSpec::Gaussian { sigma } => sigma,
            CorruptionSpec::Masking { nu } => nu,
        }
    }
}

/// Corrupted copy of `x`.
///
/// Masking picks its positions per row without replacement. The count is
/// `ν·p` rounded stochastically (floor, plus one with probability equal to the
/// fractional part), so the expected masked fraction is exactly `ν`.
pub fn corrupt(x: &Matrix, spec: &CorruptionSpec, rng: &mut RngState) -> Result<Matrix> {
    spec.validate()?;
    if spec.is_identity() || x.rows() == 0 || x.cols() == 0 {
        return Ok(x.clone());
    }
    match *spec {
        CorruptionSpec::None => unreachable!(),
        CorruptionSpec::Gaussian { sigma } => {
            let noise = seeded_gaussian(x.rows(), x.cols(), 0.0, sigma, rng)?;
            x.add(&noise)
        }
        CorruptionSpec::Masking { nu } => {
            let p = x.cols();
            let target = nu * p as f64;
            let base = libm::floor(target);
            let frac = target - base;
            let mut out = x.clone();
            for i in 0..out.rows() {
                let mut count = base as usize;
                if frac > 0.0 && rng.next_unit() < frac {
                    count += 1;
                }
                let count = count.min(p);
                let row = out.row_mut(i);
                for j in index::sample(rng.inner(), p, count) {
                    row[j] = 0.0;
                }
            }
            Ok(out)
        }
    }
}

/// Decoder regularization of one autoencoder layer.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AeRegularizer {
    L2 { lambda: f64 },
    L1(L1Config),
    Elastic(ElasticNetConfig),
    Kernel { kernel: KernelSpec, lambda: f64 },
}

impl AeRegularizer {
    pub fn name(&self) -> &'static str {
        match self {
            AeRegularizer::L2 { .. } => "l2",
            AeRegularizer::L1(_) => "l1",
            AeRegularizer::Elastic(_) => "elastic",
            AeRegularizer::Kernel { .. } => "kernel",
        }
    }

    pub fn lambda(&self) -> f64 {
        match *self {
            AeRegularizer::L2 { lambda } | AeRegularizer::Kernel { lambda, .. } => lambda,
            AeRegularizer::L1(c) => c.lambda,
            AeRegularizer::Elastic(c) => c.lambda,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AutoencoderSpec {
    /// Ignored by the kernel variant.
    pub width: usize,
    pub reg: AeRegularizer,
    #[serde(default)]
    pub activation: Activation,
    #[serde(default)]
    pub init: InitRange,
    #[serde(default)]
    pub corruption: CorruptionSpec,
}

impl AutoencoderSpec {
    pub fn new(width: usize, reg: AeRegularizer) -> Self {
        AutoencoderSpec {
            width,
            reg,
            activation: Activation::default(),
            init: InitRange::default(),
            corruption: CorruptionSpec::None,
        }
    }

    pub fn with_corruption(mut self, corruption: CorruptionSpec) -> Self {
        self.corruption = corruption;
        self
    }

    pub fn is_kernel(&self) -> bool {
        matches!(self.reg, AeRegularizer::Kernel { .. })
    }

    pub fn validate(&self) -> Result<()> {
        self.corruption.validate()?;
        match &self.reg {
            AeRegularizer::L2 { lambda } if !(*lambda >= 0.0) || !lambda.is_finite() => {
                bail!(Argument, "l2 autoencoder lambda must be >= 0, got {lambda}")
            }
            AeRegularizer::L1(c) => c.validate()?,
            AeRegularizer::Elastic(c) => c.validate()?,
            AeRegularizer::Kernel { kernel, lambda } => {
                kernel.validate()?;
                if !(*lambda > 0.0) || !lambda.is_finite() {
                    bail!(Argument, "kernel autoencoder lambda must be positive, got {lambda}");
                }
            }
            _ => {}
        }
        if !self.is_kernel() && self.width == 0 {
            bail!(Argument, "autoencoder width must be at least 1");
        }
        Ok(())
    }
}

/// Trained forward map of one layer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EncoderWeights {
    Random {
        /// width × input_dim; encoding multiplies by its transpose.
        decoder: Matrix,
        /// False if an iterative decoder solver hit its cap.
        converged: bool,
    },
    Kernel {
        kernel: KernelSpec,
        support: Matrix,
        alpha: Matrix,
    },
}

impl EncoderWeights {
    pub fn input_dim(&self) -> usize {
        match self {
            EncoderWeights::Random { decoder, .. } => decoder.cols(),
            EncoderWeights::Kernel { support, .. } => support.cols(),
        }
    }

    pub fn output_dim(&self) -> usize {
        match self {
            EncoderWeights::Random { decoder, .. } => decoder.rows(),
            EncoderWeights::Kernel { alpha, .. } => alpha.cols(),
        }
    }

    pub fn converged(&self) -> bool {
        match self {
            EncoderWeights::Random { converged, .. } => *converged,
            EncoderWeights::Kernel { .. } => true,
        }
    }
}

/// Trains one autoencoder layer on `hin`.
///
/// Draw order on `rng`: hidden weights, hidden biases, then corruption.
pub fn rand_ae_train(hin: &Matrix, spec: &AutoencoderSpec, rng: &mut RngState) -> Result<EncoderWeights> {
    spec.validate()?;
    if hin.rows() == 0 {
        bail!(Argument, "autoencoder input has no rows");
    }
    if let AeRegularizer::Kernel { kernel, lambda } = spec.reg {
        return kernel_ae_train(hin, &kernel, lambda);
    }
    let layer = RandomLayer::generate(hin.cols(), spec.width, spec.activation, spec.init, rng)?;
    let noisy = corrupt(hin, &spec.corruption, rng)?;
    let hr = layer.forward(&noisy)?;
    let (decoder, converged) = match spec.reg {
        AeRegularizer::L2 { lambda } => (ridge(&hr, hin, RidgeConfig::new(lambda))?, true),
        AeRegularizer::L1(cfg) => {
            let r = fista_lasso(&hr, hin, &cfg)?;
            (r.solution, r.converged)
        }
        AeRegularizer::Elastic(cfg) => {
            let r = admm_elastic_net(&hr, hin, &cfg)?;
            (r.solution, r.converged)
        }
        AeRegularizer::Kernel { .. } => unreachable!(),
    };
    Ok(EncoderWeights::Random { decoder, converged })
}

/// Kernel autoencoder: `α = (K(H, H) + λI)⁻¹ H`.
pub fn kernel_ae_train(hin: &Matrix, kernel: &KernelSpec, lambda: f64) -> Result<EncoderWeights> {
    let k = kernel_matrix(hin, hin, kernel)?;
    let alpha = krr_fit(&k, hin, lambda)?;
    Ok(EncoderWeights::Kernel {
        kernel: *kernel,
        support: hin.clone(),
        alpha,
    })
}

/// Forward map: `a(H W′ᵀ)` for random layers, `K(H, support)·α` for kernel ones.
pub fn encode(hin: &Matrix, enc: &EncoderWeights, activation: Activation) -> Result<Matrix> {
    if hin.cols() != enc.input_dim() {
        bail!(
            Shape,
            "encoder expects {} features, got {}",
            enc.input_dim(),
            hin.cols()
        );
    }
    match enc {
        EncoderWeights::Random { decoder, .. } => {
            let mut h = hin.matmul_t(decoder)?;
            activation.apply_inplace(&mut h);
            Ok(h)
        }
        EncoderWeights::Kernel {
            kernel,
            support,
            alpha,
        } => kernel_matrix(hin, support, kernel)?.matmul(alpha),
    }
}

/// Fraction of exactly-zero entries, used by masking checks.
pub fn zero_fraction(m: &Matrix) -> f64 {
    let s = m.as_slice();
    if s.is_empty() {
        return 0.0;
    }
    s.iter().filter(|v| **v == 0.0).count() as f64 / s.len() as f64
}
