//! A trained classifier of any family behind one type.

use serde::{Deserialize, Serialize};

use crate::data::Split;
use crate::deep::{deep_train_xy, ClassifierSpec, DeepConfig, DeepModel};
use crate::error::Result;
use crate::numerics::{derive_seed, Matrix, RngState, Stream};
use crate::shallow::{kelm_train, train_random_net, Prediction, ShallowModel};

/// Everything needed to train one model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum ModelSpec {
    Shallow { classifier: ClassifierSpec, seed: u64 },
    Deep(DeepConfig),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Model {
    Shallow(ShallowModel),
    Deep(DeepModel),
}

pub fn fit(spec: &ModelSpec, x: &Matrix, y: &Matrix) -> Result<Model> {
    match spec {
        ModelSpec::Shallow { classifier, seed } => Ok(Model::Shallow(match classifier {
            ClassifierSpec::Random(c) => {
                let mut rng = RngState::new(derive_seed(*seed, Stream::Classifier, 0));
                train_random_net(x, y, c, &mut rng)?
            }
            ClassifierSpec::Kernel { kernel, lambda } => kelm_train(x, y, kernel, *lambda)?,
        })),
        ModelSpec::Deep(cfg) => Ok(Model::Deep(deep_train_xy(x, y, cfg)?)),
    }
}

pub fn fit_split(spec: &ModelSpec, split: &Split) -> Result<Model> {
    fit(spec, &split.x, &split.y)
}

impl Model {
    pub fn predict(&self, x: &Matrix) -> Result<Prediction> {
        match self {
            Model::Shallow(m) => m.predict(x),
            Model::Deep(m) => m.predict(x),
        }
    }

    pub fn hidden_nodes(&self) -> usize {
        match self {
            Model::Shallow(m) => m.hidden_nodes(),
            Model::Deep(m) => m.hidden_nodes(),
        }
    }

    pub fn converged(&self) -> bool {
        match self {
            Model::Shallow(_) => true,
            Model::Deep(m) => m.converged(),
        }
    }

    pub fn input_dim(&self) -> usize {
        match self {
            Model::Shallow(m) => m.input_dim,
            Model::Deep(m) => m.input_dim,
        }
    }
}
