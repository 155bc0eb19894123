//! Versioned JSON container for trained models.
//!
//! Floats are written in shortest round-trip form and parsed back exactly,
//! so a reloaded model predicts bit-identically.

use std::fs;
use std::path::Path;

use rvfl_core::data::ScalingStats;
use rvfl_core::model::Model;
use rvfl_core::numerics::Matrix;
use rvfl_core::select::{HyperParams, Method};
use rvfl_core::shallow::Prediction;
use serde::{Deserialize, Serialize};

use crate::error::{config_err, Error, Result};

pub const FORMAT: &str = "rvfl-model";
pub const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub format: String,
    pub version: u32,
    pub dataset: String,
    pub method: Method,
    pub params: HyperParams,
    pub seed: u64,
    /// Applied to raw features before the model sees them.
    pub scaling: Option<ScalingStats>,
    /// Raw label of each class id.
    pub class_names: Vec<String>,
    pub model: Model,
}

#[derive(Deserialize)]
struct Header {
    format: String,
    version: u32,
}

impl ModelFile {
    pub fn new(
        dataset: impl Into<String>,
        method: Method,
        params: HyperParams,
        seed: u64,
        scaling: Option<ScalingStats>,
        class_names: Vec<String>,
        model: Model,
    ) -> Self {
        ModelFile {
            format: FORMAT.into(),
            version: VERSION,
            dataset: dataset.into(),
            method,
            params,
            seed,
            scaling,
            class_names,
            model,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Runtime(format!("model serialization: {e}")))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let h: Header = serde_json::from_str(text).map_err(|e| config_err!("not a model file: {e}"))?;
        if h.format != FORMAT {
            return Err(config_err!("expected format '{FORMAT}', found '{}'", h.format));
        }
        if h.version != VERSION {
            return Err(config_err!("model file version {} is not supported (expected {VERSION})", h.version));
        }
        serde_json::from_str(text).map_err(|e| config_err!("malformed model file: {e}"))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        fs::write(path, self.to_json()? + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        ModelFile::from_json(&text).map_err(|e| config_err!("{}: {e}", path.display()))
    }

    /// Predicts from unscaled features.
    pub fn predict_raw(&self, x: &Matrix) -> Result<Prediction> {
        let x = match &self.scaling {
            Some(s) => s.apply(x)?,
            None => x.clone(),
        };
        Ok(self.model.predict(&x)?)
    }
}
