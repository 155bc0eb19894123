use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use super::matrix::Matrix;
use crate::error::{Error, Result};

/// Elementwise hidden-layer non-linearity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    #[default]
    Sigmoid,
    Tanh,
    Relu,
    Linear,
}

impl Activation {
    #[inline]
    pub fn apply_scalar(self, x: f64) -> f64 {
        match self {
            Activation::Sigmoid => 1.0 / (1.0 + libm::exp(-x)),
            Activation::Tanh => libm::tanh(x),
            Activation::Relu => x.max(0.0),
            Activation::Linear => x,
        }
    }

    pub fn apply(self, m: &Matrix) -> Matrix {
        if self == Activation::Linear {
            return m.clone();
        }
        m.map(|v| self.apply_scalar(v))
    }

    pub fn apply_inplace(self, m: &mut Matrix) {
        if self != Activation::Linear {
            m.map_inplace(|v| self.apply_scalar(v));
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Sigmoid => "sigmoid",
            Activation::Tanh => "tanh",
            Activation::Relu => "relu",
            Activation::Linear => "linear",
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sigmoid" => Ok(Activation::Sigmoid),
            "tanh" => Ok(Activation::Tanh),
            "relu" => Ok(Activation::Relu),
            "linear" => Ok(Activation::Linear),
            other => Err(Error::Argument(alloc::format!(
                "unknown activation '{other}'"
            ))),
        }
    }
}

/// Applies the activation named `name` elementwise.
pub fn activate(name: &str, m: &Matrix) -> Result<Matrix> {
    Ok(name.parse::<Activation>()?.apply(m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_definitions() {
        assert_eq!(Activation::Sigmoid.apply_scalar(0.0), 0.5);
        assert_eq!(Activation::Relu.apply_scalar(-3.0), 0.0);
        assert_eq!(Activation::Relu.apply_scalar(3.0), 3.0);
        assert_eq!(Activation::Tanh.apply_scalar(0.0), 0.0);
    }

    #[test]
    fn linear_is_identity_and_shape_is_kept() {
        let m = Matrix::from_rows(&[[1.5, -2.0, 0.0], [3.0, 4.0, -5.0]]).unwrap();
        assert_eq!(activate("linear", &m).unwrap(), m);
        for name in ["sigmoid", "tanh", "relu", "linear"] {
            assert_eq!(activate(name, &m).unwrap().shape(), m.shape());
        }
    }

    #[test]
    fn unknown_name() {
        let m = Matrix::zeros(1, 1);
        assert!(matches!(activate("softsign", &m), Err(Error::Argument(_))));
    }
}
