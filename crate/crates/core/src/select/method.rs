//! Named method presets and their translation into model specs.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use alloc::{format, vec};
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use super::grid::{HyperParams, SolverSettings};
use crate::autoencoder::{AeRegularizer, AutoencoderSpec, CorruptionSpec};
use crate::deep::{ClassifierSpec, Connectivity, DeepConfig};
use crate::error::{bail, Error, Result};
use crate::model::ModelSpec;
use crate::shallow::RandomNetConfig;
use crate::solvers::{ElasticNetConfig, KernelSpec, L1Config};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegKind {
    L1,
    L2,
    #[serde(alias = "elastic")]
    Elas,
}

impl RegKind {
    fn tag(self) -> &'static str {
        match self {
            RegKind::L1 => "l1",
            RegKind::L2 => "l2",
            RegKind::Elas => "elas",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    Elm,
    Rvfl,
    Kelm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    Gaussian,
    Masking,
}

/// Model family of a method.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "arch", rename_all = "lowercase")]
pub enum Architecture {
    Shallow {
        classifier: ClassifierKind,
    },
    Stack {
        connectivity: Connectivity,
        reg: RegKind,
        classifier: ClassifierKind,
        #[serde(default)]
        denoising: Option<NoiseKind>,
    },
    KernelStack,
}

/// Which grid axes a method draws from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Axes {
    pub layers: bool,
    pub ae_width: bool,
    pub c_ae: bool,
    pub noise: bool,
    pub sigma: bool,
    pub clf_width: bool,
    pub c_clf: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Method {
    pub name: String,
    pub arch: Architecture,
}

impl Method {
    pub fn new(name: impl Into<String>, arch: Architecture) -> Self {
        Method {
            name: name.into(),
            arch,
        }
    }

    /// Every preset, in a fixed order.
    pub fn presets() -> Vec<Method> {
        let mut out: Vec<Method> = ["ELM", "RVFL", "KELM"]
            .iter()
            .map(|n| n.parse().expect("preset"))
            .collect();
        for prefix in ["H-ELM(", "sdRVFL(d-", "sdRVFL(dense-", "sdRVFL-D(dense-"] {
            for reg in ["l1", "l2", "elas"] {
                out.push(format!("{prefix}{reg})").parse().expect("preset"));
            }
        }
        out.push("ML-KELM".parse().expect("preset"));
        out
    }

    pub fn axes(&self) -> Axes {
        match self.arch {
            Architecture::Shallow { classifier } => {
                let kernel = classifier == ClassifierKind::Kelm;
                Axes {
                    layers: false,
                    ae_width: false,
                    c_ae: false,
                    noise: false,
                    sigma: kernel,
                    clf_width: !kernel,
                    c_clf: true,
                }
            }
            Architecture::Stack {
                classifier,
                denoising,
                ..
            } => {
                let kernel = classifier == ClassifierKind::Kelm;
                Axes {
                    layers: true,
                    ae_width: true,
                    c_ae: true,
                    noise: denoising.is_some(),
                    sigma: kernel,
                    clf_width: !kernel,
                    c_clf: true,
                }
            }
            Architecture::KernelStack => Axes {
                layers: true,
                ae_width: false,
                c_ae: true,
                noise: false,
                sigma: true,
                clf_width: false,
                c_clf: true,
            },
        }
    }

    /// Translates a grid point into a trainable spec.
    pub fn build(&self, hp: &HyperParams, seed: u64, s: &SolverSettings) -> Result<ModelSpec> {
        let need = |v: Option<f64>, what: &str| {
            v.ok_or_else(|| Error::Argument(format!("{} needs `{what}`", self.name)))
        };
        let needu = |v: Option<usize>, what: &str| {
            v.ok_or_else(|| Error::Argument(format!("{} needs `{what}`", self.name)))
        };
        let lambda = |c: f64| -> Result<f64> {
            if !(c > 0.0) || !c.is_finite() {
                bail!(Argument, "C must be positive and finite, got {c}");
            }
            Ok(1.0 / c)
        };
        let classifier = |kind: ClassifierKind| -> Result<ClassifierSpec> {
            let lam = lambda(need(hp.c_clf, "c_clf")?)?;
            Ok(match kind {
                ClassifierKind::Elm | ClassifierKind::Rvfl => {
                    let width = needu(hp.clf_width, "clf_width")?;
                    if width == 0 {
                        bail!(Argument, "{} needs a classifier width of at least 1", self.name);
                    }
                    let mut c = if kind == ClassifierKind::Rvfl {
                        RandomNetConfig::rvfl(width, lam)
                    } else {
                        RandomNetConfig::elm(width, lam)
                    };
                    c.activation = s.activation;
                    ClassifierSpec::Random(c)
                }
                ClassifierKind::Kelm => ClassifierSpec::Kernel {
                    kernel: KernelSpec::Rbf {
                        sigma: need(hp.sigma, "sigma")?,
                    },
                    lambda: lam,
                },
            })
        };
        match self.arch {
            Architecture::Shallow { classifier: kind } => Ok(ModelSpec::Shallow {
                classifier: classifier(kind)?,
                seed,
            }),
            Architecture::Stack {
                connectivity,
                reg,
                classifier: kind,
                denoising,
            } => {
                if hp.ae_widths.is_empty() {
                    bail!(Argument, "{} needs at least one autoencoder width", self.name);
                }
                if hp.layers.is_some_and(|l| l != hp.ae_widths.len()) {
                    bail!(
                        Argument,
                        "{} has layers = {:?} but {} autoencoder widths",
                        self.name,
                        hp.layers,
                        hp.ae_widths.len()
                    );
                }
                let lam = lambda(need(hp.c_ae, "c_ae")?)?;
                let reg = match reg {
                    RegKind::L2 => AeRegularizer::L2 { lambda: lam },
                    RegKind::L1 => {
                        let mut c = L1Config::new(lam);
                        c.max_iters = s.l1_max_iters;
                        AeRegularizer::L1(c)
                    }
                    RegKind::Elas => {
                        let mut c = ElasticNetConfig::new(lam, s.alpha_mix);
                        c.max_iters = s.admm_max_iters;
                        AeRegularizer::Elastic(c)
                    }
                };
                let corruption = match denoising {
                    None => CorruptionSpec::None,
                    Some(NoiseKind::Gaussian) => CorruptionSpec::Gaussian {
                        sigma: need(hp.noise, "noise")?,
                    },
                    Some(NoiseKind::Masking) => CorruptionSpec::Masking {
                        nu: need(hp.noise, "noise")?,
                    },
                };
                let layers = hp
                    .ae_widths
                    .iter()
                    .map(|&w| {
                        let mut a = AutoencoderSpec::new(w, reg).with_corruption(corruption);
                        a.activation = s.activation;
                        a
                    })
                    .collect();
                let mut cfg = DeepConfig::new(layers, connectivity, classifier(kind)?, seed);
                cfg.rescale = s.rescale;
                cfg.corrupt_all_layers = s.corrupt_all_layers;
                cfg.kernel_row_cap = s.kernel_row_cap;
                cfg.validate()?;
                Ok(ModelSpec::Deep(cfg))
            }
            Architecture::KernelStack => {
                let depth = needu(hp.layers, "layers")?;
                if depth == 0 {
                    bail!(Argument, "{} needs at least one layer", self.name);
                }
                let kernel = KernelSpec::Rbf {
                    sigma: need(hp.sigma, "sigma")?,
                };
                let ae = AeRegularizer::Kernel {
                    kernel,
                    lambda: lambda(need(hp.c_ae, "c_ae")?)?,
                };
                let mut cfg = DeepConfig::new(
                    vec![AutoencoderSpec::new(0, ae); depth],
                    Connectivity::Plain,
                    classifier(ClassifierKind::Kelm)?,
                    seed,
                );
                cfg.rescale = s.rescale;
                cfg.kernel_row_cap = s.kernel_row_cap;
                Ok(ModelSpec::Deep(cfg))
            }
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

fn parse_reg(s: &str) -> Option<RegKind> {
    match s {
        "l1" => Some(RegKind::L1),
        "l2" => Some(RegKind::L2),
        "elas" | "elastic" => Some(RegKind::Elas),
        _ => None,
    }
}

impl FromStr for Method {
    type Err = Error;

    /// Accepts `ELM`, `RVFL`, `KELM`, `ML-KELM`, `H-ELM(r)`, `sdRVFL(d-r)`,
    /// `sdRVFL(dense-r)` and `sdRVFL-D(dense-r)` with `r` in `l1 | l2 | elas`.
    fn from_str(s: &str) -> Result<Self> {
        let shallow = |c| Architecture::Shallow { classifier: c };
        let arch = match s {
            "ELM" => Some(shallow(ClassifierKind::Elm)),
            "RVFL" => Some(shallow(ClassifierKind::Rvfl)),
            "KELM" => Some(shallow(ClassifierKind::Kelm)),
            "ML-KELM" => Some(Architecture::KernelStack),
            _ => s
                .strip_suffix(')')
                .and_then(|body| body.split_once('('))
                .and_then(|(head, args)| {
                    let (classifier, denoise, conn_and_reg) = match head {
                        "H-ELM" => (ClassifierKind::Elm, false, ("plain", args)),
                        "sdRVFL" | "sdRVFL-D" => {
                            let (c, r) = args.split_once('-')?;
                            (ClassifierKind::Rvfl, head == "sdRVFL-D", (c, r))
                        }
                        _ => return None,
                    };
                    let connectivity = match conn_and_reg.0 {
                        "plain" => Connectivity::Plain,
                        "d" => Connectivity::Direct,
                        "dense" => Connectivity::Dense,
                        _ => return None,
                    };
                    Some(Architecture::Stack {
                        connectivity,
                        reg: parse_reg(conn_and_reg.1)?,
                        classifier,
                        denoising: denoise.then_some(NoiseKind::Gaussian),
                    })
                }),
        };
        match arch {
            Some(arch) => Ok(Method::new(s.to_string(), arch)),
            None => bail!(Argument, "unknown method '{s}'"),
        }
    }
}

/// Canonical display name of an architecture, if it has one.
pub fn canonical_name(arch: &Architecture) -> Option<String> {
    Some(match *arch {
        Architecture::Shallow { classifier } => match classifier {
            ClassifierKind::Elm => "ELM".into(),
            ClassifierKind::Rvfl => "RVFL".into(),
            ClassifierKind::Kelm => "KELM".into(),
        },
        Architecture::KernelStack => "ML-KELM".into(),
        Architecture::Stack {
            connectivity,
            reg,
            classifier,
            denoising,
        } => match (connectivity, classifier, denoising) {
            (Connectivity::Plain, ClassifierKind::Elm, None) => format!("H-ELM({})", reg.tag()),
            (Connectivity::Direct, ClassifierKind::Rvfl, None) => format!("sdRVFL(d-{})", reg.tag()),
            (Connectivity::Dense, ClassifierKind::Rvfl, None) => format!("sdRVFL(dense-{})", reg.tag()),
            (Connectivity::Dense, ClassifierKind::Rvfl, Some(NoiseKind::Gaussian)) => {
                format!("sdRVFL-D(dense-{})", reg.tag())
            }
            _ => return None,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_round_trip_names() {
        let all = Method::presets();
        assert_eq!(all.len(), 16);
        for m in &all {
            assert_eq!(canonical_name(&m.arch).as_deref(), Some(m.name.as_str()));
        }
    }

    #[test]
    fn parse_variants() {
        let m: Method = "sdRVFL-D(dense-elas)".parse().unwrap();
        assert_eq!(
            m.arch,
            Architecture::Stack {
                connectivity: Connectivity::Dense,
                reg: RegKind::Elas,
                classifier: ClassifierKind::Rvfl,
                denoising: Some(NoiseKind::Gaussian),
            }
        );
        assert!("sdRVFL(sparse-l2)".parse::<Method>().is_err());
        assert!("MLP".parse::<Method>().is_err());
        assert!("H-ELM(l3)".parse::<Method>().is_err());
    }

    #[test]
    fn axes_restriction() {
        let rvfl: Method = "RVFL".parse().unwrap();
        assert!(!rvfl.axes().noise && !rvfl.axes().ae_width);
        let d: Method = "sdRVFL-D(dense-l2)".parse().unwrap();
        assert!(d.axes().noise);
        let k: Method = "ML-KELM".parse().unwrap();
        assert!(k.axes().sigma && !k.axes().clf_width);
    }
}
