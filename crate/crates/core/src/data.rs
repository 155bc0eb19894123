//! In-memory datasets, target encoding, feature scaling and the bundled
//! synthetic generators.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};
use crate::numerics::{Matrix, RngState, Stream};

/// One-hot `{0, 1}` coding of `labels` over `k` classes.
pub fn one_hot(labels: &[usize], k: usize) -> Result<Matrix> {
    if k == 0 {
        bail!(Argument, "one_hot needs at least one class");
    }
    let mut y = Matrix::zeros(labels.len(), k);
    for (i, &l) in labels.iter().enumerate() {
        if l >= k {
            bail!(Argument, "label {l} at row {i} is outside 0..{k}");
        }
        y[(i, l)] = 1.0;
    }
    Ok(y)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Train,
    Validation,
    Test,
}

/// Row indices per role.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partitions {
    pub train: Vec<usize>,
    #[serde(default)]
    pub validation: Vec<usize>,
    #[serde(default)]
    pub test: Vec<usize>,
    /// When set, no row may appear in two roles.
    #[serde(default = "yes")]
    pub disjoint: bool,
}

fn yes() -> bool {
    true
}

impl Partitions {
    /// Consecutive blocks `[0, train)`, `[train, train + val)`, then test.
    pub fn contiguous(train: usize, validation: usize, test: usize) -> Self {
        Partitions {
            train: (0..train).collect(),
            validation: (train..train + validation).collect(),
            test: (train + validation..train + validation + test).collect(),
            disjoint: true,
        }
    }

    pub fn get(&self, role: Role) -> &[usize] {
        match role {
            Role::Train => &self.train,
            Role::Validation => &self.validation,
            Role::Test => &self.test,
        }
    }
}

/// Rows of one partition.
#[derive(Clone, Debug, PartialEq)]
pub struct Split {
    pub x: Matrix,
    pub y: Matrix,
    pub labels: Vec<usize>,
}

impl Split {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Features, labels, one-hot targets and partitions. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    name: String,
    x: Matrix,
    labels: Vec<usize>,
    n_classes: usize,
    y: Matrix,
    partitions: Partitions,
}

impl Dataset {
    /// All rows start in the train partition.
    pub fn new(name: impl Into<String>, x: Matrix, labels: Vec<usize>) -> Result<Self> {
        let n_classes = labels.iter().max().map_or(0, |m| m + 1);
        Dataset::with_classes(name, x, labels, n_classes)
    }

    pub fn with_classes(
        name: impl Into<String>,
        x: Matrix,
        labels: Vec<usize>,
        n_classes: usize,
    ) -> Result<Self> {
        if x.rows() != labels.len() {
            bail!(Shape, "{} feature rows but {} labels", x.rows(), labels.len());
        }
        if x.rows() == 0 {
            bail!(Argument, "dataset has no rows");
        }
        x.ensure_finite("feature matrix")?;
        let y = one_hot(&labels, n_classes)?;
        let partitions = Partitions {
            train: (0..labels.len()).collect(),
            ..Partitions::default()
        };
        Ok(Dataset {
            name: name.into(),
            x,
            labels,
            n_classes,
            y,
            partitions,
        })
    }

    /// Attaches `p` after checking bounds, disjointness and class coverage.
    pub fn with_partitions(mut self, p: Partitions) -> Result<Self> {
        let n = self.n_rows();
        if p.train.is_empty() {
            bail!(Argument, "train partition of '{}' is empty", self.name);
        }
        let mut owner: Vec<Option<Role>> = vec![None; n];
        for role in [Role::Train, Role::Validation, Role::Test] {
            for &i in p.get(role) {
                if i >= n {
                    bail!(
                        Argument,
                        "{role:?} index {i} out of range for {n} rows in '{}'",
                        self.name
                    );
                }
                match owner[i] {
                    Some(prev) if p.disjoint && prev != role => bail!(
                        Argument,
                        "row {i} is in both {prev:?} and {role:?} but the split is disjoint"
                    ),
                    _ => owner[i] = Some(role),
                }
            }
        }
        let mut seen = vec![false; self.n_classes];
        for &i in &p.train {
            seen[self.labels[i]] = true;
        }
        if let Some(c) = seen.iter().position(|s| !s) {
            bail!(Argument, "class {c} has no train rows in '{}'", self.name);
        }
        self.partitions = p;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn x(&self) -> &Matrix {
        &self.x
    }

    pub fn y(&self) -> &Matrix {
        &self.y
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn n_rows(&self) -> usize {
        self.x.rows()
    }

    pub fn n_features(&self) -> usize {
        self.x.cols()
    }

    pub fn partitions(&self) -> &Partitions {
        &self.partitions
    }

    pub fn split(&self, role: Role) -> Split {
        self.rows(self.partitions.get(role))
    }

    pub fn rows(&self, idx: &[usize]) -> Split {
        Split {
            x: self.x.select_rows(idx),
            y: self.y.select_rows(idx),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    /// Same labels and partitions over new features.
    pub fn with_features(&self, x: Matrix) -> Result<Self> {
        if x.rows() != self.n_rows() {
            bail!(Shape, "replacement features have {} rows, expected {}", x.rows(), self.n_rows());
        }
        x.ensure_finite("feature matrix")?;
        Ok(Dataset {
            x,
            ..self.clone()
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalingMethod {
    /// Affine map of the fitted `[min, max]` onto `[-1, 1]`.
    #[default]
    MinMax,
    ZScore,
}

/// Per-feature affine map `(v - center) / spread`; zero spread maps to 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingStats {
    pub method: ScalingMethod,
    pub center: Vec<f64>,
    pub spread: Vec<f64>,
}

impl ScalingStats {
    pub fn fit(x: &Matrix, method: ScalingMethod) -> Result<Self> {
        let (n, d) = x.shape();
        if n == 0 {
            bail!(Argument, "cannot fit scaling on zero rows");
        }
        let mut center = Vec::with_capacity(d);
        let mut spread = Vec::with_capacity(d);
        for j in 0..d {
            let col = x.col(j);
            match method {
                ScalingMethod::MinMax => {
                    let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
                    let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    center.push(0.5 * (lo + hi));
                    spread.push(0.5 * (hi - lo));
                }
                ScalingMethod::ZScore => {
                    let mean = col.iter().sum::<f64>() / n as f64;
                    let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
                    center.push(mean);
                    spread.push(libm::sqrt(var));
                }
            }
        }
        Ok(ScalingStats {
            method,
            center,
            spread,
        })
    }

    pub fn apply(&self, x: &Matrix) -> Result<Matrix> {
        if x.cols() != self.center.len() {
            bail!(
                Shape,
                "scaling fitted on {} features, got {}",
                self.center.len(),
                x.cols()
            );
        }
        let mut out = x.clone();
        for i in 0..out.rows() {
            for (j, v) in out.row_mut(i).iter_mut().enumerate() {
                let s = self.spread[j];
                *v = if s > 0.0 { (*v - self.center[j]) / s } else { 0.0 };
            }
        }
        Ok(out)
    }
}

/// Fits scaling on the train rows only and applies it to every row.
pub fn fit_apply_scaling(ds: &Dataset, method: ScalingMethod) -> Result<(Dataset, ScalingStats)> {
    let train = ds.x().select_rows(&ds.partitions().train);
    let stats = ScalingStats::fit(&train, method)?;
    let x = stats.apply(ds.x())?;
    Ok((ds.with_features(x)?, stats))
}

/// Bundled synthetic problems. Draws come from the `Data` stream of `seed`.
pub mod synthetic {
    use super::*;

    fn normal_pair(rng: &mut RngState) -> (f64, f64) {
        // Box-Muller on (0, 1]
        let u1 = 1.0 - rng.next_unit();
        let u2 = rng.next_unit();
        let r = libm::sqrt(-2.0 * libm::log(u1));
        (r * libm::cos(2.0 * PI * u2), r * libm::sin(2.0 * PI * u2))
    }

    /// `n` points in 2-D, classes assigned round-robin to `k` centres on the
    /// radius-2 circle. Noise is Gaussian with std `spread`, resampled until
    /// it stays inside half the distance to the nearest other centre, so the
    /// classes are always linearly separable.
    pub fn blobs(n: usize, k: usize, spread: f64, seed: u64) -> Dataset {
        assert!(n > 0 && k > 0, "blobs needs rows and classes");
        let mut rng = RngState::derived(seed, Stream::Data, 0);
        let cap = if k == 1 {
            f64::INFINITY
        } else {
            0.9 * 2.0 * libm::sin(PI / k as f64)
        };
        let mut data = Vec::with_capacity(2 * n);
        let mut labels = Vec::with_capacity(n);
        for i in 0..n {
            let c = i % k;
            let angle = 2.0 * PI * c as f64 / k as f64;
            let (ex, ey) = loop {
                let (a, b) = normal_pair(&mut rng);
                let (a, b) = (a * spread, b * spread);
                if libm::sqrt(a * a + b * b) < cap {
                    break (a, b);
                }
            };
            data.push(2.0 * libm::cos(angle) + ex);
            data.push(2.0 * libm::sin(angle) + ey);
            labels.push(c);
        }
        let x = Matrix::from_vec(n, 2, data).expect("finite by construction");
        Dataset::with_classes("blobs", x, labels, k).expect("consistent by construction")
    }

    /// Two interleaved half-circles, alternating labels, Gaussian noise of
    /// std `noise` on both coordinates.
    pub fn two_arcs(n: usize, noise: f64, seed: u64) -> Dataset {
        assert!(n >= 2, "two_arcs needs at least two rows");
        let mut rng = RngState::derived(seed, Stream::Data, 1);
        let mut data = Vec::with_capacity(2 * n);
        let mut labels = Vec::with_capacity(n);
        for i in 0..n {
            let c = i % 2;
            let t = PI * rng.next_unit();
            let (px, py) = if c == 0 {
                (libm::cos(t), libm::sin(t))
            } else {
                (1.0 - libm::cos(t), 0.5 - libm::sin(t))
            };
            let (a, b) = normal_pair(&mut rng);
            data.push(px + noise * a);
            data.push(py + noise * b);
            labels.push(c);
        }
        let x = Matrix::from_vec(n, 2, data).expect("finite by construction");
        Dataset::with_classes("two_arcs", x, labels, 2).expect("consistent by construction")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Error;

    #[test]
    fn one_hot_rows() {
        let y = one_hot(&[1], 3).unwrap();
        assert_eq!(y.row(0), &[0.0, 1.0, 0.0]);
        let y = one_hot(&[0, 0, 0], 1).unwrap();
        assert_eq!(y, Matrix::filled(3, 1, 1.0));
        assert!(matches!(one_hot(&[3], 3), Err(Error::Argument(_))));
        let labels = [2, 0, 1, 1];
        assert_eq!(one_hot(&labels, 3).unwrap().argmax_rows(), labels);
    }

    fn three_rows() -> Dataset {
        let x = Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]]).unwrap();
        Dataset::new("t", x, vec![0, 1, 0]).unwrap()
    }

    #[test]
    fn partitions_validated() {
        let ds = three_rows();
        let ok = Partitions {
            train: vec![0, 1],
            test: vec![2],
            ..Partitions::default()
        };
        assert!(ds.clone().with_partitions(ok).is_ok());

        let out = Partitions {
            train: vec![0, 1, 5],
            disjoint: true,
            ..Partitions::default()
        };
        assert!(ds.clone().with_partitions(out).is_err());

        let overlap = Partitions {
            train: vec![0, 1],
            test: vec![1, 2],
            disjoint: true,
            ..Partitions::default()
        };
        assert!(ds.clone().with_partitions(overlap.clone()).is_err());
        let shared = Partitions {
            disjoint: false,
            ..overlap
        };
        assert!(ds.clone().with_partitions(shared).is_ok());

        let missing_class = Partitions {
            train: vec![0, 2],
            test: vec![1],
            disjoint: true,
            ..Partitions::default()
        };
        assert!(ds.with_partitions(missing_class).is_err());
    }

    #[test]
    fn minmax_rules() {
        let x = Matrix::from_rows(&[[0.0, 7.0], [10.0, 7.0], [20.0, 9.0]]).unwrap();
        let ds = Dataset::new("s", x, vec![0, 1, 0])
            .unwrap()
            .with_partitions(Partitions {
                train: vec![0, 1],
                test: vec![2],
                disjoint: true,
                ..Partitions::default()
            })
            .unwrap();
        let (scaled, stats) = fit_apply_scaling(&ds, ScalingMethod::MinMax).unwrap();
        assert_eq!(scaled.x().col(0), vec![-1.0, 1.0, 3.0]);
        // constant on train, so every row maps to 0 even the test outlier
        assert_eq!(scaled.x().col(1), vec![0.0, 0.0, 0.0]);
        assert_eq!(stats.spread[1], 0.0);
    }

    #[test]
    fn zscore_unit_moments() {
        let ds = synthetic::two_arcs(200, 0.1, 1);
        let (scaled, _) = fit_apply_scaling(&ds, ScalingMethod::ZScore).unwrap();
        for j in 0..2 {
            let c = scaled.x().col(j);
            let m = c.iter().sum::<f64>() / 200.0;
            let v = c.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / 200.0;
            assert!(m.abs() < 1e-12 && (v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn generators_deterministic() {
        assert_eq!(synthetic::blobs(50, 3, 0.5, 9), synthetic::blobs(50, 3, 0.5, 9));
        assert_ne!(synthetic::two_arcs(50, 0.1, 1), synthetic::two_arcs(50, 0.1, 2));
        let b = synthetic::blobs(40, 2, 10.0, 3);
        // capped noise keeps every point on its own side of x = 0
        for i in 0..40 {
            let x0 = b.x()[(i, 0)];
            assert_eq!(x0 > 0.0, b.labels()[i] == 0);
        }
    }
}
