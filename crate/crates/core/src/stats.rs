//! Friedman ranking test and the Nemenyi post-hoc comparison.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};
use crate::numerics::Matrix;

/// Per-dataset ranks (1 = best accuracy) and their column means.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankTable {
    pub accuracy: Matrix,
    pub ranks: Matrix,
    pub mean_ranks: Vec<f64>,
}

impl RankTable {
    pub fn datasets(&self) -> usize {
        self.accuracy.rows()
    }

    pub fn methods(&self) -> usize {
        self.accuracy.cols()
    }
}

/// Ranks of one row, descending by value, ties sharing the mean rank.
pub fn rank_descending(row: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..row.len()).collect();
    order.sort_by(|&a, &b| row[b].total_cmp(&row[a]));
    let mut ranks = vec![0.0; row.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && row[order[j]] == row[order[i]] {
            j += 1;
        }
        let avg = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = avg;
        }
        i = j;
    }
    ranks
}

/// `accuracy` is datasets × methods.
pub fn rank_rows(accuracy: &Matrix) -> Result<RankTable> {
    let (big_m, m) = accuracy.shape();
    if big_m < 2 || m < 2 {
        bail!(Argument, "ranking needs at least 2 datasets and 2 methods, got {big_m}x{m}");
    }
    accuracy.ensure_finite("accuracy matrix")?;
    let mut ranks = Matrix::zeros(big_m, m);
    for i in 0..big_m {
        ranks.row_mut(i).copy_from_slice(&rank_descending(accuracy.row(i)));
    }
    let mean_ranks = (0..m)
        .map(|j| ranks.col(j).iter().sum::<f64>() / big_m as f64)
        .collect();
    Ok(RankTable {
        accuracy: accuracy.clone(),
        ranks,
        mean_ranks,
    })
}

/// `χ²_F = 12M / (m(m+1)) · (Σ R_j² − m(m+1)²/4)` over the mean ranks `R`.
pub fn friedman_chi2(mean_ranks: &[f64], datasets: usize) -> Result<f64> {
    let m = mean_ranks.len();
    if m < 2 || datasets < 2 {
        bail!(Argument, "Friedman test needs m >= 2 and M >= 2, got m={m}, M={datasets}");
    }
    let mf = m as f64;
    let ss: f64 = mean_ranks.iter().map(|r| r * r).sum();
    let chi2 = 12.0 * datasets as f64 / (mf * (mf + 1.0)) * (ss - mf * (mf + 1.0) * (mf + 1.0) / 4.0);
    // rounding can leave a tiny negative when all ranks are equal
    Ok(chi2.max(0.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FStatistic {
    pub value: f64,
    pub df1: usize,
    pub df2: usize,
}

/// `F_F = (M−1)χ² / (M(m−1) − χ²)` with d.f. `(m−1, (m−1)(M−1))`.
pub fn friedman_f(chi2: f64, datasets: usize, methods: usize) -> Result<FStatistic> {
    if methods < 2 || datasets < 2 {
        bail!(Argument, "Friedman test needs m >= 2 and M >= 2");
    }
    if !(chi2 >= 0.0) {
        bail!(Argument, "chi-square statistic must be >= 0, got {chi2}");
    }
    let big_m = datasets as f64;
    let denom = big_m * (methods as f64 - 1.0) - chi2;
    if denom <= 0.0 {
        bail!(Domain, "chi-square {chi2} saturates the F correction (needs < {})", big_m * (methods as f64 - 1.0));
    }
    Ok(FStatistic {
        value: (big_m - 1.0) * chi2 / denom,
        df1: methods - 1,
        df2: (methods - 1) * (datasets - 1),
    })
}

/// Two-tailed Nemenyi critical values `q_α` (studentized range over √2,
/// infinite degrees of freedom) for `m = 2..=20`.
const Q_05: [f64; 19] = [
    1.960, 2.344, 2.569, 2.728, 2.850, 2.948, 3.031, 3.102, 3.164, 3.219, 3.268, 3.313, 3.354,
    3.391, 3.426, 3.458, 3.489, 3.517, 3.544,
];
const Q_10: [f64; 19] = [
    1.645, 2.052, 2.291, 2.460, 2.589, 2.693, 2.780, 2.855, 2.920, 2.978, 3.030, 3.077, 3.120,
    3.159, 3.196, 3.230, 3.261, 3.291, 3.319,
];

pub fn nemenyi_q(methods: usize, alpha: f64) -> Result<f64> {
    let table = if (alpha - 0.05).abs() < 1e-12 {
        &Q_05
    } else if (alpha - 0.10).abs() < 1e-12 {
        &Q_10
    } else {
        bail!(Argument, "Nemenyi table covers alpha 0.05 and 0.10, got {alpha}");
    };
    if !(2..=20).contains(&methods) {
        bail!(Argument, "Nemenyi table covers 2..=20 methods, got {methods}");
    }
    Ok(table[methods - 2])
}

/// `CD = q_α √(m(m+1) / (6M))`
pub fn nemenyi_cd(methods: usize, datasets: usize, alpha: f64) -> Result<f64> {
    let q = nemenyi_q(methods, alpha)?;
    if datasets == 0 {
        bail!(Argument, "critical difference needs at least one dataset");
    }
    let m = methods as f64;
    Ok(q * libm::sqrt(m * (m + 1.0) / (6.0 * datasets as f64)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Significance {
    #[serde(rename = "s+")]
    Better,
    #[serde(rename = "s-")]
    Worse,
    #[serde(rename = "")]
    None,
}

impl Significance {
    pub fn symbol(self) -> &'static str {
        match self {
            Significance::Better => "s+",
            Significance::Worse => "s-",
            Significance::None => "",
        }
    }
}

/// Entry `(i, j)` says how row method `i` compares to column method `j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignificanceMatrix {
    pub entries: Vec<Vec<Significance>>,
    pub cd: f64,
    pub alpha: Option<f64>,
}

impl SignificanceMatrix {
    pub fn get(&self, i: usize, j: usize) -> Significance {
        self.entries[i][j]
    }
}

/// Marks pairs whose mean ranks differ by at least `cd` (inclusive).
pub fn significance_with_cd(mean_ranks: &[f64], cd: f64) -> SignificanceMatrix {
    let m = mean_ranks.len();
    let mut entries = vec![vec![Significance::None; m]; m];
    for i in 0..m {
        for j in 0..m {
            let gap = mean_ranks[j] - mean_ranks[i];
            if i != j && gap.abs() >= cd {
                // lower rank is better
                entries[i][j] = if gap > 0.0 { Significance::Better } else { Significance::Worse };
            }
        }
    }
    SignificanceMatrix {
        entries,
        cd,
        alpha: None,
    }
}

pub fn pairwise_significance(mean_ranks: &[f64], datasets: usize, alpha: f64) -> Result<SignificanceMatrix> {
    let cd = nemenyi_cd(mean_ranks.len(), datasets, alpha)?;
    let mut s = significance_with_cd(mean_ranks, cd);
    s.alpha = Some(alpha);
    Ok(s)
}

/// Regularized incomplete beta `I_x(a, b)`.
pub fn betainc(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = libm::lgamma(a + b) - libm::lgamma(a) - libm::lgamma(b)
        + a * libm::log(x)
        + b * libm::log(1.0 - x);
    let front = libm::exp(ln_front);
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - front * beta_cf(b, a, 1.0 - x) / b
    }
}

/// Continued fraction for the incomplete beta, modified Lentz.
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let (qab, qap, qam) = (a + b, a + 1.0, a - 1.0);
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=500 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-15 {
            break;
        }
    }
    h
}

/// `P(F ≤ x)` for an F distribution with `(df1, df2)` degrees of freedom.
pub fn f_cdf(x: f64, df1: f64, df2: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    betainc(df1 / 2.0, df2 / 2.0, df1 * x / (df1 * x + df2))
}

/// Upper-α critical value of the F distribution, by bisection on the CDF.
pub fn f_critical(alpha: f64, df1: usize, df2: usize) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        bail!(Argument, "alpha must lie in (0, 1), got {alpha}");
    }
    if df1 == 0 || df2 == 0 {
        bail!(Argument, "F degrees of freedom must be positive");
    }
    let (d1, d2) = (df1 as f64, df2 as f64);
    let target = 1.0 - alpha;
    let mut hi = 1.0;
    while f_cdf(hi, d1, d2) < target {
        hi *= 2.0;
        if hi > 1e12 {
            bail!(Numeric, "F quantile search did not bracket");
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f_cdf(mid, d1, d2) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 * hi.max(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}
