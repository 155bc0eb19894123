//! Classification metrics.

use alloc::vec::Vec;

use crate::error::{bail, Result};

/// Fraction of matching labels.
pub fn accuracy(truth: &[usize], pred: &[usize]) -> Result<f64> {
    if truth.len() != pred.len() {
        bail!(Shape, "{} true labels but {} predictions", truth.len(), pred.len());
    }
    if truth.is_empty() {
        bail!(Domain, "accuracy of an empty label set");
    }
    let hits = truth.iter().zip(pred).filter(|(a, b)| a == b).count();
    Ok(hits as f64 / truth.len() as f64)
}

/// Area under the ROC curve as `P(s⁺ > s⁻) + ½ P(s⁺ = s⁻)`.
///
/// `labels` are binary with 1 marking the positive class. Computed from
/// average ranks in `O(n log n)`.
pub fn auc(scores: &[f64], labels: &[usize]) -> Result<f64> {
    if scores.len() != labels.len() {
        bail!(Shape, "{} scores but {} labels", scores.len(), labels.len());
    }
    if let Some(bad) = labels.iter().find(|&&l| l > 1) {
        bail!(Argument, "auc needs binary labels, found {bad}");
    }
    if scores.iter().any(|s| !s.is_finite()) {
        bail!(Numeric, "auc scores must be finite");
    }
    let n_pos = labels.iter().filter(|&&l| l == 1).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        bail!(Domain, "auc is undefined when only one class is present");
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        // tied block occupies ranks i+1 ..= j
        let avg = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            if labels[k] == 1 {
                rank_sum_pos += avg;
            }
        }
        i = j;
    }
    let u = rank_sum_pos - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos as f64 * n_neg as f64))
}
