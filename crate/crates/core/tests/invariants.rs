use proptest::prelude::*;
use rvfl_core::data::one_hot;
use rvfl_core::numerics::{concat_cols, seeded_uniform, Activation, Matrix, RngState};
use rvfl_core::select::{accuracy, auc};
use rvfl_core::stats::{friedman_chi2, rank_rows, significance_with_cd, Significance};

/// Direct count over all positive/negative pairs.
fn brute_auc(scores: &[f64], labels: &[usize]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, &li) in labels.iter().enumerate() {
        for (j, &lj) in labels.iter().enumerate() {
            if li == 1 && lj == 0 {
                den += 1.0;
                if scores[i] > scores[j] {
                    num += 1.0;
                } else if scores[i] == scores[j] {
                    num += 0.5;
                }
            }
        }
    }
    num / den
}

fn binary_case() -> impl Strategy<Value = (Vec<f64>, Vec<usize>)> {
    (2usize..40).prop_flat_map(|n| {
        (
            prop::collection::vec((0u8..6).prop_map(|v| v as f64 / 5.0), n),
            prop::collection::vec(0usize..2, n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn auc_matches_pair_count((scores, labels) in binary_case()) {
        let pos = labels.iter().filter(|&&l| l == 1).count();
        prop_assume!(pos > 0 && pos < labels.len());
        let fast = auc(&scores, &labels).unwrap();
        prop_assert!((fast - brute_auc(&scores, &labels)).abs() < 1e-12);
        let shifted: Vec<f64> = scores.iter().map(|s| 3.0 * s - 7.0).collect();
        prop_assert!((auc(&shifted, &labels).unwrap() - fast).abs() < 1e-12);
    }

    #[test]
    fn accuracy_order_free(pairs in prop::collection::vec((0usize..4, 0usize..4), 1..30)) {
        let (t, p): (Vec<_>, Vec<_>) = pairs.iter().copied().unzip();
        let a = accuracy(&t, &p).unwrap();
        let (tr, pr): (Vec<_>, Vec<_>) = pairs.iter().rev().copied().unzip();
        prop_assert_eq!(a, accuracy(&tr, &pr).unwrap());
    }

    #[test]
    fn concat_then_slice(r in 1usize..8, a in 1usize..5, b in 1usize..5, seed: u64) {
        let mut rng = RngState::new(seed);
        let x = seeded_uniform(r, a, -1.0, 1.0, &mut rng).unwrap();
        let y = seeded_uniform(r, b, -1.0, 1.0, &mut rng).unwrap();
        let c = concat_cols(&[&x, &y]).unwrap();
        prop_assert_eq!(c.slice_cols(0..a).unwrap(), x);
        prop_assert_eq!(c.slice_cols(a..a + b).unwrap(), y);
    }

    #[test]
    fn activations_keep_shape(r in 1usize..6, c in 1usize..6, seed: u64) {
        let m = seeded_uniform(r, c, -3.0, 3.0, &mut RngState::new(seed)).unwrap();
        for act in [Activation::Sigmoid, Activation::Tanh, Activation::Relu, Activation::Linear] {
            prop_assert_eq!(act.apply(&m).shape(), (r, c));
        }
    }

    #[test]
    fn one_hot_argmax_identity(labels in prop::collection::vec(0usize..5, 1..30)) {
        prop_assert_eq!(one_hot(&labels, 5).unwrap().argmax_rows(), labels);
    }

    #[test]
    fn ranks_survive_monotone_maps(rows in prop::collection::vec(prop::collection::vec(0u8..10, 4), 2..8)) {
        let data: Vec<f64> = rows.iter().flatten().map(|&v| v as f64 / 10.0).collect();
        let acc = Matrix::from_vec(rows.len(), 4, data).unwrap();
        let t = rank_rows(&acc).unwrap();
        let warped = rank_rows(&acc.map(|v| (3.0 * v).exp() - 1.0)).unwrap();
        prop_assert_eq!(&t.ranks, &warped.ranks);
        for i in 0..rows.len() {
            prop_assert!((t.ranks.row(i).iter().sum::<f64>() - 10.0).abs() < 1e-12);
        }
        prop_assert!(friedman_chi2(&t.mean_ranks, rows.len()).unwrap() >= 0.0);
    }

    #[test]
    fn significance_antisymmetric(r in prop::collection::vec(1.0f64..10.0, 2..12), cd in 0.1f64..5.0) {
        let s = significance_with_cd(&r, cd);
        for i in 0..r.len() {
            for j in 0..r.len() {
                let mirrored = match s.get(i, j) {
                    Significance::Better => Significance::Worse,
                    Significance::Worse => Significance::Better,
                    Significance::None => Significance::None,
                };
                prop_assert_eq!(s.get(j, i), mirrored);
            }
        }
    }
}

#[test]
fn chi2_zero_only_for_equal_ranks() {
    assert_eq!(friedman_chi2(&[3.0; 5], 10).unwrap(), 0.0);
    assert!(friedman_chi2(&[2.9, 3.1, 3.0, 3.0, 3.0], 10).unwrap() > 0.0);
}
