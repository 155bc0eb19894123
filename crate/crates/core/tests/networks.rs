use rvfl_core::data::{fit_apply_scaling, synthetic, Dataset, Partitions, Role, ScalingMethod};
use rvfl_core::deep::{deep_train, mlkelm_train, ClassifierSpec, Connectivity, DeepConfig, MlKelmConfig};
use rvfl_core::autoencoder::{AeRegularizer, AutoencoderSpec};
use rvfl_core::numerics::Matrix;
use rvfl_core::select::{
    accuracy, grid_search, select, GridSpec, Method, NoClock, SearchPolicy, SelectionView, Sequential,
};
use rvfl_core::shallow::{elm_train, kelm_train, rvfl_train, RandomNetConfig};
use rvfl_core::solvers::KernelSpec;

/// Perceptron on `[x, 1]`; returns true once an epoch makes no mistake.
fn perceptron_separates(x: &Matrix, labels: &[usize]) -> bool {
    let d = x.cols();
    let mut w = vec![0.0; d + 1];
    for _ in 0..10_000 {
        let mut mistakes = 0;
        for (i, &l) in labels.iter().enumerate() {
            let s = if l == 1 { 1.0 } else { -1.0 };
            let row = x.row(i);
            let f: f64 = row.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() + w[d];
            if s * f <= 0.0 {
                mistakes += 1;
                for j in 0..d {
                    w[j] += s * row[j];
                }
                w[d] += s;
            }
        }
        if mistakes == 0 {
            return true;
        }
    }
    false
}

#[test]
fn separable_set_is_fit_exactly() {
    let ds = synthetic::blobs(200, 2, 0.25, 7);
    assert!(perceptron_separates(ds.x(), ds.labels()));
    for m in [
        rvfl_train(ds.x(), ds.y(), 50, 1e-4, 11).unwrap(),
        elm_train(ds.x(), ds.y(), 50, 1e-4, 11).unwrap(),
    ] {
        let p = m.predict(ds.x()).unwrap();
        assert_eq!(accuracy(ds.labels(), &p.labels).unwrap(), 1.0);
    }
}

#[test]
fn capacity_monotone_in_width() {
    let ds = synthetic::blobs(200, 2, 0.25, 7);
    let mut means = Vec::new();
    for j in [5, 20, 50] {
        let total: f64 = (0..10)
            .map(|s| {
                let m = rvfl_train(ds.x(), ds.y(), j, 1e-4, s).unwrap();
                accuracy(ds.labels(), &m.predict(ds.x()).unwrap().labels).unwrap()
            })
            .sum();
        means.push(total / 10.0);
    }
    assert!(means.windows(2).all(|w| w[1] >= w[0]), "{means:?}");
}

#[test]
fn single_linear_kernel_layer_tracks_plain_krr() {
    let ds = synthetic::blobs(150, 2, 0.3, 3);
    let rbf = KernelSpec::Rbf { sigma: 1.0 };
    let cfg = MlKelmConfig {
        layers: vec![(KernelSpec::Linear, 1e-8)],
        classifier_kernel: rbf,
        classifier_lambda: 1e-2,
        row_cap: 1500,
        rescale: false,
    };
    let deep = mlkelm_train(&ds, &cfg).unwrap();
    let flat = kelm_train(ds.x(), ds.y(), &rbf, 1e-2).unwrap();
    let a = deep.predict(ds.x()).unwrap().labels;
    let b = flat.predict(ds.x()).unwrap().labels;
    assert!(accuracy(&a, &b).unwrap() >= 0.99);
}

#[test]
fn direct_links_vs_plain_logged() {
    // soft property: reported, not enforced
    let ds = synthetic::two_arcs(300, 0.15, 5);
    let (mut plain, mut direct) = (0.0, 0.0);
    for seed in 0..10 {
        let layers = vec![AutoencoderSpec::new(20, AeRegularizer::L2 { lambda: 1e-3 }); 2];
        let top = ClassifierSpec::Random(RandomNetConfig::rvfl(100, 1e-3));
        for (conn, acc) in [(Connectivity::Plain, &mut plain), (Connectivity::Direct, &mut direct)] {
            let m = deep_train(&ds, &DeepConfig::new(layers.clone(), conn, top, seed)).unwrap();
            *acc += accuracy(ds.labels(), &m.predict(ds.x()).unwrap().labels).unwrap() / 10.0;
        }
    }
    eprintln!("mean train accuracy: plain {plain:.4}, direct {direct:.4}");
}

fn tiny_grid() -> GridSpec {
    GridSpec {
        ae_widths: vec![20],
        clf_widths: vec![100],
        c_values: vec![1e1, 1e3],
        policy: SearchPolicy::Full,
        ..GridSpec::default()
    }
}

#[test]
fn dense_stack_solves_separable_split() {
    let ds = synthetic::blobs(300, 2, 0.3, 9)
        .with_partitions(Partitions::contiguous(150, 50, 100))
        .unwrap();
    let m: Method = "sdRVFL(dense-l2)".parse().unwrap();
    let r = grid_search(&ds, &m, &tiny_grid(), &[1, 2, 3], &Sequential, &NoClock).unwrap();
    assert!(r.test_accuracy >= 0.99, "{}", r.test_accuracy);
    assert_eq!(r.hidden_nodes, 20 * 2 + 100);
}

#[test]
fn selection_ignores_test_rows() {
    let base = synthetic::two_arcs(160, 0.2, 6);
    let parts = Partitions::contiguous(80, 40, 40);
    let ds = base.clone().with_partitions(parts.clone()).unwrap();
    // canary: rewrite every test row, keep the rest
    let mut x = base.x().clone();
    for &i in &parts.test {
        x.row_mut(i).copy_from_slice(&[1e6, -1e6]);
    }
    let poisoned = Dataset::new("two_arcs", x, base.labels().to_vec())
        .unwrap()
        .with_partitions(parts)
        .unwrap();
    let view = SelectionView::new(&ds).unwrap();
    assert_eq!(view.train.len() + view.validation.len(), 120);
    let m: Method = "sdRVFL(d-l2)".parse().unwrap();
    let a = select(&view, &m, &tiny_grid(), 4, &Sequential).unwrap();
    let b = select(&SelectionView::new(&poisoned).unwrap(), &m, &tiny_grid(), 4, &Sequential).unwrap();
    assert_eq!(a, b);
}

#[test]
fn scaling_never_reads_test_rows() {
    let base = synthetic::two_arcs(40, 0.1, 2);
    let mut data = Vec::new();
    for i in 0..40 {
        data.extend_from_slice(base.x().row(i));
        // canary feature: non-zero only on test rows
        data.push(if i >= 30 { 50.0 + i as f64 } else { 0.0 });
    }
    let ds = Dataset::new("c", Matrix::from_vec(40, 3, data).unwrap(), base.labels().to_vec())
        .unwrap()
        .with_partitions(Partitions::contiguous(20, 10, 10))
        .unwrap();
    let (scaled, stats) = fit_apply_scaling(&ds, ScalingMethod::MinMax).unwrap();
    assert_eq!(stats.spread[2], 0.0);
    assert!(scaled.split(Role::Test).x.col(2).iter().all(|v| *v == 0.0));
}
