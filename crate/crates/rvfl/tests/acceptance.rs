//! One PASS/FAIL line per acceptance criterion. Runs as a plain binary so
//! the lines are always printed; exits non-zero if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rvfl::bench::{run_bench, BenchOptions, MANIFEST_FILE, RESULTS_FILE};
use rvfl::builtin;
use rvfl::config::RunConfig;
use rvfl::results::without_time_columns;
use rvfl_core::data::{Dataset, Role};
use rvfl_core::deep::{deep_train_xy, ClassifierSpec, Connectivity, DeepConfig};
use rvfl_core::autoencoder::{AeRegularizer, AutoencoderSpec};
use rvfl_core::model::{fit, Model};
use rvfl_core::numerics::{seeded_uniform, Matrix, RngState};
use rvfl_core::select::{
    grid_search, select, GridSpec, HyperParams, Method, NoClock, SelectionView, Sequential, SolverSettings,
};
use rvfl_core::shallow::{train_random_net, RandomNetConfig};
use rvfl_core::solvers::{
    admm_elastic_net, fista_lasso, kernel_matrix, krr_fit, lasso_objective, ridge_dual, ridge_primal,
    ElasticNetConfig, KernelSpec, L1Config,
};
use rvfl_core::stats::{friedman_chi2, friedman_f, nemenyi_cd, nemenyi_q, significance_with_cd, Significance};

type Check = Result<String, String>;

/// Mean ranks, χ² and its tolerance, then F and its tolerance when checked.
type RankCase = (&'static [f64], f64, f64, Option<(f64, f64)>);

struct Criterion {
    name: &'static str,
    limit: Duration,
    check: fn() -> Check,
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(what: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    ensure((got - want).abs() <= tol, || format!("{what} = {got:.4}, expected {want} ± {tol}"))
}

fn statistics_reproduction() -> Check {
    // M = 20 datasets throughout
    let cases: [RankCase; 3] = [
        (&[3.9, 2.75, 1.8, 1.55], 40.98, 0.01, Some((40.93, 0.05))),
        (&[3.8, 2.95, 1.8, 1.45], 41.82, 0.01, Some((43.7, 0.05))),
        (&[3.77, 2.65, 1.95, 1.62], 31.95, 0.05, None),
    ];
    let mut notes = Vec::new();
    for (ranks, chi2_want, chi2_tol, f_want) in cases {
        let chi2 = friedman_chi2(ranks, 20).map_err(|e| e.to_string())?;
        close("chi2", chi2, chi2_want, chi2_tol)?;
        let f = friedman_f(chi2, 20, 4).map_err(|e| e.to_string())?;
        if let Some((want, tol)) = f_want {
            close("F", f.value, want, tol)?;
        }
        notes.push(format!("chi2 {chi2:.3} F {:.3}", f.value));
    }
    Ok(notes.join("; "))
}

fn critical_differences() -> Check {
    let cd4 = nemenyi_cd(4, 20, 0.05).map_err(|e| e.to_string())?;
    let cd15 = nemenyi_cd(15, 20, 0.05).map_err(|e| e.to_string())?;
    close("CD(4, 20)", cd4, 1.04, 0.01)?;
    close("CD(15, 20)", cd15, 4.79, 0.01)?;
    let q4 = nemenyi_q(4, 0.05).map_err(|e| e.to_string())?;
    let q15 = nemenyi_q(15, 0.05).map_err(|e| e.to_string())?;
    ensure(q4 == 2.569 && q15 == 3.391, || format!("q table gives {q4} and {q15}"))?;
    Ok(format!("CD {cd4:.4} and {cd15:.4}; q {q4} and {q15}"))
}

/// Reference comparison of fifteen methods ordered by mean rank:
/// `+` row better than column, `-` worse, `.` no significant difference.
const REFERENCE_MATRIX: [&str; 15] = [
    "........+++++++",
    ".........++++++",
    ".........++++++",
    ".........++++++",
    ".........++++++",
    "...........++++",
    "............+++",
    ".............++",
    "-..............",
    "-----..........",
    "-----..........",
    "------.........",
    "-------........",
    "--------.......",
    "--------.......",
];

fn significance_matrix() -> Check {
    let ranks = [
        3.1, 3.72, 3.87, 5.15, 5.22, 5.92, 6.62, 7.62, 8.5, 10.15, 10.6, 11.22, 12.25, 12.95, 13.07,
    ];
    let s = significance_with_cd(&ranks, 4.79);
    let mut marked = 0;
    for (i, row) in REFERENCE_MATRIX.iter().enumerate() {
        for (j, c) in row.chars().enumerate() {
            let want = match c {
                '+' => Significance::Better,
                '-' => Significance::Worse,
                _ => Significance::None,
            };
            ensure(s.get(i, j) == want, || {
                format!("cell ({}, {}) is {:?}, reference {c}", i + 1, j + 1, s.get(i, j))
            })?;
            marked += usize::from(want != Significance::None);
        }
    }
    Ok(format!("225 cells equal, {marked} significant"))
}

/// Cyclic coordinate descent on `‖Hw − t‖² + λ‖w‖₁`, one target column at a time.
fn cd_lasso(h: &Matrix, t: &Matrix, lambda: f64) -> Matrix {
    let (n, p) = h.shape();
    let mut w = Matrix::zeros(p, t.cols());
    let col_sq: Vec<f64> = (0..p).map(|j| h.col(j).iter().map(|v| v * v).sum()).collect();
    for k in 0..t.cols() {
        let mut r: Vec<f64> = (0..n).map(|i| t[(i, k)]).collect();
        for _ in 0..200_000 {
            let mut delta: f64 = 0.0;
            for j in 0..p {
                if col_sq[j] == 0.0 {
                    continue;
                }
                let old = w[(j, k)];
                let z = 2.0 * (0..n).map(|i| h[(i, j)] * (r[i] + h[(i, j)] * old)).sum::<f64>();
                let new = if z.abs() > lambda { (z - lambda.copysign(z)) / (2.0 * col_sq[j]) } else { 0.0 };
                if new != old {
                    for i in 0..n {
                        r[i] -= h[(i, j)] * (new - old);
                    }
                    w[(j, k)] = new;
                }
                delta = delta.max((new - old).abs());
            }
            if delta < 1e-15 {
                break;
            }
        }
    }
    w
}

fn rel(a: &Matrix, b: &Matrix) -> f64 {
    a.sub(b).unwrap().frobenius_norm() / b.frobenius_norm().max(1e-300)
}

fn solver_oracles() -> Check {
    let mut rng = RngState::new(2024);
    let mut worst = [0.0f64; 5];
    for case in 0..20 {
        let n = 2 + (rng.next_u64() % 59) as usize;
        let p = 1 + (rng.next_u64() % 60) as usize;
        let h = seeded_uniform(n, p, -1.0, 1.0, &mut rng).unwrap();
        let t = seeded_uniform(n, 2, -1.0, 1.0, &mut rng).unwrap();
        let lam = 0.05 + rng.next_unit();
        let fail = |what: &str, v: f64| format!("problem {case} (n={n}, p={p}): {what} {v:e}");

        let (a, b) = (ridge_primal(&h, &t, lam).unwrap(), ridge_dual(&h, &t, lam).unwrap());
        let r = rel(&a, &b);
        ensure(r <= 1e-8, || fail("primal vs dual ridge", r))?;
        worst[0] = worst[0].max(r);

        // l1 weight scaled to the data so solutions are neither all-zero nor dense
        let l1 = 0.3 * h.t_matmul(&t).unwrap().max_abs() * 2.0;
        let mut cfg = L1Config::new(l1);
        cfg.max_iters = 100_000;
        cfg.tol = 1e-15;
        let f = fista_lasso(&h, &t, &cfg).unwrap();
        let oracle = lasso_objective(&h, &t, &cd_lasso(&h, &t, l1), l1).unwrap();
        let gap = (f.objective - oracle).abs();
        ensure(gap <= 1e-6, || fail("FISTA vs coordinate descent objective gap", gap))?;
        worst[1] = worst[1].max(gap);

        let mut en = ElasticNetConfig::new(lam, 0.0);
        en.max_iters = 100_000;
        en.primal_tol = 1e-12;
        en.dual_tol = 1e-12;
        let ridge_half = ridge_primal(&h, &t, lam / 2.0).unwrap();
        let r = rel(&admm_elastic_net(&h, &t, &en).unwrap().solution, &ridge_half);
        ensure(r <= 1e-6, || fail("ADMM alpha=0 vs ridge", r))?;
        worst[2] = worst[2].max(r);

        let mut en = ElasticNetConfig::new(l1, 1.0);
        en.max_iters = 100_000;
        en.primal_tol = 1e-12;
        en.dual_tol = 1e-12;
        let fa = lasso_objective(&h, &t, &admm_elastic_net(&h, &t, &en).unwrap().solution, l1).unwrap();
        let gap = (fa - f.objective).abs() / f.objective.max(1.0);
        ensure(gap <= 1e-6, || fail("ADMM alpha=1 vs FISTA relative objective gap", gap))?;
        worst[3] = worst[3].max(gap);

        let xs = seeded_uniform(7, p, -1.0, 1.0, &mut rng).unwrap();
        let alpha = krr_fit(&kernel_matrix(&h, &h, &KernelSpec::Linear).unwrap(), &t, lam).unwrap();
        let pk = kernel_matrix(&xs, &h, &KernelSpec::Linear).unwrap().matmul(&alpha).unwrap();
        let r = rel(&pk, &xs.matmul(&b).unwrap());
        ensure(r <= 1e-8, || fail("linear KRR vs dual ridge predictions", r))?;
        worst[4] = worst[4].max(r);
    }
    Ok(format!(
        "worst: ridge {:.1e}, fista {:.1e}, admm0 {:.1e}, admm1 {:.1e}, krr {:.1e}",
        worst[0], worst[1], worst[2], worst[3], worst[4]
    ))
}

fn bits(m: &Matrix) -> Vec<u64> {
    m.as_slice().iter().map(|v| v.to_bits()).collect()
}

fn degeneracy() -> Check {
    let ds = &builtin::load("two_arcs").map_err(|e| e.to_string())?[0].dataset;
    let train = ds.split(Role::Train);
    let x = ds.x();
    let settings = SolverSettings::default();
    let hp = HyperParams {
        layers: Some(2),
        ae_widths: vec![15, 15],
        clf_width: Some(60),
        c_ae: Some(100.0),
        c_clf: Some(100.0),
        noise: Some(0.0),
        ..HyperParams::default()
    };
    for reg in ["l1", "l2", "elas"] {
        let noisy: Method = format!("sdRVFL-D(dense-{reg})").parse().unwrap();
        let clean: Method = format!("sdRVFL(dense-{reg})").parse().unwrap();
        let a = fit(&noisy.build(&hp, 9, &settings).unwrap(), &train.x, &train.y).unwrap();
        let b = fit(&clean.build(&hp, 9, &settings).unwrap(), &train.x, &train.y).unwrap();
        ensure(a == b, || format!("sigma=0 {reg}: models differ"))?;
        ensure(bits(&a.predict(x).unwrap().scores) == bits(&b.predict(x).unwrap().scores), || {
            format!("sigma=0 {reg}: scores differ")
        })?;
    }

    for seed in 0..5 {
        let elm = train_random_net(&train.x, &train.y, &RandomNetConfig::elm(40, 1e-3), &mut RngState::new(seed));
        let ablated = train_random_net(
            &train.x,
            &train.y,
            &RandomNetConfig::rvfl(40, 1e-3).ablate_direct_links(),
            &mut RngState::new(seed),
        );
        let (elm, ablated) = (elm.unwrap(), ablated.unwrap());
        ensure(elm == ablated, || format!("seed {seed}: ELM and ablated RVFL differ"))?;
        ensure(bits(&elm.scores(x).unwrap()) == bits(&ablated.scores(x).unwrap()), || {
            format!("seed {seed}: ELM and ablated RVFL scores differ")
        })?;
    }

    let layers = vec![AutoencoderSpec::new(12, AeRegularizer::L2 { lambda: 1e-2 }); 3];
    let top = ClassifierSpec::Random(RandomNetConfig::rvfl(50, 1e-2));
    let plain = deep_train_xy(&train.x, &train.y, &DeepConfig::new(layers.clone(), Connectivity::Plain, top, 4));
    let direct = deep_train_xy(&train.x, &train.y, &DeepConfig::new(layers, Connectivity::Direct, top, 4));
    let (plain, direct) = (plain.unwrap(), direct.unwrap());
    for (i, (p, d)) in plain.layers.iter().zip(&direct.layers).enumerate() {
        ensure(p == d, || format!("plain and direct encoders differ at layer {}", i + 1))?;
    }

    let d = train.x.cols();
    let widths = [7usize, 11, 5];
    for depth in 1..=3 {
        let specs: Vec<_> = widths[..depth]
            .iter()
            .map(|&w| AutoencoderSpec::new(w, AeRegularizer::L2 { lambda: 1e-2 }))
            .collect();
        let m = deep_train_xy(&train.x, &train.y, &DeepConfig::new(specs, Connectivity::Dense, top, 1)).unwrap();
        for (i, l) in m.layers.iter().enumerate() {
            let want = d + widths[..i].iter().sum::<usize>();
            ensure(l.input_dim == want, || format!("L={depth}: layer {} input {} != {want}", i + 1, l.input_dim))?;
        }
        let want = d + widths[..depth].iter().sum::<usize>();
        ensure(m.classifier.input_dim == want, || format!("L={depth}: classifier input {}", m.classifier.input_dim))?;
        ensure(m.features(x).unwrap().cols() == want, || format!("L={depth}: feature width"))?;
    }
    Ok("sigma=0, ELM ablation, shared encoders, dense ledger L=1..3".into())
}

fn arcs_grid() -> GridSpec {
    GridSpec {
        ae_widths: vec![10, 20, 40],
        clf_widths: vec![50, 100, 200, 400],
        c_values: vec![1e-1, 1e1, 1e3, 1e5],
        stage_clf_width: 100,
        ..GridSpec::default()
    }
}

fn two_arcs_ordering() -> Check {
    let ds = &builtin::load("two_arcs").map_err(|e| e.to_string())?[0].dataset;
    let p = ds.partitions();
    ensure(p.train.len() == 400 && p.test.len() == 200, || "unexpected two_arcs split".into())?;
    let seeds: Vec<u64> = (1..=10).collect();
    let mut acc = Vec::new();
    for name in ["sdRVFL(dense-l2)", "RVFL"] {
        let m: Method = name.parse().unwrap();
        let r = grid_search(ds, &m, &arcs_grid(), &seeds, &Sequential, &NoClock).map_err(|e| e.to_string())?;
        acc.push(r.test_accuracy);
    }
    let (deep, shallow) = (acc[0], acc[1]);
    let note = format!("sdRVFL(dense-l2) {deep:.4}, RVFL {shallow:.4}");
    ensure(deep >= shallow - 0.01 && deep >= 0.90 && shallow >= 0.90, || note.clone())?;
    Ok(note)
}

fn poisoned(ds: &Dataset) -> Dataset {
    let mut x = ds.x().clone();
    let mut labels = ds.labels().to_vec();
    for &i in &ds.partitions().test {
        x.row_mut(i).iter_mut().for_each(|v| *v = 1e6);
        labels[i] = 1 - labels[i];
    }
    Dataset::new(ds.name(), x, labels)
        .unwrap()
        .with_partitions(ds.partitions().clone())
        .unwrap()
}

const BENCH_CONFIG: &str = r#"
seeds = [1, 2, 3]

[[datasets]]
builtin = "blobs"
[[datasets]]
builtin = "two_arcs"

[[methods]]
name = "ELM"
[[methods]]
name = "RVFL"
[[methods]]
name = "sdRVFL(d-l2)"

[grid]
ae_widths = [10, 20]
clf_widths = [50, 100]
c_values = [1e1, 1e3]
stage_clf_width = 50
"#;

fn protocol_hygiene() -> Check {
    let ds = &builtin::load("two_arcs").map_err(|e| e.to_string())?[0].dataset;
    let bad = poisoned(ds);
    let m: Method = "sdRVFL(dense-l2)".parse().unwrap();
    let g = GridSpec {
        ae_widths: vec![10, 20],
        clf_widths: vec![50, 100],
        c_values: vec![1e1, 1e3],
        stage_clf_width: 50,
        ..GridSpec::default()
    };
    let a = select(&SelectionView::new(ds).unwrap(), &m, &g, 1, &Sequential).unwrap();
    let b = select(&SelectionView::new(&bad).unwrap(), &m, &g, 1, &Sequential).unwrap();
    ensure(a == b, || "selection changed when only test rows changed".into())?;
    let ra = grid_search(ds, &m, &g, &[1], &Sequential, &NoClock).unwrap();
    let rb = grid_search(&bad, &m, &g, &[1], &Sequential, &NoClock).unwrap();
    ensure(ra.params == rb.params && ra.validation_accuracy == rb.validation_accuracy, || {
        "grid search selected differently on poisoned test rows".into()
    })?;
    ensure(ra.test_accuracy != rb.test_accuracy, || "canary did not reach the test score".into())?;

    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = RunConfig::parse(BENCH_CONFIG, tmp.path()).map_err(|e| e.to_string())?;
    let quiet = |out: &Path| BenchOptions {
        out: Some(out.to_path_buf()),
        quiet: true,
        ..BenchOptions::default()
    };
    let full = tmp.path().join("full");
    run_bench(&cfg, &quiet(&full)).map_err(|e| e.to_string())?;
    let staged = tmp.path().join("staged");
    let mut passes = 0;
    loop {
        passes += 1;
        let opts = BenchOptions {
            resume: true,
            stop_after: Some(2),
            ..quiet(&staged)
        };
        if run_bench(&cfg, &opts).map_err(|e| e.to_string())?.finished {
            break;
        }
    }
    let read = |dir: &Path, f: &str| std::fs::read_to_string(dir.join(f)).unwrap();
    let (x, y) = (read(&full, RESULTS_FILE), read(&staged, RESULTS_FILE));
    ensure(x.lines().count() == 7, || format!("expected 6 rows, got {}", x.lines().count() - 1))?;
    ensure(without_time_columns(&x).unwrap() == without_time_columns(&y).unwrap(), || {
        "resumed results differ from the uninterrupted run".into()
    })?;
    ensure(read(&full, MANIFEST_FILE) == read(&staged, MANIFEST_FILE), || "run manifests differ".into())?;
    Ok(format!("canary held; resume over {passes} passes matches"))
}

fn train_determinism() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = tmp.path().join("train.toml");
    std::fs::write(
        &cfg,
        "seeds = [7]\n[[datasets]]\nbuiltin = \"two_arcs\"\n[[methods]]\nname = \"sdRVFL(dense-l2)\"\n\
         params = { layers = 2, ae_widths = [20, 20], clf_width = 100, c_ae = 1e3, c_clf = 1e3 }\n",
    )
    .unwrap();
    let mut files = Vec::new();
    for run in ["a", "b"] {
        let out = tmp.path().join(run);
        let status = Command::new(env!("CARGO_BIN_EXE_rvfl"))
            .args(["train", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        ensure(status.status.success(), || String::from_utf8_lossy(&status.stderr).into_owned())?;
        let model = out.join("models").join("two_arcs__sdRVFL_dense-l2_.json");
        files.push(std::fs::read(&model).map_err(|e| format!("{}: {e}", model.display()))?);
    }
    ensure(files[0] == files[1], || "model files differ".into())?;
    let text = String::from_utf8(files[0].clone()).unwrap();
    let Ok(parsed) = serde_json::from_str::<serde_json::Value>(&text) else {
        return Err("model file is not JSON".into());
    };
    ensure(parsed["model"]["family"] == "deep", || "unexpected model family".into())?;
    let _: Model = serde_json::from_value(parsed["model"].clone()).map_err(|e| e.to_string())?;
    Ok(format!("{} bytes, identical", files[0].len()))
}

fn main() {
    let c = |name, secs, check| Criterion {
        name,
        limit: Duration::from_secs(secs),
        check,
    };
    let criteria = [
        c("statistics reproduction", 1, statistics_reproduction),
        c("critical differences", 1, critical_differences),
        c("significance matrix", 1, significance_matrix),
        c("solver oracles", 30, solver_oracles),
        c("degeneracy suite", 30, degeneracy),
        c("two arcs ordering", 120, two_arcs_ordering),
        c("protocol hygiene", 60, protocol_hygiene),
        c("train determinism", 30, train_determinism),
    ];
    let mut failed = 0;
    for (i, Criterion { name, limit, check }) in criteria.into_iter().enumerate() {
        let t0 = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let took = t0.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if took <= limit => (true, d),
            Ok(d) => (false, format!("{d}; took longer than {limit:?}")),
            Err(e) => (false, e),
        };
        failed += usize::from(!ok);
        println!(
            "{} {} {name} ({:.2} s, limit {} s): {detail}",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            took.as_secs_f64(),
            limit.as_secs()
        );
    }
    if failed > 0 {
        println!("{failed} of 8 criteria failed");
        std::process::exit(1);
    }
    println!("all 8 criteria passed");
}
