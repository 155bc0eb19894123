//! Small synthetic datasets shipped with the crate.
//!
//! Each lives in `data/` as a manifest, a CSV file and three index files.
//! The files are generated from [`rvfl_core::data::synthetic`]; a test
//! regenerates them in memory and compares byte for byte.

use std::path::Path;

use rvfl_core::data::{synthetic, Dataset, Partitions};

use crate::error::{config_err, Result};
use crate::io::{Manifest, Prepared};

pub struct Bundled {
    pub name: &'static str,
    pub rows: usize,
    /// Train, validation and test row counts, taken contiguously.
    pub split: (usize, usize, usize),
    generate: fn() -> Dataset,
    files: &'static [(&'static str, &'static str)],
}

macro_rules! bundled_files {
    ($name:literal) => {
        &[
            (concat!($name, ".toml"), include_str!(concat!("../data/", $name, ".toml"))),
            (concat!($name, ".csv"), include_str!(concat!("../data/", $name, ".csv"))),
            (concat!($name, ".train"), include_str!(concat!("../data/", $name, ".train"))),
            (concat!($name, ".val"), include_str!(concat!("../data/", $name, ".val"))),
            (concat!($name, ".test"), include_str!(concat!("../data/", $name, ".test"))),
        ]
    };
}

pub const BUNDLED: &[Bundled] = &[
    Bundled {
        name: "blobs",
        rows: 300,
        split: (150, 50, 100),
        generate: || synthetic::blobs(300, 3, 0.35, 11),
        files: bundled_files!("blobs"),
    },
    Bundled {
        name: "two_arcs",
        rows: 700,
        split: (400, 100, 200),
        generate: || synthetic::two_arcs(700, 0.2, 2024),
        files: bundled_files!("two_arcs"),
    },
];

pub fn names() -> Vec<&'static str> {
    BUNDLED.iter().map(|b| b.name).collect()
}

fn find(name: &str) -> Result<&'static Bundled> {
    BUNDLED
        .iter()
        .find(|b| b.name == name)
        .ok_or_else(|| config_err!("unknown builtin dataset '{name}' (available: {})", names().join(", ")))
}

/// Loads a bundled dataset through its manifest.
pub fn load(name: &str) -> Result<Vec<Prepared>> {
    let b = find(name)?;
    let text = |file: &str| -> Result<String> {
        b.files
            .iter()
            .find(|(f, _)| *f == file)
            .map(|(_, t)| t.to_string())
            .ok_or_else(|| config_err!("builtin '{name}' has no file '{file}'"))
    };
    let manifest = Manifest::parse(&text(&format!("{name}.toml"))?, name)?;
    manifest.prepare(&|p: &Path| text(&p.to_string_lossy()))
}

fn csv_text(ds: &Dataset) -> String {
    let mut out = String::new();
    let names: Vec<String> = (0..ds.n_features()).map(|j| format!("x{j}")).collect();
    out.push_str(&names.join(","));
    out.push_str(",label\n");
    for i in 0..ds.n_rows() {
        for v in ds.x().row(i) {
            out.push_str(&format!("{v},"));
        }
        out.push_str(&format!("{}\n", ds.labels()[i]));
    }
    out
}

fn index_text(idx: &[usize]) -> String {
    idx.iter().map(|i| format!("{i}\n")).collect()
}

/// The files a bundled dataset should consist of, freshly generated.
pub fn render(b: &Bundled) -> Vec<(String, String)> {
    let ds = (b.generate)();
    assert_eq!(ds.n_rows(), b.rows);
    let p = Partitions::contiguous(b.split.0, b.split.1, b.split.2);
    let manifest = format!(
        "name = \"{n}\"\ndata = \"{n}.csv\"\nheader = true\nlabel = \"label\"\nscaling = \"minmax\"\n\n\
         [[splits]]\nname = \"holdout\"\ntrain = \"{n}.train\"\nvalidation = \"{n}.val\"\ntest = \"{n}.test\"\n",
        n = b.name
    );
    vec![
        (format!("{}.toml", b.name), manifest),
        (format!("{}.csv", b.name), csv_text(&ds)),
        (format!("{}.train", b.name), index_text(&p.train)),
        (format!("{}.val", b.name), index_text(&p.validation)),
        (format!("{}.test", b.name), index_text(&p.test)),
    ]
}
