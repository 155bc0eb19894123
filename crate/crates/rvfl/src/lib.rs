//! File formats, the benchmark driver and the `rvfl` command line on top
//! of [`rvfl_core`].
//!
//! - [`io`]: delimited data, partition index files, dataset manifests
//! - [`model_file`]: versioned JSON model container
//! - [`config`]: TOML run configuration
//! - [`bench`], [`train`], [`sweep`], [`report`]: the CLI subcommands

pub mod bench;
pub mod builtin;
pub mod config;
pub mod error;
pub mod io;
pub mod model_file;
pub mod report;
pub mod results;
pub mod runtime;
pub mod sweep;
pub mod train;

pub use error::{Error, Result};

/// `s` with everything but ASCII alphanumerics and `-` replaced by `_`.
pub(crate) fn file_stem(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' }).collect()
}
