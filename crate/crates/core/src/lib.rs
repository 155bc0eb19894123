//! Randomized shallow and deep networks with closed-form training.
//!
//! `no_std` with `alloc`. File formats, the benchmark harness and the CLI
//! live in the companion `rvfl` crate.

// `!(x > 0.0)` is used on purpose so NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod autoencoder;
pub mod data;
pub mod deep;
pub mod error;
pub mod model;
pub mod numerics;
pub mod select;
pub mod shallow;
pub mod solvers;
pub mod stats;

pub use error::{Error, Result};
