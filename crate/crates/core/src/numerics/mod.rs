//! Matrices, seeded randomness, activations and dense factorizations.

pub mod activation;
pub mod linalg;
pub mod matrix;
pub mod rng;

pub use activation::{activate, Activation};
pub use matrix::{concat_cols, Matrix};
pub use rng::{derive_seed, seeded_gaussian, seeded_uniform, RngState, Stream};
