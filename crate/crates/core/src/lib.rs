// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod counterexamples;
pub mod error;
pub mod evolution;
pub mod linalg;
pub mod random;
pub mod scalar;

pub use error::{QslError, Result};
