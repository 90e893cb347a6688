//! Numerical laboratory for completely multiplicative functions: partial
//! sums, pretentious distances, truncated Dirichlet series, generalized von
//! Mangoldt functions, fundamental-lemma sieve weights and a real-zero
//! locator, with a config-driven harness on top.

pub mod arith;
pub mod catalog;
pub mod compensated;
pub mod dirichlet;
pub mod distance;
pub mod error;
pub mod harness;
pub mod sieve_weights;
pub mod sums;

pub use catalog::{catalog_get, twist, FunctionSpec};
pub use error::{Error, Result};
