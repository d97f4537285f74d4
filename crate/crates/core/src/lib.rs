//! Set-valued uncertainty: regions as uncertainty sets, conditional maps as
//! relations, projection and Bayes laws, independence tests, DAG-factorized
//! networks with d-separation, scaling-variable point estimates and
//! set-membership filtering.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod estimate;
pub mod filters;
pub mod fixtures;
pub mod geometry;
pub mod network;
pub mod uncertainty;

pub use error::{Error, Result};
