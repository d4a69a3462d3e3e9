//! Attributed stochastic block models, closed-form GCN accuracy, and
//! Monte Carlo classifiers for node-classification phase maps.

// `!(x > 0.0)` style checks are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dataset;
pub mod error;
pub mod generators;
pub mod graph;
pub mod models;
pub mod restructure;
pub mod rng;
pub mod sweep;
pub mod theory;

pub use error::{Error, Result};
pub use graph::{Features, Graph, LabeledGraph, Labels};
pub use rng::RngStream;
