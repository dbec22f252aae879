//! Prediction intervals for subgraph counts and the clustering coefficient of
//! a stochastic-block-model population observed through Bernoulli node
//! sampling with induced or ego-centric subgraph formation.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod counting;
pub mod error;
pub mod estimation;
pub mod graph;
pub mod harness;
pub mod inference;
pub mod io;
pub mod pattern;
pub mod rng;
pub mod sampling;
pub mod sbm;
pub mod sparse;

pub use error::{Error, Result};
