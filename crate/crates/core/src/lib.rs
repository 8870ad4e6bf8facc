//! Lexical retrieval engine with TREC-style evaluation, run fusion, and a
//! Gaussian-process Bayesian optimizer over the engine's conditional
//! configuration space.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root fix the scalar to `f64`, which is what the command line
//! tool uses.

pub mod bayesopt;
pub mod error;
pub mod evaluation;
pub mod hyperspace;
pub mod index;
pub mod retrieval;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Ranking64 = retrieval::Ranking<f64>;
pub type RetrievalConfig64 = retrieval::RetrievalConfig<f64>;
pub type WeightedQuery64 = retrieval::WeightedQuery<f64>;
pub type RunFile64 = evaluation::RunFile<f64>;
pub type MeasureReport64 = evaluation::MeasureReport<f64>;
pub type ConfigPoint64 = hyperspace::ConfigPoint<f64>;
pub type EncodedPoint64 = hyperspace::EncodedPoint<f64>;
pub type GpModel64 = bayesopt::GpModel<f64>;
pub type GpModel32 = bayesopt::GpModel<f32>;
pub type BoState64 = bayesopt::BoState<f64>;
