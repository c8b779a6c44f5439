//! Mines frequent attribute-value itemsets from tabular data, scores each
//! subgroup by how far its outcome diverges from the whole dataset, and
//! attributes that divergence to individual items with exact Shapley values.
//!
//! The pipeline is: load a [`table::RawTable`] from CSV, discretize it into a
//! [`dataset::DiscretizedDataset`] with a [`discretize::DiscretizationSpec`],
//! evaluate an [`outcome::OutcomeVector`] over the kept rows, run
//! [`miner::mine`], and inspect or export the [`miner::MiningResult`].

pub mod dataset;
pub mod discretize;
pub mod error;
pub mod miner;
pub mod outcome;
pub mod report;
pub mod scalar;
pub mod shapley;
pub mod stats;
pub mod table;
#[cfg(feature = "test-utils")]
pub mod testutil;

pub use error::{Error, Result};
pub use miner::MineOptions;
pub use scalar::Scalar;

/// Default-precision aliases; the generic types live in their modules.
pub type OutcomeVector = outcome::OutcomeVector<f64>;
pub type RankValuation = outcome::RankValuation<f64>;
pub type MiningResult = miner::MiningResult<f64>;
pub type ItemsetRecord = miner::ItemsetRecord<f64>;
pub type SampleStats = stats::SampleStats<f64>;
pub type Attribution = shapley::Attribution<f64>;
