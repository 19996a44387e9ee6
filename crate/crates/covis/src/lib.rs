//! Co-visitation hypergraphs from individual-level mobility trajectories.
//!
//! The pipeline: parse trajectory pings and aggregate them onto a coarse grid
//! ([`ingest`]), slide observation windows to turn per-individual visit sets
//! into a transaction bag ([`window`]), mine frequent location itemsets with
//! FP-Growth ([`mining`]), and lift the patterns into a weighted hypergraph
//! ([`hypergraph`]) whose structure and spatial layout are then analyzed
//! ([`analysis`], [`fitting`]) and compared across day ranges ([`phase`]).
//! [`synth`] generates seeded trajectories with planted co-visitation groups
//! as ground truth for tests and benchmarks.

pub mod analysis;
pub mod error;
pub mod fitting;
pub mod grid;
pub mod hypergraph;
pub mod ingest;
pub mod mining;
pub mod phase;
pub mod synth;
pub mod window;

pub use error::{Error, Result};
pub use grid::{Grid, GridSpec, LocationId};
pub use hypergraph::Hypergraph;
pub use ingest::VisitLog;
pub use mining::{MiningParams, MinSup, PatternSet};
pub use window::TransactionDataset;
