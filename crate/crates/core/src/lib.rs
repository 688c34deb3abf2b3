//! Affiliation-network analysis: bipartite board/director data, weighted
//! one-mode projections, summary statistics, centrality rankings, k-core
//! shells, degree-preserving null models and SI spreading experiments.

pub mod centrality;
pub mod cli;
pub mod epidemic;
pub mod error;
pub mod graph;
pub mod ingest;
pub mod metrics;
pub mod projection;
pub mod structure;

pub use error::{Error, Result};
pub use graph::{build_bipartite, BipartiteNetwork, Edge, NodeIx, Weight, WeightedNetwork};
