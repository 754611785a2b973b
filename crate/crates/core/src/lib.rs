//! Polynomial gossip: accelerated distributed averaging on graphs.

pub mod error;
pub mod experiment;
pub mod gossip;
pub mod graph;
pub mod matrix;
pub mod orthopoly;
pub mod spectral;
pub mod stats;

pub use error::{Error, Result};
pub use graph::{Graph, GraphSpec};
pub use matrix::{build_gossip_matrix, GossipMatrix, MatrixKind};
