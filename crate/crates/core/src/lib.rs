//! Persistent homology of weighted ordinal partition networks.
//!
//! The pipeline runs from a scalar time series to a dynamic-state verdict:
//!
//! 1. [`dynsys`] simulates registry flows and injects bounded noise.
//! 2. [`opn`] turns a signal into its ordinal partition network.
//! 3. [`graphdist`] derives vertex distance matrices from the weighted graph.
//! 4. [`persistence`] computes the H0/H1 Rips persistence diagrams.
//! 5. [`diagmetric`] compares diagrams with the bottleneck distance.
//! 6. [`analysis`] embeds the diagram distances with SMACOF and separates
//!    periodic from chaotic states with an RBF support vector machine.
//!
//! [`experiment`] wires these stages into the batch runs exposed by the
//! `wopn` command line tool.

pub mod analysis;
pub mod diagmetric;
pub mod dynsys;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod graphdist;
pub mod io;
pub mod opn;
pub mod persistence;
pub mod rng;

pub use error::{Error, Result};
