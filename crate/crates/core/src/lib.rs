//! Exploring networks with biased random walks and measuring how well
//! local properties survive co-occurrence reconstruction of the walk.
//!
//! The pipeline: [`generators`] or [`io`] produce a [`Graph`]; [`dynamics`]
//! walks it; [`reconstruct`] turns the walk back into a graph; [`metrics`],
//! [`community`] and [`analysis`] compare original and reconstruction; and
//! [`experiment`] sweeps all of it over a configuration grid.

pub mod analysis;
pub mod community;
pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod generators;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod partition;
pub mod reconstruct;
pub mod seed;

pub use error::{Error, Result};
pub use graph::{Graph, NodeId};
pub use partition::Partition;
