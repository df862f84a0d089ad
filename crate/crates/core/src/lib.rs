//! Simulation suite for channeled-proton induced spin entanglement studies:
//! paraxial beam transport in an axial crystal channel, hybrid
//! electron-nuclear spin dynamics, entangled-state construction and
//! measures, Poisson-noise state tomography with Monte-Carlo fidelity
//! statistics, and entanglement percolation over repeater networks.
//!
//! Every operation is deterministic given its configuration and seed;
//! parallel execution never changes results.

pub mod channeling;
pub mod config;
pub mod constants;
pub mod emit;
pub mod entanglement;
pub mod error;
pub mod percolation;
pub mod pipeline;
pub mod qmat;
pub mod rng;
pub mod special;
pub mod spin;
pub mod state;
pub mod tomography;

pub use error::{Error, Result};
pub use state::{DensityMatrix, PureState};

/// Version tag of the JSON config and output schemas.
pub const SCHEMA_VERSION: u32 = 1;
