//! HHL-style linear solving of the discrete Poisson equation on a classical
//! state-vector simulator, with fixed-point eigenvalue amplification and
//! rotation-angle compression.

pub mod analytics;
pub mod circuit;
pub mod cli;
pub mod encoding;
pub mod error;
pub mod model;
pub mod noise;
pub mod simulator;

pub use error::{Error, Result};
