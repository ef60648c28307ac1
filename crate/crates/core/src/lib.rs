//! Tensor-train decompositions with fiber-wise subtensor sampling.
//!
//! The crate computes incoherence, condition numbers and the α/β inheritance
//! parameters of sampled TT subtensors through interface matrices, so no
//! tensor is ever densified, and checks every inheritance bound numerically.

pub mod cli;
pub mod error;
pub mod experiment;
pub mod generators;
pub mod linalg;
pub mod multiindex;
pub mod oracle;
pub mod properties;
pub mod tt;

pub use error::{Error, Result};
