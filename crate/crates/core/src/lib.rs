//! Contextual combinatorial bandits with probabilistically triggered arms:
//! environments, offline oracles, learning policies, reward-smoothness
//! verification, and a deterministic experiment harness.

pub mod env;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod policy;
pub mod scalar;
pub mod verify;

/// Scalar type used by the simulation layer. The numerical core
/// ([`linalg`] and the confidence-radius computations) stays generic.
pub type Real = f64;

pub use error::{Error, Result};
pub use scalar::Scalar;
