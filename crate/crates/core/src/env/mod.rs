//! Bundled environment implementations.

pub mod cascade;
pub mod oim;
pub mod pmc;
pub mod rating;
pub mod synthetic;

pub use cascade::{CascadeEnv, CascadeKind};
pub use oim::OimIcEnv;
pub use pmc::PmcBipartiteEnv;
pub use rating::RatingMatrixCascadeEnv;
pub use synthetic::{gen_synthetic_cascade, SyntheticCascadeInstance};
