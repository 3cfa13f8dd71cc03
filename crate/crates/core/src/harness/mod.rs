//! Experiment harness: configuration, deterministic seeding, runners,
//! and file ingestion.

pub mod config;
pub mod io;
pub mod run;

pub use config::{EnvConfig, EnvKind, ExperimentConfig, PolicyKind, PolicySpec, RegretReference};
pub use run::{contract_check, run_experiment, run_experiment_to_dir};

/// Deterministically mixes a base seed with two tags (splitmix64-style).
/// Used to derive independent per-(policy, replicate) stream seeds.
pub fn derive_seed(base: u64, a: u64, b: u64) -> u64 {
    let mut z = base
        .wrapping_mul(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(a.wrapping_mul(0xbf58_476d_1ce4_e5b9))
        .wrapping_add(b.wrapping_mul(0x94d0_49bb_1331_11eb))
        .wrapping_add(0x2545_f491_4f6c_dd1d);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
