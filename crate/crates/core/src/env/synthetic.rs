//! Synthetic cascading instance generator.
//!
//! Click probabilities are drawn so the first `k` items are the best ones:
//! `mu_i ~ U[2/(3k), 1/k]` for `i < k` and `mu_i ~ U[0, 1/(3k)]` otherwise.
//! The ground truth is `theta* = e1` and each feature vector is the
//! unit-norm `(mu_i, sqrt(1 - mu_i^2) * u_i)` with `u_i` a random unit
//! vector in the remaining `d - 1` dimensions, so `<theta*, phi(i)> = mu_i`
//! exactly and the context is constant across rounds.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::env::cascade::{CascadeEnv, CascadeKind};
use crate::error::{Error, Result};
use crate::model::{FeatureContext, LinearGroundTruth};
use crate::Real;

/// Serializable synthetic instance (the `gen` subcommand's JSON payload).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SyntheticCascadeInstance {
    pub kind: CascadeKind,
    pub num_arms: usize,
    pub slate_size: usize,
    pub dim: usize,
    pub theta: Vec<Real>,
    pub features: Vec<Vec<Real>>,
    pub means: Vec<Real>,
}

impl SyntheticCascadeInstance {
    pub fn into_env(self) -> Result<CascadeEnv> {
        let gt = LinearGroundTruth::new(self.theta)?;
        let ctx = FeatureContext::new(self.features)?;
        CascadeEnv::new(self.kind, self.slate_size, gt, ctx)
    }
}

pub fn gen_synthetic_cascade<R: Rng + ?Sized>(
    num_arms: usize,
    slate_size: usize,
    dim: usize,
    rng: &mut R,
) -> Result<SyntheticCascadeInstance> {
    if dim < 2 {
        return Err(Error::InvalidArgument(
            "synthetic construction needs dimension >= 2".into(),
        ));
    }
    if slate_size == 0 || slate_size > num_arms {
        return Err(Error::InvalidArgument(
            "slate size must be in [1, num_arms]".into(),
        ));
    }
    let k = slate_size as Real;
    let mut means = Vec::with_capacity(num_arms);
    for i in 0..num_arms {
        let mu = if i < slate_size {
            rng.gen_range(2.0 / (3.0 * k)..1.0 / k)
        } else {
            rng.gen_range(0.0..1.0 / (3.0 * k))
        };
        means.push(mu);
    }

    let mut theta = vec![0.0; dim];
    theta[0] = 1.0;

    let mut features = Vec::with_capacity(num_arms);
    for &mu in &means {
        let u = random_unit_vector(dim - 1, rng);
        let scale = (1.0 - mu * mu).sqrt();
        let mut phi = Vec::with_capacity(dim);
        phi.push(mu);
        phi.extend(u.iter().map(|v| v * scale));
        features.push(phi);
    }

    Ok(SyntheticCascadeInstance {
        kind: CascadeKind::Disjunctive,
        num_arms,
        slate_size,
        dim,
        theta,
        features,
        means,
    })
}

fn random_unit_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Real> {
    loop {
        // Gaussian via Box-Muller keeps the direction uniform.
        let v: Vec<Real> = (0..dim).map(|_| standard_normal(rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<Real>().sqrt();
        if norm > 1e-12 {
            return v.iter().map(|x| x / norm).collect();
        }
    }
}

fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Real {
    let u1: Real = rng.gen_range(Real::MIN_POSITIVE..1.0);
    let u2: Real = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{arm_means, dot, l2_norm};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn means_in_documented_ranges() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let inst = gen_synthetic_cascade(100, 10, 4, &mut rng).unwrap();
        for (i, &mu) in inst.means.iter().enumerate() {
            assert!(mu <= 0.1 + 1e-12, "mu_{i} = {mu} exceeds 1/K");
            if i < 10 {
                assert!(mu >= 2.0 / 30.0, "top item {i} below 2/(3K)");
            } else {
                assert!(mu <= 1.0 / 30.0, "tail item {i} above 1/(3K)");
            }
        }
        // Top-K items are exactly indices 0..K-1.
        let worst_top = inst.means[..10].iter().cloned().fold(1.0, Real::min);
        let best_tail = inst.means[10..].iter().cloned().fold(0.0, Real::max);
        assert!(worst_top > best_tail);
    }

    #[test]
    fn features_unit_norm_and_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let inst = gen_synthetic_cascade(30, 5, 6, &mut rng).unwrap();
        for (phi, &mu) in inst.features.iter().zip(&inst.means) {
            assert!((l2_norm(phi) - 1.0).abs() < 1e-12);
            assert!((dot(&inst.theta, phi) - mu).abs() < 1e-12);
        }
        let env = inst.clone().into_env().unwrap();
        let recovered = arm_means(env.ground_truth(), env.feature_context()).unwrap();
        for (a, b) in recovered.iter().zip(&inst.means) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_degenerate_dimension() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(gen_synthetic_cascade(10, 2, 1, &mut rng).is_err());
    }
}
