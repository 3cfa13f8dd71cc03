//! Cascading slate environments: the user scans an ordered list and stops
//! at the first success (disjunctive) or the first failure (conjunctive).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{
    arm_means, Action, ActionSpace, Environment, FeatureContext, Feedback, LinearGroundTruth,
};
use crate::oracle::{OfflineOracle, TopKOracle};
use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CascadeKind {
    /// Reward 1 when at least one scanned outcome is 1.
    Disjunctive,
    /// Reward 1 when all scanned outcomes are 1.
    Conjunctive,
}

/// Slate environment with a fixed feature context and linear ground truth.
#[derive(Debug, Clone)]
pub struct CascadeEnv {
    kind: CascadeKind,
    slate_size: usize,
    gt: LinearGroundTruth,
    ctx: FeatureContext,
    means: Vec<Real>,
}

impl CascadeEnv {
    pub fn new(
        kind: CascadeKind,
        slate_size: usize,
        gt: LinearGroundTruth,
        ctx: FeatureContext,
    ) -> Result<Self> {
        assert!(
            slate_size >= 1 && slate_size <= ctx.num_arms(),
            "slate size must be in [1, m]"
        );
        let means = arm_means(&gt, &ctx)?;
        Ok(Self {
            kind,
            slate_size,
            gt,
            ctx,
            means,
        })
    }

    /// Convenience constructor from explicit means via the one-hot lift.
    pub fn from_means(kind: CascadeKind, slate_size: usize, mu: &[Real]) -> Result<Self> {
        let (gt, ctx) = crate::model::one_hot_lift(mu);
        Self::new(kind, slate_size, gt, ctx)
    }

    pub fn kind(&self) -> CascadeKind {
        self.kind
    }

    pub fn slate_size(&self) -> usize {
        self.slate_size
    }

    pub fn ground_truth(&self) -> &LinearGroundTruth {
        &self.gt
    }

    pub fn feature_context(&self) -> &FeatureContext {
        &self.ctx
    }

    pub fn means(&self) -> &[Real] {
        &self.means
    }
}

/// `1 - prod_j (1 - mu_j)` over the slate.
pub fn disjunctive_expected_reward(action: &Action, mu: &[Real]) -> Real {
    1.0 - action.items.iter().map(|&i| 1.0 - mu[i]).product::<Real>()
}

/// `prod_j mu_j` over the slate.
pub fn conjunctive_expected_reward(action: &Action, mu: &[Real]) -> Real {
    action.items.iter().map(|&i| mu[i]).product::<Real>()
}

/// Probability the arm at the given slate is scanned: the product of
/// continuation probabilities of the arms listed before it.
pub fn cascade_triggering_prob(
    kind: CascadeKind,
    arm: usize,
    action: &Action,
    mu: &[Real],
) -> Real {
    let Some(pos) = action.items.iter().position(|&j| j == arm) else {
        return 0.0;
    };
    action.items[..pos]
        .iter()
        .map(|&j| match kind {
            CascadeKind::Disjunctive => 1.0 - mu[j],
            CascadeKind::Conjunctive => mu[j],
        })
        .product()
}

impl Environment for CascadeEnv {
    fn num_arms(&self) -> usize {
        self.ctx.num_arms()
    }

    fn batch_bound(&self) -> usize {
        self.slate_size
    }

    fn action_space(&self) -> ActionSpace {
        ActionSpace::Slate {
            num_arms: self.ctx.num_arms(),
            slate_size: self.slate_size,
        }
    }

    fn context(&self, _t: u64, _rng: &mut dyn rand::RngCore) -> FeatureContext {
        self.ctx.clone()
    }

    fn true_means(&self, _t: u64) -> Vec<Real> {
        self.means.clone()
    }

    fn play(&self, _t: u64, action: &Action, rng: &mut dyn rand::RngCore) -> Result<Feedback> {
        action.validate(self.num_arms(), self.slate_size)?;
        let mut triggered = Vec::new();
        let mut outcomes = Vec::new();
        let mut stop_seen = false;
        for &i in &action.items {
            let x = rng.gen_bool(self.means[i]);
            triggered.push(i);
            outcomes.push(x);
            let stops = match self.kind {
                CascadeKind::Disjunctive => x,
                CascadeKind::Conjunctive => !x,
            };
            if stops {
                stop_seen = true;
                break;
            }
        }
        let reward = match self.kind {
            CascadeKind::Disjunctive => stop_seen as u8 as Real,
            CascadeKind::Conjunctive => !stop_seen as u8 as Real,
        };
        Ok(Feedback::new(triggered, outcomes, reward))
    }

    fn expected_reward(&self, action: &Action, mu: &[Real]) -> Real {
        match self.kind {
            CascadeKind::Disjunctive => disjunctive_expected_reward(action, mu),
            CascadeKind::Conjunctive => conjunctive_expected_reward(action, mu),
        }
    }

    fn triggering_prob(&self, arm: usize, action: &Action, mu: &[Real]) -> Real {
        cascade_triggering_prob(self.kind, arm, action, mu)
    }

    fn alpha_beta(&self) -> (Real, Real) {
        // Top-k is exact for the product-form slate rewards.
        (1.0, 1.0)
    }

    fn oracle(&self) -> Box<dyn OfflineOracle> {
        Box::new(TopKOracle::new(self.slate_size))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn disj(mu: &[Real], k: usize) -> CascadeEnv {
        CascadeEnv::from_means(CascadeKind::Disjunctive, k, mu).unwrap()
    }

    #[test]
    fn disjunctive_reward_values() {
        let a = Action::ordered(vec![0, 1, 2]);
        assert!((disjunctive_expected_reward(&a, &[0.5, 0.5, 0.5]) - 0.875).abs() < 1e-15);
        assert!((disjunctive_expected_reward(&a, &[0.3, 1.0, 0.2]) - 1.0).abs() < 1e-15);
        let b = Action::ordered(vec![0, 1]);
        assert!((disjunctive_expected_reward(&b, &[0.2, 0.3]) - 0.44).abs() < 1e-15);
    }

    #[test]
    fn conjunctive_reward_values() {
        let a = Action::ordered(vec![0, 1]);
        assert!((conjunctive_expected_reward(&a, &[0.9, 0.8]) - 0.72).abs() < 1e-15);
        assert_eq!(conjunctive_expected_reward(&a, &[0.9, 0.0]), 0.0);
    }

    #[test]
    fn disjunctive_triggering_positions() {
        let a = Action::ordered(vec![4, 1, 3]);
        let mu = [0.0, 0.5, 0.0, 0.9, 0.5];
        let p1 = cascade_triggering_prob(CascadeKind::Disjunctive, 4, &a, &mu);
        assert_eq!(p1, 1.0);
        let p3 = cascade_triggering_prob(CascadeKind::Disjunctive, 3, &a, &mu);
        assert!((p3 - 0.25).abs() < 1e-15);
        // arm not in the slate
        assert_eq!(
            cascade_triggering_prob(CascadeKind::Disjunctive, 0, &a, &mu),
            0.0
        );
    }

    #[test]
    fn conjunctive_triggering_positions() {
        let a = Action::ordered(vec![0, 1]);
        let mu = [0.9, 0.4];
        let p = cascade_triggering_prob(CascadeKind::Conjunctive, 1, &a, &mu);
        assert!((p - 0.9).abs() < 1e-15);
    }

    #[test]
    fn disjunctive_play_stops_at_first_click() {
        // Deterministic means isolate the stopping rule.
        let env = disj(&[0.0, 1.0, 0.5], 3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let fb = env
            .play(1, &Action::ordered(vec![0, 1, 2]), &mut rng)
            .unwrap();
        assert_eq!(fb.triggered, vec![0, 1]);
        assert_eq!(fb.outcomes, vec![false, true]);
        assert_eq!(fb.realized_reward, 1.0);
    }

    #[test]
    fn disjunctive_play_all_misses() {
        let env = disj(&[0.0, 0.0, 0.0], 3);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let fb = env
            .play(1, &Action::ordered(vec![2, 0, 1]), &mut rng)
            .unwrap();
        assert_eq!(fb.triggered, vec![2, 0, 1]);
        assert_eq!(fb.realized_reward, 0.0);
    }

    #[test]
    fn disjunctive_play_first_click() {
        let env = disj(&[1.0, 0.3, 0.3], 3);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let fb = env
            .play(1, &Action::ordered(vec![0, 1, 2]), &mut rng)
            .unwrap();
        assert_eq!(fb.triggered, vec![0]);
        assert_eq!(fb.realized_reward, 1.0);
    }

    #[test]
    fn conjunctive_play_stops_at_first_failure() {
        let env = CascadeEnv::from_means(CascadeKind::Conjunctive, 3, &[1.0, 0.0, 0.5]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let fb = env
            .play(1, &Action::ordered(vec![0, 1, 2]), &mut rng)
            .unwrap();
        assert_eq!(fb.triggered, vec![0, 1]);
        assert_eq!(fb.outcomes, vec![true, false]);
        assert_eq!(fb.realized_reward, 0.0);
    }

    #[test]
    fn play_rejects_malformed_actions() {
        let env = disj(&[0.5, 0.5, 0.5], 2);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(env.play(1, &Action::ordered(vec![0]), &mut rng).is_err());
        assert!(env.play(1, &Action::ordered(vec![0, 0]), &mut rng).is_err());
        assert!(env.play(1, &Action::ordered(vec![0, 9]), &mut rng).is_err());
    }
}
