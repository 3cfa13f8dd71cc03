//! Protocol-level properties: per-round contexts, batch-order
//! independence, and regret-row sanity on a forced action sequence.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ccbandit::env::cascade::{CascadeEnv, CascadeKind};
use ccbandit::linalg::RegressionState;
use ccbandit::model::{Action, ActionSpace, Environment, FeatureContext, Feedback};
use ccbandit::policy::{ContextualUcb, Policy, PolicyConfig};
use ccbandit::Real;

/// Wrapper that rotates the arm-to-feature assignment every round,
/// exercising the per-round context path the bundled environments never
/// use. True means rotate in lockstep so the linear model stays exact.
struct RotatingContext {
    inner: CascadeEnv,
    num_arms: usize,
}

impl RotatingContext {
    fn perm(&self, t: u64, i: usize) -> usize {
        (i + t as usize) % self.num_arms
    }
}

impl Environment for RotatingContext {
    fn num_arms(&self) -> usize {
        self.inner.num_arms()
    }

    fn batch_bound(&self) -> usize {
        self.inner.batch_bound()
    }

    fn action_space(&self) -> ActionSpace {
        self.inner.action_space()
    }

    fn context(&self, t: u64, rng: &mut dyn rand::RngCore) -> FeatureContext {
        let base = self.inner.context(t, rng);
        let rows: Vec<Vec<Real>> = (0..self.num_arms)
            .map(|i| base.feature(self.perm(t, i)).to_vec())
            .collect();
        FeatureContext::new(rows).unwrap()
    }

    fn true_means(&self, t: u64) -> Vec<Real> {
        let base = self.inner.true_means(t);
        (0..self.num_arms).map(|i| base[self.perm(t, i)]).collect()
    }

    fn play(&self, t: u64, action: &Action, rng: &mut dyn rand::RngCore) -> ccbandit::Result<Feedback> {
        let mapped = Action::ordered(action.items.iter().map(|&i| self.perm(t, i)).collect());
        let fb = self.inner.play(t, &mapped, rng)?;
        // map triggered arms back into the round-t index space
        let back: Vec<usize> = fb
            .triggered
            .iter()
            .map(|&j| (j + self.num_arms - (t as usize % self.num_arms)) % self.num_arms)
            .collect();
        Ok(Feedback::new(back, fb.outcomes, fb.realized_reward))
    }

    fn expected_reward(&self, action: &Action, mu: &[Real]) -> Real {
        self.inner.expected_reward(action, mu)
    }

    fn triggering_prob(&self, arm: usize, action: &Action, mu: &[Real]) -> Real {
        self.inner.triggering_prob(arm, action, mu)
    }

    fn alpha_beta(&self) -> (Real, Real) {
        self.inner.alpha_beta()
    }

    fn oracle(&self) -> Box<dyn ccbandit::oracle::OfflineOracle> {
        self.inner.oracle()
    }
}

#[test]
fn contextual_policy_tracks_rotating_contexts() {
    let mu = [0.08, 0.05, 0.02, 0.01, 0.015, 0.03];
    let inner = CascadeEnv::from_means(CascadeKind::Disjunctive, 2, &mu).unwrap();
    let env = RotatingContext {
        num_arms: inner.num_arms(),
        inner,
    };
    let horizon = 3_000u64;
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let oracle = env.oracle();
    let mut policy = ContextualUcb::new(PolicyConfig {
        exploration_scale: 0.05,
        ..PolicyConfig::contextual(env.num_arms(), 2, horizon)
    })
    .unwrap();
    let mut late_regret = 0.0;
    let mut late_rounds = 0u64;
    for t in 1..=horizon {
        let ctx = env.context(t, &mut rng);
        let action = policy.select(t, &ctx, oracle.as_ref()).unwrap();
        let fb = env.play(t, &action, &mut rng).unwrap();
        policy.update(&ctx, &fb).unwrap();
        let means = env.true_means(t);
        let best = {
            let a = oracle.select(&means);
            env.expected_reward(&a, &means)
        };
        if t > horizon / 2 {
            late_regret += best - env.expected_reward(&action, &means);
            late_rounds += 1;
        }
    }
    let per_round = late_regret / late_rounds as Real;
    assert!(
        per_round < 0.01,
        "late per-round regret {per_round} under rotating contexts"
    );
}

#[test]
fn regression_updates_are_batch_order_independent() {
    let obs: Vec<(Vec<Real>, Real, Real)> = vec![
        (vec![0.6, 0.2, 0.1], 1.0, 4.0),
        (vec![0.1, 0.7, 0.2], 0.0, 11.2),
        (vec![0.3, 0.3, 0.5], 1.0, 6.5),
        (vec![0.9, 0.0, 0.1], 0.0, 4.0),
    ];
    let mut forward = RegressionState::new(3, 2.0).unwrap();
    for (phi, y, w) in &obs {
        forward.weighted_rank_one_update(phi, *y, *w).unwrap();
    }
    let mut backward = RegressionState::new(3, 2.0).unwrap();
    for (phi, y, w) in obs.iter().rev() {
        backward.weighted_rank_one_update(phi, *y, *w).unwrap();
    }
    let a = forward.solve_theta().unwrap().to_vec();
    let b = backward.solve_theta().unwrap().to_vec();
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn forced_action_regret_rows() {
    // The regret accounting example: playing {1,2} against optimum {0,2}.
    let mu = [0.9, 0.1, 0.5];
    let env = CascadeEnv::from_means(CascadeKind::Disjunctive, 2, &mu).unwrap();
    let opt = env.expected_reward(&Action::ordered(vec![0, 2]), &mu);
    let played = env.expected_reward(&Action::ordered(vec![1, 2]), &mu);
    assert!((opt - played - 0.40).abs() < 1e-12);
}
