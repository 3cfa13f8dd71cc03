//! Randomized property tests.

use proptest::prelude::*;

use ccbandit::env::cascade::{CascadeEnv, CascadeKind};
use ccbandit::linalg::RegressionState;
use ccbandit::model::{Action, Environment};
use ccbandit::oracle::top_k;
use ccbandit::Real;

proptest! {
    #[test]
    fn disjunctive_reward_bounds_and_monotonicity(
        mu in proptest::collection::vec(0.0..1.0f64, 2..8),
        bump in 0.0..1.0f64,
        idx in 0usize..8,
    ) {
        let k = mu.len().min(3);
        let env = CascadeEnv::from_means(CascadeKind::Disjunctive, k, &mu).unwrap();
        let action = Action::ordered((0..k).collect());
        let r = env.expected_reward(&action, &mu);
        let slate_max = action.items.iter().map(|&i| mu[i]).fold(0.0, Real::max);
        let slate_sum: Real = action.items.iter().map(|&i| mu[i]).sum();
        prop_assert!(r >= slate_max - 1e-12);
        prop_assert!(r <= slate_sum.min(1.0) + 1e-12);

        let i = idx % mu.len();
        let mut raised = mu.clone();
        raised[i] = (raised[i] + bump * (1.0 - raised[i])).min(1.0);
        prop_assert!(env.expected_reward(&action, &raised) >= r - 1e-12);
    }

    #[test]
    fn ellipsoid_norm_never_grows_with_data(
        phis in proptest::collection::vec(
            proptest::collection::vec(-0.5..0.5f64, 3), 1..12),
        probe in proptest::collection::vec(-0.5..0.5f64, 3),
        weight in 0.1..20.0f64,
    ) {
        let mut state = RegressionState::new(3, 1.0).unwrap();
        let mut last = state.ellipsoid_norm(&probe).unwrap();
        for phi in &phis {
            state.weighted_rank_one_update(phi, 1.0, weight).unwrap();
            let now = state.ellipsoid_norm(&probe).unwrap();
            prop_assert!(now <= last + 1e-10);
            last = now;
        }
    }

    #[test]
    fn top_k_value_dominates_any_other_slate(
        mu in proptest::collection::vec(0.0..1.0f64, 3..8),
        other in proptest::collection::vec(0usize..8, 2),
    ) {
        let env = CascadeEnv::from_means(CascadeKind::Disjunctive, 2, &mu).unwrap();
        let best = top_k(&mu, 2).unwrap();
        let a = other[0] % mu.len();
        let mut b = other[1] % mu.len();
        if a == b {
            b = (b + 1) % mu.len();
        }
        let alt = Action::ordered(vec![a, b]);
        prop_assert!(
            env.expected_reward(&best, &mu) >= env.expected_reward(&alt, &mu) - 1e-12
        );
    }
}
