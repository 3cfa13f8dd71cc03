//! Rating-matrix cascade: a disjunctive slate where each round samples one
//! user uniformly and replays that user's recorded binary ratings instead
//! of drawing from a Bernoulli model. Regret accounting treats the
//! empirical per-item click rates as the mean vector.

use rand::Rng;

use crate::env::cascade::{cascade_triggering_prob, disjunctive_expected_reward, CascadeKind};
use crate::error::{Error, Result};
use crate::model::{Action, ActionSpace, Environment, FeatureContext, Feedback};
use crate::oracle::{OfflineOracle, TopKOracle};
use crate::Real;

#[derive(Debug, Clone)]
pub struct RatingMatrixCascadeEnv {
    features: FeatureContext,
    /// `ratings[item][user]`
    ratings: Vec<Vec<bool>>,
    num_users: usize,
    slate_size: usize,
    click_rates: Vec<Real>,
}

impl RatingMatrixCascadeEnv {
    pub fn new(
        features: FeatureContext,
        ratings: Vec<Vec<bool>>,
        slate_size: usize,
    ) -> Result<Self> {
        let m = features.num_arms();
        if ratings.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: ratings.len(),
            });
        }
        let num_users = ratings.first().map(|r| r.len()).unwrap_or(0);
        if num_users == 0 {
            return Err(Error::InvalidArgument("rating matrix has no users".into()));
        }
        if ratings.iter().any(|r| r.len() != num_users) {
            return Err(Error::InvalidArgument(
                "ragged rating matrix (items disagree on user count)".into(),
            ));
        }
        if slate_size == 0 || slate_size > m {
            return Err(Error::InvalidArgument(
                "slate size must be in [1, m]".into(),
            ));
        }
        let click_rates = ratings
            .iter()
            .map(|row| row.iter().filter(|b| **b).count() as Real / num_users as Real)
            .collect();
        Ok(Self {
            features,
            ratings,
            num_users,
            slate_size,
            click_rates,
        })
    }

    pub fn click_rates(&self) -> &[Real] {
        &self.click_rates
    }

    pub fn num_users(&self) -> usize {
        self.num_users
    }
}

impl Environment for RatingMatrixCascadeEnv {
    fn num_arms(&self) -> usize {
        self.features.num_arms()
    }

    fn batch_bound(&self) -> usize {
        self.slate_size
    }

    fn action_space(&self) -> ActionSpace {
        ActionSpace::Slate {
            num_arms: self.features.num_arms(),
            slate_size: self.slate_size,
        }
    }

    fn context(&self, _t: u64, _rng: &mut dyn rand::RngCore) -> FeatureContext {
        self.features.clone()
    }

    fn true_means(&self, _t: u64) -> Vec<Real> {
        self.click_rates.clone()
    }

    fn play(&self, _t: u64, action: &Action, rng: &mut dyn rand::RngCore) -> Result<Feedback> {
        action.validate(self.num_arms(), self.slate_size)?;
        let user = rng.gen_range(0..self.num_users);
        let mut triggered = Vec::new();
        let mut outcomes = Vec::new();
        let mut clicked = false;
        for &i in &action.items {
            let x = self.ratings[i][user];
            triggered.push(i);
            outcomes.push(x);
            if x {
                clicked = true;
                break;
            }
        }
        Ok(Feedback::new(triggered, outcomes, clicked as u8 as Real))
    }

    fn expected_reward(&self, action: &Action, mu: &[Real]) -> Real {
        disjunctive_expected_reward(action, mu)
    }

    fn triggering_prob(&self, arm: usize, action: &Action, mu: &[Real]) -> Real {
        cascade_triggering_prob(CascadeKind::Disjunctive, arm, action, mu)
    }

    fn alpha_beta(&self) -> (Real, Real) {
        (1.0, 1.0)
    }

    fn oracle(&self) -> Box<dyn OfflineOracle> {
        Box::new(TopKOracle::new(self.slate_size))
    }
}
