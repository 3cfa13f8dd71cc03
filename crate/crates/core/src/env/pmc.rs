//! Probabilistic maximum coverage over a bipartite graph. Base arms are
//! edges; an action picks `k` sources, which deterministically triggers
//! every incident edge (semi-bandit feedback).

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{
    arm_means, Action, ActionSpace, Environment, FeatureContext, Feedback, LinearGroundTruth,
};
use crate::oracle::{GreedyCoverageOracle, OfflineOracle};
use crate::Real;

#[derive(Debug, Clone)]
pub struct PmcBipartiteEnv {
    num_sources: usize,
    num_targets: usize,
    /// Arm `e` is the edge `edges[e] = (source, target)`.
    edges: Vec<(usize, usize)>,
    seed_budget: usize,
    gt: LinearGroundTruth,
    ctx: FeatureContext,
    means: Vec<Real>,
}

impl PmcBipartiteEnv {
    pub fn new(
        num_sources: usize,
        num_targets: usize,
        edges: Vec<(usize, usize)>,
        seed_budget: usize,
        gt: LinearGroundTruth,
        ctx: FeatureContext,
    ) -> Result<Self> {
        if ctx.num_arms() != edges.len() {
            return Err(Error::DimensionMismatch {
                expected: edges.len(),
                got: ctx.num_arms(),
            });
        }
        if seed_budget == 0 || seed_budget > num_sources {
            return Err(Error::InvalidArgument(
                "seed budget must be in [1, |L|]".into(),
            ));
        }
        for &(u, v) in &edges {
            if u >= num_sources || v >= num_targets {
                return Err(Error::InvalidArgument(format!(
                    "edge ({u},{v}) outside L={num_sources}, V={num_targets}"
                )));
            }
        }
        let means = arm_means(&gt, &ctx)?;
        Ok(Self {
            num_sources,
            num_targets,
            edges,
            seed_budget,
            gt,
            ctx,
            means,
        })
    }

    /// Edge means given directly; features become one-hot.
    pub fn from_means(
        num_sources: usize,
        num_targets: usize,
        edges: Vec<(usize, usize)>,
        seed_budget: usize,
        mu: &[Real],
    ) -> Result<Self> {
        let (gt, ctx) = crate::model::one_hot_lift(mu);
        Self::new(num_sources, num_targets, edges, seed_budget, gt, ctx)
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn num_sources(&self) -> usize {
        self.num_sources
    }

    pub fn num_targets(&self) -> usize {
        self.num_targets
    }

    pub fn seed_budget(&self) -> usize {
        self.seed_budget
    }

    pub fn ground_truth(&self) -> &LinearGroundTruth {
        &self.gt
    }

    fn incident_edges(&self, sources: &[usize]) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, (u, _))| sources.contains(u))
            .map(|(e, _)| e)
            .collect()
    }
}

/// `sum_v (1 - prod_{u in S, (u,v) in E} (1 - mu_uv))`.
pub fn pmc_expected_reward(
    edges: &[(usize, usize)],
    num_targets: usize,
    sources: &[usize],
    mu: &[Real],
) -> Real {
    let mut miss = vec![1.0; num_targets];
    for (e, &(u, v)) in edges.iter().enumerate() {
        if sources.contains(&u) {
            miss[v] *= 1.0 - mu[e];
        }
    }
    miss.iter().map(|p| 1.0 - p).sum()
}

impl Environment for PmcBipartiteEnv {
    fn num_arms(&self) -> usize {
        self.edges.len()
    }

    fn batch_bound(&self) -> usize {
        // Largest number of edges incident to any k sources.
        let mut degree = vec![0usize; self.num_sources];
        for &(u, _) in &self.edges {
            degree[u] += 1;
        }
        degree.sort_unstable_by(|a, b| b.cmp(a));
        degree.iter().take(self.seed_budget).sum()
    }

    fn action_space(&self) -> ActionSpace {
        ActionSpace::Seeds {
            candidates: self.num_sources,
            seeds: self.seed_budget,
        }
    }

    fn context(&self, _t: u64, _rng: &mut dyn rand::RngCore) -> FeatureContext {
        self.ctx.clone()
    }

    fn true_means(&self, _t: u64) -> Vec<Real> {
        self.means.clone()
    }

    fn play(&self, _t: u64, action: &Action, rng: &mut dyn rand::RngCore) -> Result<Feedback> {
        action.validate(self.num_sources, self.seed_budget)?;
        let triggered = self.incident_edges(&action.items);
        let outcomes: Vec<bool> = triggered
            .iter()
            .map(|&e| rng.gen_bool(self.means[e]))
            .collect();
        let mut hit = vec![false; self.num_targets];
        for (&e, &x) in triggered.iter().zip(&outcomes) {
            if x {
                hit[self.edges[e].1] = true;
            }
        }
        let reward = hit.iter().filter(|h| **h).count() as Real;
        Ok(Feedback::new(triggered, outcomes, reward))
    }

    fn expected_reward(&self, action: &Action, mu: &[Real]) -> Real {
        pmc_expected_reward(&self.edges, self.num_targets, &action.items, mu)
    }

    fn triggering_prob(&self, arm: usize, action: &Action, _mu: &[Real]) -> Real {
        // Deterministic semi-bandit triggering.
        if action.items.contains(&self.edges[arm].0) {
            1.0
        } else {
            0.0
        }
    }

    fn alpha_beta(&self) -> (Real, Real) {
        (1.0 - (-1.0 as Real).exp(), 1.0)
    }

    fn oracle(&self) -> Box<dyn OfflineOracle> {
        Box::new(GreedyCoverageOracle::new(
            self.num_sources,
            self.num_targets,
            self.edges.clone(),
            self.seed_budget,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn expected_reward_examples() {
        // Two sources into one target, both edges mu = 0.5.
        let edges = vec![(0, 0), (1, 0)];
        let r = pmc_expected_reward(&edges, 1, &[0, 1], &[0.5, 0.5]);
        assert!((r - 0.75).abs() < 1e-15);

        // A target untouched by S contributes zero.
        let edges2 = vec![(0, 0), (1, 1)];
        let r2 = pmc_expected_reward(&edges2, 2, &[0], &[0.4, 0.9]);
        assert!((r2 - 0.4).abs() < 1e-15);

        // Single edge.
        let r3 = pmc_expected_reward(&[(0, 0)], 1, &[0], &[0.3]);
        assert!((r3 - 0.3).abs() < 1e-15);
    }

    #[test]
    fn triggering_is_deterministic_incidence() {
        let env =
            PmcBipartiteEnv::from_means(2, 1, vec![(0, 0), (1, 0)], 1, &[0.5, 0.5]).unwrap();
        let a = Action::seed_set(vec![0]);
        assert_eq!(env.triggering_prob(0, &a, &[0.5, 0.5]), 1.0);
        assert_eq!(env.triggering_prob(1, &a, &[0.5, 0.5]), 0.0);

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..5 {
            let fb = env.play(1, &a, &mut rng).unwrap();
            assert_eq!(fb.triggered, vec![0]);
        }
    }

    #[test]
    fn play_reward_counts_activated_targets() {
        let env = PmcBipartiteEnv::from_means(
            2,
            2,
            vec![(0, 0), (0, 1), (1, 1)],
            2,
            &[1.0, 0.0, 1.0],
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let fb = env.play(1, &Action::seed_set(vec![0, 1]), &mut rng).unwrap();
        assert_eq!(fb.realized_reward, 2.0);
        assert_eq!(fb.triggered.len(), 3);
    }
}
