//! Protocol types: linear ground truth, per-round feature contexts,
//! actions, feedback, and the environment contract.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Real;

pub const NORM_SLACK: Real = 1e-12;
pub const MEAN_SLACK: Real = 1e-9;

/// Unknown parameter vector the arm means are linear in.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinearGroundTruth {
    theta: Vec<Real>,
    /// Set for one-hot lifted instances, where the unit-norm requirement is
    /// deliberately relaxed (the reduction is exact regardless).
    norm_relaxed: bool,
}

impl LinearGroundTruth {
    pub fn new(theta: Vec<Real>) -> Result<Self> {
        let norm = l2_norm(&theta);
        if norm > 1.0 + NORM_SLACK {
            return Err(Error::InvalidArgument(format!(
                "parameter vector norm {norm} exceeds 1"
            )));
        }
        Ok(Self {
            theta,
            norm_relaxed: false,
        })
    }

    /// Constructor for lifted instances; skips the unit-norm check and
    /// flags the relaxation.
    pub fn new_relaxed(theta: Vec<Real>) -> Self {
        Self {
            theta,
            norm_relaxed: true,
        }
    }

    pub fn theta(&self) -> &[Real] {
        &self.theta
    }

    pub fn dim(&self) -> usize {
        self.theta.len()
    }

    pub fn is_norm_relaxed(&self) -> bool {
        self.norm_relaxed
    }
}

/// One round's arm-to-feature-vector assignment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeatureContext {
    num_arms: usize,
    dim: usize,
    /// Row-major `num_arms x dim`.
    rows: Vec<Real>,
}

impl FeatureContext {
    pub fn new(rows: Vec<Vec<Real>>) -> Result<Self> {
        let num_arms = rows.len();
        let dim = rows.first().map(|r| r.len()).unwrap_or(0);
        if dim == 0 {
            return Err(Error::InvalidArgument(
                "feature context needs at least one arm and one dimension".into(),
            ));
        }
        let mut flat = Vec::with_capacity(num_arms * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            let norm = l2_norm(row);
            if norm > 1.0 + NORM_SLACK {
                return Err(Error::FeatureNorm { index: i, norm });
            }
            flat.extend_from_slice(row);
        }
        Ok(Self {
            num_arms,
            dim,
            rows: flat,
        })
    }

    pub fn num_arms(&self) -> usize {
        self.num_arms
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn feature(&self, arm: usize) -> &[Real] {
        &self.rows[arm * self.dim..(arm + 1) * self.dim]
    }
}

/// Semantics of the arm sequence inside an action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ActionKind {
    /// Scanned in order (cascades).
    OrderedList,
    /// Order-free seed set (coverage, influence).
    SeedSet,
}

/// A combinatorial choice of distinct arm (or node) indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Action {
    pub kind: ActionKind,
    pub items: Vec<usize>,
}

impl Action {
    pub fn ordered(items: Vec<usize>) -> Self {
        Self {
            kind: ActionKind::OrderedList,
            items,
        }
    }

    pub fn seed_set(items: Vec<usize>) -> Self {
        Self {
            kind: ActionKind::SeedSet,
            items,
        }
    }

    pub fn validate(&self, universe: usize, expected_len: usize) -> Result<()> {
        if self.items.len() != expected_len {
            return Err(Error::MalformedAction(format!(
                "expected {expected_len} items, got {}",
                self.items.len()
            )));
        }
        let mut seen = vec![false; universe];
        for &i in &self.items {
            if i >= universe {
                return Err(Error::MalformedAction(format!(
                    "index {i} out of range [0,{universe})"
                )));
            }
            if seen[i] {
                return Err(Error::MalformedAction(format!("duplicate index {i}")));
            }
            seen[i] = true;
        }
        Ok(())
    }
}

/// Observed result of playing an action: the triggered arms, their binary
/// outcomes (aligned with `triggered`), and the realized reward.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Feedback {
    pub triggered: Vec<usize>,
    pub outcomes: Vec<bool>,
    pub realized_reward: Real,
}

impl Feedback {
    pub fn new(triggered: Vec<usize>, outcomes: Vec<bool>, realized_reward: Real) -> Self {
        debug_assert_eq!(triggered.len(), outcomes.len());
        debug_assert!(realized_reward.is_finite() && realized_reward >= 0.0);
        Self {
            triggered,
            outcomes,
            realized_reward,
        }
    }
}

/// Declared feasible action space, used by oracles and the brute-force
/// regret reference.
#[derive(Debug, Clone)]
pub enum ActionSpace {
    /// All ordered slates of `slate_size` distinct arms out of `num_arms`.
    /// Rewards are order-invariant, so enumeration runs over subsets.
    Slate { num_arms: usize, slate_size: usize },
    /// All `seeds`-subsets of `candidates` source/seed ids.
    Seeds { candidates: usize, seeds: usize },
}

impl ActionSpace {
    /// Number of distinct candidate actions up to order.
    pub fn candidate_count(&self) -> u64 {
        let (n, k) = match *self {
            ActionSpace::Slate {
                num_arms,
                slate_size,
            } => (num_arms, slate_size),
            ActionSpace::Seeds { candidates, seeds } => (candidates, seeds),
        };
        binomial(n as u64, k as u64)
    }

    /// Samples one feasible action uniformly over subsets.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Action {
        let (n, k, kind) = match *self {
            ActionSpace::Slate {
                num_arms,
                slate_size,
            } => (num_arms, slate_size, ActionKind::OrderedList),
            ActionSpace::Seeds { candidates, seeds } => (candidates, seeds, ActionKind::SeedSet),
        };
        let mut picked = Vec::with_capacity(k);
        let mut pool: Vec<usize> = (0..n).collect();
        for _ in 0..k {
            let j = rng.gen_range(0..pool.len());
            picked.push(pool.swap_remove(j));
        }
        Action { kind, items: picked }
    }
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Contract every environment implements.
pub trait Environment {
    fn num_arms(&self) -> usize;

    /// Maximum number of arms a single action can trigger.
    fn batch_bound(&self) -> usize;

    /// Feasible action space descriptor.
    fn action_space(&self) -> ActionSpace;

    /// Per-round feature assignment.
    fn context(&self, t: u64, rng: &mut dyn rand::RngCore) -> FeatureContext;

    /// True mean vector of round `t` (the simulator's regret accounting
    /// needs it; policies never see it).
    fn true_means(&self, t: u64) -> Vec<Real>;

    /// Draws outcomes, applies the triggering process and computes the
    /// realized reward.
    fn play(&self, t: u64, action: &Action, rng: &mut dyn rand::RngCore) -> Result<Feedback>;

    /// Analytic expected reward `r(S; mu)` as a pure function of `mu`.
    fn expected_reward(&self, action: &Action, mu: &[Real]) -> Real;

    /// Analytic triggering probability of arm `i` under `(S, mu)`.
    fn triggering_prob(&self, arm: usize, action: &Action, mu: &[Real]) -> Real;

    /// `(alpha, beta)` of the environment's sanctioned offline oracle.
    fn alpha_beta(&self) -> (Real, Real);

    /// The environment's sanctioned offline oracle.
    fn oracle(&self) -> Box<dyn crate::oracle::OfflineOracle>;
}

/// Arm means under a linear ground truth: dot products, validated to lie
/// in `[0,1]` up to slack and then clamped.
pub fn arm_means(gt: &LinearGroundTruth, ctx: &FeatureContext) -> Result<Vec<Real>> {
    if gt.dim() != ctx.dim() {
        return Err(Error::DimensionMismatch {
            expected: gt.dim(),
            got: ctx.dim(),
        });
    }
    let mut means = Vec::with_capacity(ctx.num_arms());
    for i in 0..ctx.num_arms() {
        let mu = dot(gt.theta(), ctx.feature(i));
        if !(-MEAN_SLACK..=1.0 + MEAN_SLACK).contains(&mu) {
            return Err(Error::MeanOutOfRange { index: i, value: mu });
        }
        means.push(mu.clamp(0.0, 1.0));
    }
    Ok(means)
}

/// One-hot reduction of a non-contextual instance: `theta* = mu` and
/// constant features `phi(i) = e_i`. Exact regardless of `||mu||`, so the
/// parameter-norm invariant is relaxed (and flagged) on the result.
pub fn one_hot_lift(mu: &[Real]) -> (LinearGroundTruth, FeatureContext) {
    let m = mu.len();
    let gt = LinearGroundTruth::new_relaxed(mu.to_vec());
    let mut rows = vec![vec![0.0; m]; m];
    for (i, row) in rows.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let ctx = FeatureContext::new(rows).expect("one-hot rows are unit norm");
    (gt, ctx)
}

pub fn dot(a: &[Real], b: &[Real]) -> Real {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn l2_norm(v: &[Real]) -> Real {
    dot(v, v).sqrt()
}
