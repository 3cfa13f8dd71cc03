//! Offline approximation oracles mapping a score vector to an action,
//! plus exact brute force for verification and regret references.
//!
//! Every oracle is deterministic given its inputs (and seed, for the
//! sampled spread estimates); ties break toward the ascending arm index.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Action, ActionSpace, Environment};
use crate::Real;

pub const BRUTE_FORCE_LIMIT: u64 = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleKind {
    TopK,
    GreedyCoverage,
    GreedyIm,
    BruteForce,
}

/// Declared guarantee of an offline oracle.
#[derive(Debug, Clone, Copy)]
pub struct OracleSpec {
    pub kind: OracleKind,
    pub alpha: Real,
    pub beta: Real,
}

pub trait OfflineOracle: Send {
    /// Chooses an action for the given per-arm scores.
    fn select(&self, scores: &[Real]) -> Action;

    fn spec(&self) -> OracleSpec;

    fn alpha_beta(&self) -> (Real, Real) {
        let s = self.spec();
        (s.alpha, s.beta)
    }
}

/// The `k` highest scores, ordered descending, ties broken by ascending
/// index. Exact for product-form slate rewards.
pub fn top_k(scores: &[Real], k: usize) -> Result<Action> {
    if k > scores.len() {
        return Err(Error::InvalidArgument(format!(
            "k = {k} exceeds number of arms {}",
            scores.len()
        )));
    }
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .expect("scores must be orderable")
            .then(a.cmp(&b))
    });
    idx.truncate(k);
    Ok(Action::ordered(idx))
}

#[derive(Debug, Clone)]
pub struct TopKOracle {
    k: usize,
}

impl TopKOracle {
    pub fn new(k: usize) -> Self {
        Self { k }
    }
}

impl OfflineOracle for TopKOracle {
    fn select(&self, scores: &[Real]) -> Action {
        top_k(scores, self.k).expect("slate size fixed at construction")
    }

    fn spec(&self) -> OracleSpec {
        OracleSpec {
            kind: OracleKind::TopK,
            alpha: 1.0,
            beta: 1.0,
        }
    }
}

/// Greedy source selection for probabilistic maximum coverage: repeatedly
/// adds the source with the largest marginal gain in expected coverage.
/// Submodularity gives the (1 - 1/e) guarantee.
pub fn greedy_coverage(
    num_sources: usize,
    num_targets: usize,
    edges: &[(usize, usize)],
    mu: &[Real],
    k: usize,
) -> Action {
    assert!(k <= num_sources, "seed budget exceeds source count");
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    let mut in_set = vec![false; num_sources];
    // Probability each target is still missed by the current set.
    let mut miss = vec![1.0; num_targets];
    for _ in 0..k {
        let mut best: Option<(usize, Real)> = None;
        for u in 0..num_sources {
            if in_set[u] {
                continue;
            }
            let mut gain = 0.0;
            let mut extra_miss = vec![1.0; num_targets];
            for (e, &(src, v)) in edges.iter().enumerate() {
                if src == u {
                    extra_miss[v] *= 1.0 - mu[e];
                }
            }
            for v in 0..num_targets {
                gain += miss[v] * (1.0 - extra_miss[v]);
            }
            let better = match best {
                None => true,
                Some((_, bg)) => gain > bg,
            };
            if better {
                best = Some((u, gain));
            }
        }
        let (u, _) = best.expect("k <= num_sources leaves a candidate");
        in_set[u] = true;
        chosen.push(u);
        for (e, &(src, v)) in edges.iter().enumerate() {
            if src == u {
                miss[v] *= 1.0 - mu[e];
            }
        }
    }
    chosen.sort_unstable();
    Action::seed_set(chosen)
}

#[derive(Debug, Clone)]
pub struct GreedyCoverageOracle {
    num_sources: usize,
    num_targets: usize,
    edges: Vec<(usize, usize)>,
    k: usize,
}

impl GreedyCoverageOracle {
    pub fn new(
        num_sources: usize,
        num_targets: usize,
        edges: Vec<(usize, usize)>,
        k: usize,
    ) -> Self {
        Self {
            num_sources,
            num_targets,
            edges,
            k,
        }
    }
}

impl OfflineOracle for GreedyCoverageOracle {
    fn select(&self, scores: &[Real]) -> Action {
        greedy_coverage(
            self.num_sources,
            self.num_targets,
            &self.edges,
            scores,
            self.k,
        )
    }

    fn spec(&self) -> OracleSpec {
        OracleSpec {
            kind: OracleKind::GreedyCoverage,
            alpha: 1.0 - (-1.0 as Real).exp(),
            beta: 1.0,
        }
    }
}

const IM_EXACT_EDGE_LIMIT: usize = 20;
const IM_BITSET_NODE_LIMIT: usize = 128;

/// Plain greedy seed selection for influence maximization. Spread is
/// computed exactly by live-edge enumeration when the graph is small
/// enough, and otherwise estimated on a set of sampled worlds shared
/// across all candidates (common random numbers).
pub fn greedy_im(
    num_nodes: usize,
    edges: &[(usize, usize)],
    mu: &[Real],
    k: usize,
    mc_samples: usize,
    seed: u64,
) -> Action {
    assert!(k <= num_nodes, "seed budget exceeds node count");
    assert!(mc_samples >= 1);
    assert!(
        num_nodes <= IM_BITSET_NODE_LIMIT,
        "greedy spread estimation supports up to {IM_BITSET_NODE_LIMIT} nodes"
    );

    // Worlds: (probability weight, per-node reachability bitset).
    let worlds: Vec<(Real, Vec<u128>)> = if edges.len() <= IM_EXACT_EDGE_LIMIT {
        let ne = edges.len();
        (0u32..(1u32 << ne))
            .filter_map(|mask| {
                let mut p = 1.0;
                for (e, &m) in mu.iter().enumerate().take(ne) {
                    p *= if mask & (1 << e) != 0 { m } else { 1.0 - m };
                }
                if p == 0.0 {
                    return None;
                }
                Some((p, reach_closure(num_nodes, edges, |e| mask & (1 << e) != 0)))
            })
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = 1.0 / mc_samples as Real;
        (0..mc_samples)
            .map(|_| {
                let live: Vec<bool> = mu.iter().map(|&m| rng.gen_bool(m.clamp(0.0, 1.0))).collect();
                (w, reach_closure(num_nodes, edges, |e| live[e]))
            })
            .collect()
    };

    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    let mut in_set = vec![false; num_nodes];
    // Current activated set per world.
    let mut cur: Vec<u128> = vec![0; worlds.len()];
    for _ in 0..k {
        let mut best: Option<(usize, Real)> = None;
        for v in 0..num_nodes {
            if in_set[v] {
                continue;
            }
            let mut gain = 0.0;
            for (w, (p, reach)) in worlds.iter().enumerate() {
                gain += p * ((cur[w] | reach[v]).count_ones() - cur[w].count_ones()) as Real;
            }
            let better = match best {
                None => true,
                Some((_, bg)) => gain > bg,
            };
            if better {
                best = Some((v, gain));
            }
        }
        let (v, _) = best.expect("k <= num_nodes leaves a candidate");
        in_set[v] = true;
        chosen.push(v);
        for (w, (_, reach)) in worlds.iter().enumerate() {
            cur[w] |= reach[v];
        }
    }
    chosen.sort_unstable();
    Action::seed_set(chosen)
}

/// Per-node reachability bitsets over one live-edge world.
fn reach_closure(
    num_nodes: usize,
    edges: &[(usize, usize)],
    live: impl Fn(usize) -> bool,
) -> Vec<u128> {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); num_nodes];
    for (e, &(u, v)) in edges.iter().enumerate() {
        if live(e) {
            adj[u].push(v);
        }
    }
    let mut out = vec![0u128; num_nodes];
    for s in 0..num_nodes {
        let mut seen = 1u128 << s;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if seen & (1 << v) == 0 {
                    seen |= 1 << v;
                    stack.push(v);
                }
            }
        }
        out[s] = seen;
    }
    out
}

#[derive(Debug, Clone)]
pub struct GreedyImOracle {
    num_nodes: usize,
    edges: Vec<(usize, usize)>,
    k: usize,
    mc_samples: usize,
    seed: u64,
}

impl GreedyImOracle {
    pub fn new(
        num_nodes: usize,
        edges: Vec<(usize, usize)>,
        k: usize,
        mc_samples: usize,
        seed: u64,
    ) -> Self {
        Self {
            num_nodes,
            edges,
            k,
            mc_samples,
            seed,
        }
    }
}

impl OfflineOracle for GreedyImOracle {
    fn select(&self, scores: &[Real]) -> Action {
        greedy_im(
            self.num_nodes,
            &self.edges,
            scores,
            self.k,
            self.mc_samples,
            self.seed,
        )
    }

    fn spec(&self) -> OracleSpec {
        OracleSpec {
            kind: OracleKind::GreedyIm,
            alpha: 1.0 - (-1.0 as Real).exp(),
            beta: 1.0,
        }
    }
}

/// Exact maximizer of the analytic expected reward by enumeration.
/// Ties break toward the lexicographically smallest index set.
pub fn brute_force_best(env: &dyn Environment, mu: &[Real]) -> Result<(Action, Real)> {
    let space = env.action_space();
    let count = space.candidate_count();
    if count > BRUTE_FORCE_LIMIT {
        return Err(Error::ActionSpaceTooLarge {
            candidates: count,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let (n, k, ordered) = match space {
        ActionSpace::Slate {
            num_arms,
            slate_size,
        } => (num_arms, slate_size, true),
        ActionSpace::Seeds { candidates, seeds } => (candidates, seeds, false),
    };
    let mut best: Option<(Action, Real)> = None;
    for_each_combination(n, k, |items| {
        let action = if ordered {
            Action::ordered(items.to_vec())
        } else {
            Action::seed_set(items.to_vec())
        };
        let value = env.expected_reward(&action, mu);
        let better = match &best {
            None => true,
            Some((_, bv)) => value > *bv,
        };
        if better {
            best = Some((action, value));
        }
    });
    best.ok_or_else(|| Error::InvalidArgument("empty action space".into()))
}

/// Visits all `k`-combinations of `0..n` in lexicographic order.
pub fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut comb: Vec<usize> = (0..k).collect();
    loop {
        f(&comb);
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if comb[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        comb[i] += 1;
        for j in i + 1..k {
            comb[j] = comb[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::cascade::{CascadeEnv, CascadeKind};
    use crate::env::pmc::PmcBipartiteEnv;

    #[test]
    fn top_k_sorts_and_breaks_ties() {
        let a = top_k(&[0.9, 0.1, 0.5], 2).unwrap();
        assert_eq!(a.items, vec![0, 2]);

        let ties = top_k(&[0.5, 0.5, 0.5], 2).unwrap();
        assert_eq!(ties.items, vec![0, 1]);

        let all = top_k(&[0.2, 0.9, 0.5], 3).unwrap();
        assert_eq!(all.items, vec![1, 2, 0]);

        assert!(top_k(&[0.1], 2).is_err());
    }

    #[test]
    fn greedy_coverage_first_step_is_argmax() {
        // u0 covers target 0 with 0.9; u1 covers targets 0,1 with 0.3 each.
        let edges = vec![(0, 0), (1, 0), (1, 1)];
        let a = greedy_coverage(2, 2, &edges, &[0.9, 0.3, 0.3], 1);
        assert_eq!(a.items, vec![0]); // 0.9 > 0.6
    }

    #[test]
    fn greedy_coverage_disjoint_stars_is_optimal() {
        // Modular case: disjoint stars, greedy = optimal.
        let edges = vec![(0, 0), (1, 1), (2, 2)];
        let mu = [0.2, 0.9, 0.5];
        let a = greedy_coverage(3, 3, &edges, &mu, 2);
        assert_eq!(a.items, vec![1, 2]);
    }

    #[test]
    fn greedy_im_deterministic_graph() {
        // All-live DAG: 0 -> 1 -> 2; node 0 reaches everything.
        let edges = vec![(0, 1), (1, 2)];
        let a = greedy_im(3, &edges, &[1.0, 1.0], 1, 1, 0);
        assert_eq!(a.items, vec![0]);

        let all = greedy_im(3, &edges, &[0.5, 0.5], 3, 1, 0);
        assert_eq!(all.items, vec![0, 1, 2]);
    }

    #[test]
    fn brute_force_examples() {
        let mu = [0.9, 0.1, 0.5];
        let disj = CascadeEnv::from_means(CascadeKind::Disjunctive, 2, &mu).unwrap();
        let (a, v) = brute_force_best(&disj, &mu).unwrap();
        let mut items = a.items.clone();
        items.sort_unstable();
        assert_eq!(items, vec![0, 2]);
        assert!((v - 0.95).abs() < 1e-12);

        let conj = CascadeEnv::from_means(CascadeKind::Conjunctive, 2, &mu).unwrap();
        let (a2, v2) = brute_force_best(&conj, &mu).unwrap();
        let mut items2 = a2.items.clone();
        items2.sort_unstable();
        assert_eq!(items2, vec![0, 2]);
        assert!((v2 - 0.45).abs() < 1e-12);

        let pmc =
            PmcBipartiteEnv::from_means(2, 1, vec![(0, 0), (1, 0)], 2, &[0.5, 0.5]).unwrap();
        let (a3, v3) = brute_force_best(&pmc, &[0.5, 0.5]).unwrap();
        assert_eq!(a3.items, vec![0, 1]);
        assert!((v3 - 0.75).abs() < 1e-12);
    }

    #[test]
    fn combination_enumeration_is_lexicographic_and_complete() {
        let mut seen = Vec::new();
        for_each_combination(4, 2, |c| seen.push(c.to_vec()));
        assert_eq!(
            seen,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        let mut single = Vec::new();
        for_each_combination(3, 3, |c| single.push(c.to_vec()));
        assert_eq!(single, vec![vec![0, 1, 2]]);
    }
}
