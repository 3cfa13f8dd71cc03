//! Seeded experiment execution and regret accounting.
//!
//! Instantaneous regret for round t is `alpha*beta*r(S*; mu) - r(S_t; mu)`
//! using analytic expected rewards only; the raw value is stored and the
//! cumulative sum floors each term at zero. Runs are parallel over
//! (policy, seed) pairs; outputs are written in a fixed order so results
//! are byte-identical regardless of worker count.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::config::{ExperimentConfig, RegretReference};
use crate::harness::derive_seed;
use crate::model::Environment;
use crate::oracle::brute_force_best;
use crate::verify::{mc_expected_reward, mc_triggering_freq};
use crate::Real;

/// One (policy, seed) trace; `csv` is the exact file payload.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub policy_id: String,
    pub seed: u64,
    pub csv: String,
    pub cum: Vec<Real>,
    pub elapsed_ms: u128,
}

#[derive(Debug, Clone, Serialize)]
pub struct PolicySummary {
    pub policy: String,
    pub rounds: Vec<u64>,
    pub mean_cum: Vec<Real>,
    pub std_cum: Vec<Real>,
}

/// The benchmark value `alpha*beta*r(S*; mu)`: exact optimum scaled by the
/// oracle guarantee, or the offline oracle's own value on the true means
/// when enumeration is infeasible.
pub fn reference_value(
    env: &dyn Environment,
    mode: RegretReference,
    mu: &[Real],
) -> Result<Real> {
    match mode {
        RegretReference::BruteForce => {
            let (alpha, beta) = env.alpha_beta();
            let (_, v) = brute_force_best(env, mu)?;
            Ok(alpha * beta * v)
        }
        RegretReference::GreedyOnTrueMeans => {
            let action = env.oracle().select(mu);
            Ok(env.expected_reward(&action, mu))
        }
    }
}

fn run_single(
    cfg: &ExperimentConfig,
    policy_idx: usize,
    seed_idx: usize,
) -> Result<RunResult> {
    let started = std::time::Instant::now();
    let spec = &cfg.policies[policy_idx];
    let seed = cfg.seeds[seed_idx];
    let env = cfg.env.build()?;
    let oracle = env.oracle();
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, policy_idx as u64, seed_idx as u64));

    // Bundled environments have constant means and contexts, so the
    // reference is computed once.
    let mu = env.true_means(1);
    let ref_value = reference_value(env.as_ref(), cfg.regret_reference, &mu)?;
    let probe_ctx = env.context(1, &mut rng);
    let mut policy = spec.build(
        probe_ctx.dim(),
        env.num_arms(),
        env.batch_bound(),
        cfg.horizon,
    )?;

    let mut csv = String::from("round,inst_regret,cum_regret,action\n");
    let mut cum = Vec::with_capacity(cfg.horizon as usize);
    let mut total = 0.0;
    for t in 1..=cfg.horizon {
        let ctx = env.context(t, &mut rng);
        let action = policy.select(t, &ctx, oracle.as_ref())?;
        let fb = env.play(t, &action, &mut rng)?;
        policy.update(&ctx, &fb)?;
        let inst = ref_value - env.expected_reward(&action, &mu);
        total += inst.max(0.0);
        cum.push(total);
        let joined = action
            .items
            .iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join("-");
        csv.push_str(&format!("{t},{inst},{total},{joined}\n"));
    }
    Ok(RunResult {
        policy_id: spec.id(),
        seed,
        csv,
        cum,
        elapsed_ms: started.elapsed().as_millis(),
    })
}

fn summarize(cfg: &ExperimentConfig, results: &[RunResult]) -> Vec<PolicySummary> {
    let t = cfg.horizon as usize;
    cfg.policies
        .iter()
        .map(|spec| {
            let id = spec.id();
            let curves: Vec<&Vec<Real>> = results
                .iter()
                .filter(|r| r.policy_id == id)
                .map(|r| &r.cum)
                .collect();
            let n = curves.len() as Real;
            let mut mean_cum = vec![0.0; t];
            let mut std_cum = vec![0.0; t];
            for round in 0..t {
                let mean = curves.iter().map(|c| c[round]).sum::<Real>() / n;
                let var = curves
                    .iter()
                    .map(|c| (c[round] - mean).powi(2))
                    .sum::<Real>()
                    / n;
                mean_cum[round] = mean;
                std_cum[round] = var.sqrt();
            }
            PolicySummary {
                policy: id,
                rounds: (1..=cfg.horizon).collect(),
                mean_cum,
                std_cum,
            }
        })
        .collect()
}

/// Executes every (policy, seed) pair and returns the traces in config
/// order along with per-policy summaries. Deterministic for a given
/// config regardless of parallelism.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    workers: Option<usize>,
) -> Result<(Vec<RunResult>, Vec<PolicySummary>)> {
    if cfg.mc_contract_checks {
        let env = cfg.env.build()?;
        let report = contract_check(env.as_ref(), 20_000, 3, derive_seed(cfg.seeds[0], 0, 0))?;
        if !report.passed {
            return Err(Error::InvalidArgument(format!(
                "Monte-Carlo contract check failed: {}",
                serde_json::to_string(&report)?
            )));
        }
    }
    let jobs: Vec<(usize, usize)> = (0..cfg.policies.len())
        .flat_map(|p| (0..cfg.seeds.len()).map(move |s| (p, s)))
        .collect();
    let execute = || -> Result<Vec<RunResult>> {
        jobs.par_iter()
            .map(|&(p, s)| run_single(cfg, p, s))
            .collect()
    };
    let results = match workers {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidArgument(format!("worker pool: {e}")))?;
            pool.install(execute)?
        }
        None => execute()?,
    };
    let summaries = summarize(cfg, &results);
    Ok((results, summaries))
}

/// Runs the experiment and persists one CSV per (policy, seed) plus
/// `summary.json` under `out_dir`.
pub fn run_experiment_to_dir(
    cfg: &ExperimentConfig,
    out_dir: &Path,
    workers: Option<usize>,
) -> Result<()> {
    let (results, summaries) = run_experiment(cfg, workers)?;
    std::fs::create_dir_all(out_dir)?;
    for r in &results {
        let name = format!("{}_seed{}.csv", r.policy_id, r.seed);
        std::fs::write(out_dir.join(name), &r.csv)?;
    }
    let mut json = serde_json::to_string_pretty(&summaries)?;
    json.push('\n');
    std::fs::write(out_dir.join("summary.json"), json)?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct ArmContract {
    pub arm: usize,
    pub analytic: Real,
    pub estimate: Real,
    pub stderr: Real,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ActionContract {
    pub action: Vec<usize>,
    pub analytic_reward: Real,
    pub reward_estimate: Real,
    pub reward_stderr: Real,
    pub reward_ok: bool,
    pub arms: Vec<ArmContract>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ContractReport {
    pub samples: u64,
    pub actions: Vec<ActionContract>,
    pub passed: bool,
}

fn within(analytic: Real, estimate: Real, stderr: Real) -> bool {
    (analytic - estimate).abs() <= 4.0 * stderr + 1e-9
}

/// Checks sampled dynamics against analytic values: realized reward and
/// per-arm triggering frequencies over `samples` plays of each of
/// `num_actions` randomly sampled actions, at four standard errors.
pub fn contract_check(
    env: &dyn Environment,
    samples: u64,
    num_actions: u32,
    seed: u64,
) -> Result<ContractReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mu = env.true_means(1);
    let mut actions = Vec::new();
    let mut passed = true;
    for _ in 0..num_actions {
        let action = env.action_space().sample(&mut rng);
        let analytic_reward = env.expected_reward(&action, &mu);
        let (reward_estimate, reward_stderr) = mc_expected_reward(env, &action, samples, &mut rng)?;
        let reward_ok = within(analytic_reward, reward_estimate, reward_stderr);
        let freqs = mc_triggering_freq(env, &action, samples, &mut rng)?;
        let arms: Vec<ArmContract> = freqs
            .into_iter()
            .enumerate()
            .map(|(arm, (estimate, stderr))| {
                let analytic = env.triggering_prob(arm, &action, &mu);
                let ok = within(analytic, estimate, stderr);
                ArmContract {
                    arm,
                    analytic,
                    estimate,
                    stderr,
                    ok,
                }
            })
            .collect();
        passed &= reward_ok && arms.iter().all(|a| a.ok);
        actions.push(ActionContract {
            action: action.items,
            analytic_reward,
            reward_estimate,
            reward_stderr,
            reward_ok,
            arms,
        });
    }
    Ok(ContractReport {
        samples,
        actions,
        passed,
    })
}
