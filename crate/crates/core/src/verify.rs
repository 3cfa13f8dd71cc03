//! Numerical falsification of reward-smoothness conditions against an
//! environment's analytic reward and triggering-probability functions,
//! plus Monte-Carlo checks that the sampled dynamics match those analytic
//! values.
//!
//! The checks are falsifiers, not provers: they sample random actions,
//! mean vectors, and (for the variance conditions) random decompositions,
//! and report the worst observed LHS/RHS ratio.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::model::{Action, Environment};
use crate::Real;

/// Relative tolerance above which a trial counts as a violation.
pub const VIOLATION_REL_TOL: Real = 1e-9;
/// Absolute slack for exact-equality cases (e.g. identical mean vectors).
pub const VIOLATION_ABS_TOL: Real = 1e-12;
/// Denominator floor for the reported ratio.
pub const RHS_FLOOR: Real = 1e-12;

/// Mean samples for the variance conditions stay inside [LO, HI] to avoid
/// the (1-mu)mu singularity in the denominators.
const VM_MU_LO: Real = 0.05;
const VM_MU_HI: Real = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConditionKind {
    Monotonicity,
    Tpm,
    Vm,
    Tpvm,
    TpSmooth,
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct Coefficients {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b1: Option<Real>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bv: Option<Real>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Real>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bp: Option<Real>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Counterexample,
}

/// Inputs that reproduce a violation when re-evaluated.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Counterexample {
    pub action: Vec<usize>,
    pub mu: Vec<Real>,
    pub mu_prime: Vec<Real>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zeta: Option<Vec<Real>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<Vec<Real>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub arm: Option<usize>,
    pub lhs: Real,
    pub rhs: Real,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition: ConditionKind,
    pub coefficients: Coefficients,
    pub trials: u64,
    pub verdict: Verdict,
    pub worst_ratio: Real,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

impl ConditionReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Tracks the worst trial; keeps `worst_ratio <= 1` exactly equivalent to
/// a pass verdict by clamping within-tolerance ratios to 1.
struct Tracker {
    worst_ratio: Real,
    counterexample: Option<Counterexample>,
}

impl Tracker {
    fn new() -> Self {
        Self {
            worst_ratio: 0.0,
            counterexample: None,
        }
    }

    fn observe(&mut self, lhs: Real, rhs: Real, make_ce: impl FnOnce(Real, Real) -> Counterexample) {
        let violated = is_violation(lhs, rhs);
        let mut ratio = lhs / rhs.max(RHS_FLOOR);
        if !violated {
            ratio = ratio.min(1.0);
        }
        if ratio > self.worst_ratio {
            self.worst_ratio = ratio;
        }
        if violated && self.counterexample.is_none() {
            self.counterexample = Some(make_ce(lhs, rhs));
        }
    }

    fn finish(self, condition: ConditionKind, coefficients: Coefficients, trials: u64) -> ConditionReport {
        let verdict = if self.counterexample.is_some() {
            Verdict::Counterexample
        } else {
            Verdict::Pass
        };
        ConditionReport {
            condition,
            coefficients,
            trials,
            verdict,
            worst_ratio: self.worst_ratio,
            counterexample: self.counterexample,
        }
    }
}

pub fn is_violation(lhs: Real, rhs: Real) -> bool {
    lhs > rhs * (1.0 + VIOLATION_REL_TOL) + VIOLATION_ABS_TOL
}

fn sample_mu(m: usize, lo: Real, hi: Real, rng: &mut impl Rng) -> Vec<Real> {
    (0..m).map(|_| rng.gen_range(lo..hi)).collect()
}

/// Arms with positive triggering probability under (mu, S), with those
/// probabilities.
fn triggerable(env: &dyn Environment, action: &Action, mu: &[Real]) -> Vec<(usize, Real)> {
    (0..env.num_arms())
        .filter_map(|i| {
            let p = env.triggering_prob(i, action, mu);
            (p > 0.0).then_some((i, p))
        })
        .collect()
}

/// Reward is nondecreasing in the mean vector: samples mu <= mu'
/// coordinatewise and compares rewards.
pub fn check_monotonicity(
    env: &dyn Environment,
    trials: u64,
    rng: &mut impl Rng,
) -> ConditionReport {
    let m = env.num_arms();
    let mut tr = Tracker::new();
    for trial in 0..trials {
        let action = env.action_space().sample(rng);
        let mu = sample_mu(m, 0.0, 1.0, rng);
        let mu_prime: Vec<Real> = if trial % 10 == 0 {
            mu.clone() // equality edge
        } else {
            mu.iter().map(|&x| rng.gen_range(x..=1.0)).collect()
        };
        let lhs = env.expected_reward(&action, &mu);
        let rhs = env.expected_reward(&action, &mu_prime);
        tr.observe(lhs, rhs, |lhs, rhs| Counterexample {
            action: action.items.clone(),
            mu: mu.clone(),
            mu_prime: mu_prime.clone(),
            zeta: None,
            eta: None,
            arm: None,
            lhs,
            rhs,
        });
    }
    tr.finish(ConditionKind::Monotonicity, Coefficients::default(), trials)
}

/// |r(S;mu') - r(S;mu)| <= B1 * sum_i p_i^{mu,S} |mu_i - mu'_i|.
pub fn check_tpm(env: &dyn Environment, b1: Real, trials: u64, rng: &mut impl Rng) -> ConditionReport {
    let m = env.num_arms();
    let mut tr = Tracker::new();
    for trial in 0..trials {
        let action = env.action_space().sample(rng);
        let mu = sample_mu(m, 0.0, 1.0, rng);
        let mu_prime = if trial % 10 == 0 {
            mu.clone()
        } else {
            sample_mu(m, 0.0, 1.0, rng)
        };
        let lhs = (env.expected_reward(&action, &mu_prime) - env.expected_reward(&action, &mu)).abs();
        let rhs = b1
            * (0..m)
                .map(|i| env.triggering_prob(i, &action, &mu) * (mu[i] - mu_prime[i]).abs())
                .sum::<Real>();
        tr.observe(lhs, rhs, |lhs, rhs| Counterexample {
            action: action.items.clone(),
            mu: mu.clone(),
            mu_prime: mu_prime.clone(),
            zeta: None,
            eta: None,
            arm: None,
            lhs,
            rhs,
        });
    }
    tr.finish(
        ConditionKind::Tpm,
        Coefficients {
            b1: Some(b1),
            ..Default::default()
        },
        trials,
    )
}

fn variance_rhs(
    pairs: &[(usize, Real)],
    mu: &[Real],
    zeta: &[Real],
    eta: &[Real],
    bv: Real,
    b1: Real,
    lambda: Option<Real>,
) -> Real {
    let mut quad = 0.0;
    let mut lin = 0.0;
    for &(i, p) in pairs {
        let mod_quad = match lambda {
            Some(l) => p.powf(l),
            None => 1.0,
        };
        let mod_lin = match lambda {
            Some(_) => p,
            None => 1.0,
        };
        quad += mod_quad * zeta[i] * zeta[i] / ((1.0 - mu[i]) * mu[i]);
        lin += mod_lin * eta[i].abs();
    }
    bv * quad.sqrt() + b1 * lin
}

fn check_variance_condition(
    env: &dyn Environment,
    kind: ConditionKind,
    bv: Real,
    b1: Real,
    lambda: Option<Real>,
    trials: u64,
    decomps_per_trial: u32,
    rng: &mut impl Rng,
) -> ConditionReport {
    let m = env.num_arms();
    let mut tr = Tracker::new();
    for _ in 0..trials {
        let action = env.action_space().sample(rng);
        let mu = sample_mu(m, VM_MU_LO, VM_MU_HI, rng);
        let mu_prime = sample_mu(m, VM_MU_LO, VM_MU_HI, rng);
        let pairs = triggerable(env, &action, &mu);
        let lhs =
            (env.expected_reward(&action, &mu_prime) - env.expected_reward(&action, &mu)).abs();
        // random interior splits plus the two pure splits
        let mut splits: Vec<Vec<Real>> = Vec::with_capacity(decomps_per_trial as usize);
        splits.push(vec![0.0; m]);
        splits.push(vec![1.0; m]);
        for _ in 2..decomps_per_trial.max(2) {
            splits.push((0..m).map(|_| rng.gen_range(0.0..=1.0)).collect());
        }
        for t in &splits {
            let zeta: Vec<Real> = (0..m).map(|i| t[i] * (mu_prime[i] - mu[i])).collect();
            let eta: Vec<Real> = (0..m).map(|i| (1.0 - t[i]) * (mu_prime[i] - mu[i])).collect();
            let rhs = variance_rhs(&pairs, &mu, &zeta, &eta, bv, b1, lambda);
            tr.observe(lhs, rhs, |lhs, rhs| Counterexample {
                action: action.items.clone(),
                mu: mu.clone(),
                mu_prime: mu_prime.clone(),
                zeta: Some(zeta.clone()),
                eta: Some(eta.clone()),
                arm: None,
                lhs,
                rhs,
            });
        }
    }
    tr.finish(
        kind,
        Coefficients {
            b1: Some(b1),
            bv: Some(bv),
            lambda,
            ..Default::default()
        },
        trials,
    )
}

/// |dr| <= Bv*sqrt(sum_{i in S~} zeta_i^2/((1-mu_i)mu_i)) + B1*sum_{i in S~}|eta_i|
/// over sampled decompositions mu' = mu + zeta + eta.
pub fn check_vm(
    env: &dyn Environment,
    bv: Real,
    b1: Real,
    trials: u64,
    decomps_per_trial: u32,
    rng: &mut impl Rng,
) -> ConditionReport {
    check_variance_condition(env, ConditionKind::Vm, bv, b1, None, trials, decomps_per_trial, rng)
}

/// Variance condition with triggering-probability modulation: the
/// quadratic term carries p_i^lambda and the linear term carries p_i.
pub fn check_tpvm(
    env: &dyn Environment,
    bv: Real,
    b1: Real,
    lambda: Real,
    trials: u64,
    decomps_per_trial: u32,
    rng: &mut impl Rng,
) -> ConditionReport {
    check_variance_condition(
        env,
        ConditionKind::Tpvm,
        bv,
        b1,
        Some(lambda),
        trials,
        decomps_per_trial,
        rng,
    )
}

/// |p_i^{mu',S} - p_i^{mu,S}| <= Bp * sum_j p_j^{mu,S} |mu_j - mu'_j|.
pub fn check_tp_smoothness(
    env: &dyn Environment,
    bp: Real,
    trials: u64,
    rng: &mut impl Rng,
) -> ConditionReport {
    let m = env.num_arms();
    let mut tr = Tracker::new();
    for _ in 0..trials {
        let action = env.action_space().sample(rng);
        let mu = sample_mu(m, 0.0, 1.0, rng);
        let mu_prime = sample_mu(m, 0.0, 1.0, rng);
        let arm = rng.gen_range(0..m);
        let lhs = (env.triggering_prob(arm, &action, &mu_prime)
            - env.triggering_prob(arm, &action, &mu))
        .abs();
        let rhs = bp
            * (0..m)
                .map(|j| env.triggering_prob(j, &action, &mu) * (mu[j] - mu_prime[j]).abs())
                .sum::<Real>();
        tr.observe(lhs, rhs, |lhs, rhs| Counterexample {
            action: action.items.clone(),
            mu: mu.clone(),
            mu_prime: mu_prime.clone(),
            zeta: None,
            eta: None,
            arm: Some(arm),
            lhs,
            rhs,
        });
    }
    tr.finish(
        ConditionKind::TpSmooth,
        Coefficients {
            bp: Some(bp),
            ..Default::default()
        },
        trials,
    )
}

/// Re-evaluates a counterexample against the environment; true when the
/// stored inputs still violate the stored condition.
pub fn replay_counterexample(
    env: &dyn Environment,
    report: &ConditionReport,
) -> Option<bool> {
    let ce = report.counterexample.as_ref()?;
    let action = match env.action_space() {
        crate::model::ActionSpace::Slate { .. } => Action::ordered(ce.action.clone()),
        crate::model::ActionSpace::Seeds { .. } => Action::seed_set(ce.action.clone()),
    };
    let c = &report.coefficients;
    let (lhs, rhs) = match report.condition {
        ConditionKind::Monotonicity => (
            env.expected_reward(&action, &ce.mu),
            env.expected_reward(&action, &ce.mu_prime),
        ),
        ConditionKind::Tpm => {
            let lhs = (env.expected_reward(&action, &ce.mu_prime)
                - env.expected_reward(&action, &ce.mu))
            .abs();
            let rhs = c.b1.unwrap_or(1.0)
                * (0..env.num_arms())
                    .map(|i| {
                        env.triggering_prob(i, &action, &ce.mu) * (ce.mu[i] - ce.mu_prime[i]).abs()
                    })
                    .sum::<Real>();
            (lhs, rhs)
        }
        ConditionKind::Vm | ConditionKind::Tpvm => {
            let pairs = triggerable(env, &action, &ce.mu);
            let lhs = (env.expected_reward(&action, &ce.mu_prime)
                - env.expected_reward(&action, &ce.mu))
            .abs();
            let rhs = variance_rhs(
                &pairs,
                &ce.mu,
                ce.zeta.as_deref()?,
                ce.eta.as_deref()?,
                c.bv.unwrap_or(1.0),
                c.b1.unwrap_or(1.0),
                c.lambda,
            );
            (lhs, rhs)
        }
        ConditionKind::TpSmooth => {
            let arm = ce.arm?;
            let lhs = (env.triggering_prob(arm, &action, &ce.mu_prime)
                - env.triggering_prob(arm, &action, &ce.mu))
            .abs();
            let rhs = c.bp.unwrap_or(1.0)
                * (0..env.num_arms())
                    .map(|j| {
                        env.triggering_prob(j, &action, &ce.mu) * (ce.mu[j] - ce.mu_prime[j]).abs()
                    })
                    .sum::<Real>();
            (lhs, rhs)
        }
    };
    Some(is_violation(lhs, rhs))
}

/// Sample mean and standard error of the realized reward over `n` plays.
pub fn mc_expected_reward(
    env: &dyn Environment,
    action: &Action,
    n: u64,
    rng: &mut dyn rand::RngCore,
) -> crate::Result<(Real, Real)> {
    assert!(n >= 2);
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    for t in 0..n {
        let fb = env.play(t + 1, action, rng)?;
        sum += fb.realized_reward;
        sumsq += fb.realized_reward * fb.realized_reward;
    }
    let mean = sum / n as Real;
    let var = (sumsq / n as Real - mean * mean).max(0.0);
    Ok((mean, (var / n as Real).sqrt()))
}

/// Per-arm triggering frequency (and standard error) over `n` plays.
pub fn mc_triggering_freq(
    env: &dyn Environment,
    action: &Action,
    n: u64,
    rng: &mut dyn rand::RngCore,
) -> crate::Result<Vec<(Real, Real)>> {
    assert!(n >= 2);
    let mut counts = vec![0u64; env.num_arms()];
    for t in 0..n {
        let fb = env.play(t + 1, action, rng)?;
        for &i in &fb.triggered {
            counts[i] += 1;
        }
    }
    Ok(counts
        .into_iter()
        .map(|c| {
            let p = c as Real / n as Real;
            (p, (p * (1.0 - p) / n as Real).sqrt())
        })
        .collect())
}
