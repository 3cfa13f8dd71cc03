//! Command-line surface: experiment runs, synthetic instance generation,
//! smoothness checks, and Monte-Carlo contract checks.
//!
//! Exit codes: 0 success/pass, 1 counterexample or contract violation,
//! 2 usage/config error.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ccbandit::env::cascade::{CascadeEnv, CascadeKind};
use ccbandit::env::{gen_synthetic_cascade, OimIcEnv, PmcBipartiteEnv, SyntheticCascadeInstance};
use ccbandit::harness::{contract_check, run_experiment_to_dir, ExperimentConfig};
use ccbandit::model::Environment;
use ccbandit::verify;
use ccbandit::Real;

#[derive(Parser)]
#[command(
    name = "ccbandit",
    about = "Combinatorial bandit experiments with probabilistically triggered arms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configured experiment and write regret CSVs plus a summary.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides `out_dir` in the config).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker thread count (default: one per core).
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Generate a synthetic environment instance as JSON.
    Gen {
        #[arg(long, value_enum)]
        kind: GenKind,
        /// Number of arms.
        #[arg(long)]
        m: usize,
        /// Slate size.
        #[arg(long)]
        k: usize,
        /// Feature dimension.
        #[arg(long)]
        d: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Falsification check of a reward-smoothness condition.
    Check {
        /// Instance JSON path or a builtin name
        /// (disjunctive|conjunctive|pmc|oim).
        #[arg(long)]
        env: String,
        #[arg(long, value_enum)]
        condition: ConditionArg,
        #[arg(long, default_value_t = 1.0)]
        b1: Real,
        #[arg(long, default_value_t = 1.0)]
        bv: Real,
        #[arg(long, default_value_t = 1.0)]
        lambda: Real,
        #[arg(long, default_value_t = 1.0)]
        bp: Real,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        /// Decompositions per trial for the variance conditions.
        #[arg(long, default_value_t = 8)]
        decomps: u32,
    },
    /// Monte-Carlo check of sampled rewards and triggering frequencies
    /// against the analytic values.
    Contract {
        /// Instance JSON path or a builtin name
        /// (disjunctive|conjunctive|pmc|oim).
        #[arg(long)]
        env: String,
        #[arg(long)]
        samples: u64,
        #[arg(long)]
        seed: u64,
        /// Number of sampled actions to test.
        #[arg(long, default_value_t = 3)]
        actions: u32,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    CascadeSynthetic,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConditionArg {
    Mono,
    Tpm,
    Vm,
    Tpvm,
    TpSmooth,
}

fn builtin_env(name: &str) -> ccbandit::Result<Box<dyn Environment>> {
    let mu = [0.3, 0.6, 0.5, 0.2, 0.7, 0.4];
    Ok(match name {
        "disjunctive" => Box::new(CascadeEnv::from_means(CascadeKind::Disjunctive, 3, &mu)?),
        "conjunctive" => Box::new(CascadeEnv::from_means(CascadeKind::Conjunctive, 3, &mu)?),
        "pmc" => {
            let edges = vec![(0, 0), (0, 1), (1, 1), (1, 2), (2, 0), (2, 2)];
            Box::new(PmcBipartiteEnv::from_means(
                3,
                3,
                edges,
                2,
                &[0.5, 0.3, 0.6, 0.4, 0.2, 0.7],
            )?)
        }
        "oim" => {
            let edges = vec![(0, 1), (0, 2), (1, 3), (2, 3), (3, 4)];
            Box::new(OimIcEnv::from_means(
                5,
                edges,
                1,
                &[0.6, 0.4, 0.5, 0.5, 0.7],
            )?)
        }
        other => {
            let text = std::fs::read_to_string(other)?;
            let inst: SyntheticCascadeInstance = serde_json::from_str(&text)?;
            Box::new(inst.into_env()?)
        }
    })
}

fn real_main() -> Result<i32, ccbandit::Error> {
    match Cli::parse().command {
        Command::Run {
            config,
            out,
            workers,
        } => {
            let cfg = ExperimentConfig::load(&config)?;
            let out_dir = out
                .or_else(|| cfg.out_dir.clone())
                .ok_or_else(|| {
                    ccbandit::Error::Config(
                        "no output directory: pass --out or set out_dir".into(),
                    )
                })?;
            run_experiment_to_dir(&cfg, &out_dir, workers)?;
            Ok(0)
        }
        Command::Gen {
            kind: GenKind::CascadeSynthetic,
            m,
            k,
            d,
            seed,
            out,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let inst = gen_synthetic_cascade(m, k, d, &mut rng)?;
            let mut json = serde_json::to_string_pretty(&inst)?;
            json.push('\n');
            std::fs::write(&out, json)?;
            Ok(0)
        }
        Command::Check {
            env,
            condition,
            b1,
            bv,
            lambda,
            bp,
            trials,
            seed,
            decomps,
        } => {
            let env = builtin_env(&env)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let report = match condition {
                ConditionArg::Mono => verify::check_monotonicity(env.as_ref(), trials, &mut rng),
                ConditionArg::Tpm => verify::check_tpm(env.as_ref(), b1, trials, &mut rng),
                ConditionArg::Vm => {
                    verify::check_vm(env.as_ref(), bv, b1, trials, decomps, &mut rng)
                }
                ConditionArg::Tpvm => {
                    verify::check_tpvm(env.as_ref(), bv, b1, lambda, trials, decomps, &mut rng)
                }
                ConditionArg::TpSmooth => {
                    verify::check_tp_smoothness(env.as_ref(), bp, trials, &mut rng)
                }
            };
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(if report.passed() { 0 } else { 1 })
        }
        Command::Contract {
            env,
            samples,
            seed,
            actions,
        } => {
            let env = builtin_env(&env)?;
            let report = contract_check(env.as_ref(), samples, actions, seed)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(if report.passed { 0 } else { 1 })
        }
    }
}

fn main() {
    match real_main() {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}
