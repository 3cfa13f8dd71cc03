//! Experiment configuration: TOML with strict (unknown keys rejected)
//! parsing, environment and policy construction.

use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::env::cascade::CascadeKind;
use crate::env::{
    gen_synthetic_cascade, OimIcEnv, PmcBipartiteEnv, RatingMatrixCascadeEnv,
    SyntheticCascadeInstance,
};
use crate::error::{Error, Result};
use crate::harness::io;
use crate::model::Environment;
use crate::policy::{ContextualUcb, Cucb, Policy, PolicyConfig, VarianceAdaptiveUcb, VarianceCucb};
use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegretReference {
    BruteForce,
    GreedyOnTrueMeans,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnvKind {
    CascadeSynthetic,
    CascadeFile,
    RatingCascade,
    Pmc,
    Oim,
}

/// Environment section. A flat optional-field struct rather than a tagged
/// enum so that unknown keys are rejected; `build` checks that exactly the
/// keys needed by `kind` are present.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvConfig {
    pub kind: EnvKind,
    /// cascade-synthetic: number of arms.
    pub m: Option<usize>,
    /// slate size or seed budget.
    pub k: Option<usize>,
    /// cascade-synthetic: feature dimension.
    pub d: Option<usize>,
    /// cascade-synthetic: generation seed.
    pub seed: Option<u64>,
    /// cascade-synthetic: disjunctive (default) or conjunctive.
    pub variant: Option<CascadeKind>,
    /// cascade-file: JSON instance path.
    pub path: Option<PathBuf>,
    /// rating-cascade: feature CSV path.
    pub features: Option<PathBuf>,
    /// rating-cascade: rating CSV path.
    pub ratings: Option<PathBuf>,
    /// pmc/oim: graph file path.
    pub graph: Option<PathBuf>,
    /// pmc/oim: per-edge means.
    pub means: Option<Vec<Real>>,
    /// pmc/oim: single mean applied to every edge.
    pub edge_mean: Option<Real>,
}

impl EnvConfig {
    fn require<T: Clone>(opt: &Option<T>, key: &str, kind: &str) -> Result<T> {
        opt.clone()
            .ok_or_else(|| Error::Config(format!("env kind {kind} requires key `{key}`")))
    }

    fn reject_irrelevant(&self, kind: &str, allowed: &[&str]) -> Result<()> {
        let present: &[(&str, bool)] = &[
            ("m", self.m.is_some()),
            ("k", self.k.is_some()),
            ("d", self.d.is_some()),
            ("seed", self.seed.is_some()),
            ("variant", self.variant.is_some()),
            ("path", self.path.is_some()),
            ("features", self.features.is_some()),
            ("ratings", self.ratings.is_some()),
            ("graph", self.graph.is_some()),
            ("means", self.means.is_some()),
            ("edge_mean", self.edge_mean.is_some()),
        ];
        for (key, set) in present {
            if *set && !allowed.contains(key) {
                return Err(Error::Config(format!(
                    "env kind {kind} does not accept key `{key}`"
                )));
            }
        }
        Ok(())
    }

    fn edge_means(&self, num_edges: usize, kind: &str) -> Result<Vec<Real>> {
        match (&self.means, self.edge_mean) {
            (Some(_), Some(_)) => Err(Error::Config(format!(
                "env kind {kind}: give either `means` or `edge_mean`, not both"
            ))),
            (Some(m), None) => {
                if m.len() != num_edges {
                    return Err(Error::Config(format!(
                        "env kind {kind}: `means` has {} entries but the graph has {num_edges} edges",
                        m.len()
                    )));
                }
                Ok(m.clone())
            }
            (None, Some(x)) => Ok(vec![x; num_edges]),
            (None, None) => Err(Error::Config(format!(
                "env kind {kind} requires `means` or `edge_mean`"
            ))),
        }
    }

    pub fn build(&self) -> Result<Box<dyn Environment>> {
        match self.kind {
            EnvKind::CascadeSynthetic => {
                self.reject_irrelevant("cascade-synthetic", &["m", "k", "d", "seed", "variant"])?;
                let m = Self::require(&self.m, "m", "cascade-synthetic")?;
                let k = Self::require(&self.k, "k", "cascade-synthetic")?;
                let d = Self::require(&self.d, "d", "cascade-synthetic")?;
                let seed = Self::require(&self.seed, "seed", "cascade-synthetic")?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut inst = gen_synthetic_cascade(m, k, d, &mut rng)?;
                inst.kind = self.variant.unwrap_or(CascadeKind::Disjunctive);
                Ok(Box::new(inst.into_env()?))
            }
            EnvKind::CascadeFile => {
                self.reject_irrelevant("cascade-file", &["path"])?;
                let path = Self::require(&self.path, "path", "cascade-file")?;
                let text = std::fs::read_to_string(&path)?;
                let inst: SyntheticCascadeInstance = serde_json::from_str(&text)?;
                Ok(Box::new(inst.into_env()?))
            }
            EnvKind::RatingCascade => {
                self.reject_irrelevant("rating-cascade", &["features", "ratings", "k"])?;
                let features = Self::require(&self.features, "features", "rating-cascade")?;
                let ratings = Self::require(&self.ratings, "ratings", "rating-cascade")?;
                let k = Self::require(&self.k, "k", "rating-cascade")?;
                let ctx = io::ingest_features(&features)?;
                let matrix = io::ingest_ratings(&ratings, ctx.num_arms())?;
                Ok(Box::new(RatingMatrixCascadeEnv::new(ctx, matrix, k)?))
            }
            EnvKind::Pmc => {
                self.reject_irrelevant("pmc", &["graph", "k", "means", "edge_mean"])?;
                let graph = Self::require(&self.graph, "graph", "pmc")?;
                let k = Self::require(&self.k, "k", "pmc")?;
                let (l, v, edges) = io::parse_pmc_graph(&graph)?;
                let mu = self.edge_means(edges.len(), "pmc")?;
                Ok(Box::new(PmcBipartiteEnv::from_means(l, v, edges, k, &mu)?))
            }
            EnvKind::Oim => {
                self.reject_irrelevant("oim", &["graph", "k", "means", "edge_mean"])?;
                let graph = Self::require(&self.graph, "graph", "oim")?;
                let k = Self::require(&self.k, "k", "oim")?;
                let (n, edges) = io::parse_oim_graph(&graph)?;
                let mu = self.edge_means(edges.len(), "oim")?;
                Ok(Box::new(OimIcEnv::from_means(n, edges, k, &mu)?))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyKind {
    ContextualUcb,
    VarianceAdaptiveUcb,
    Cucb,
    VarianceCucb,
}

impl PolicyKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            PolicyKind::ContextualUcb => "contextual-ucb",
            PolicyKind::VarianceAdaptiveUcb => "variance-adaptive-ucb",
            PolicyKind::Cucb => "cucb",
            PolicyKind::VarianceCucb => "variance-cucb",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicySpec {
    pub kind: PolicyKind,
    /// Output id; defaults to the kind name.
    pub name: Option<String>,
    pub gamma: Option<Real>,
    pub delta: Option<Real>,
    pub exploration_scale: Option<Real>,
}

impl PolicySpec {
    pub fn id(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.kind.as_str().into())
    }

    pub fn build(
        &self,
        dim: usize,
        num_arms: usize,
        batch_bound: usize,
        horizon: u64,
    ) -> Result<Box<dyn Policy>> {
        let apply = |mut cfg: PolicyConfig| {
            if let Some(g) = self.gamma {
                cfg.gamma = g;
            }
            if let Some(d) = self.delta {
                cfg.delta = d;
            }
            if let Some(s) = self.exploration_scale {
                cfg.exploration_scale = s;
            }
            cfg
        };
        Ok(match self.kind {
            PolicyKind::ContextualUcb => Box::new(ContextualUcb::new(apply(
                PolicyConfig::contextual(dim, batch_bound, horizon),
            ))?),
            PolicyKind::VarianceAdaptiveUcb => Box::new(VarianceAdaptiveUcb::new(apply(
                PolicyConfig::variance_adaptive(dim, batch_bound, horizon),
            ))?),
            PolicyKind::Cucb => Box::new(Cucb::new(num_arms)),
            PolicyKind::VarianceCucb => Box::new(VarianceCucb::new(num_arms)),
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub horizon: u64,
    pub seeds: Vec<u64>,
    pub regret_reference: RegretReference,
    #[serde(default)]
    pub mc_contract_checks: bool,
    /// Output directory; the CLI `--out` flag overrides it.
    pub out_dir: Option<PathBuf>,
    pub env: EnvConfig,
    pub policies: Vec<PolicySpec>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parses the file and resolves relative data paths against its
    /// directory; referenced files must exist.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        cfg.resolve_paths(base)?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if self.horizon < 1 {
            return Err(Error::Config("horizon must be >= 1".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::Config("at least one seed is required".into()));
        }
        if self.policies.is_empty() {
            return Err(Error::Config("at least one policy is required".into()));
        }
        let mut ids: Vec<String> = self.policies.iter().map(|p| p.id()).collect();
        ids.sort();
        ids.dedup();
        if ids.len() != self.policies.len() {
            return Err(Error::Config(
                "policy ids must be unique (set `name` to disambiguate)".into(),
            ));
        }
        Ok(())
    }

    fn resolve_paths(&mut self, base: &Path) -> Result<()> {
        for p in [
            &mut self.env.path,
            &mut self.env.features,
            &mut self.env.ratings,
            &mut self.env.graph,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&p);
            }
            if !p.exists() {
                return Err(Error::Config(format!(
                    "referenced file does not exist: {}",
                    p.display()
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_toml() -> &'static str {
        r#"
horizon = 10
seeds = [1, 2]
regret_reference = "brute-force"

[env]
kind = "cascade-synthetic"
m = 6
k = 2
d = 3
seed = 7

[[policies]]
kind = "contextual-ucb"
"#
    }

    #[test]
    fn parses_minimal_config() {
        let cfg = ExperimentConfig::from_toml(minimal_toml()).unwrap();
        assert_eq!(cfg.horizon, 10);
        assert_eq!(cfg.seeds, vec![1, 2]);
        assert!(!cfg.mc_contract_checks);
        let env = cfg.env.build().unwrap();
        assert_eq!(env.num_arms(), 6);
        assert_eq!(env.batch_bound(), 2);
    }

    #[test]
    fn unknown_keys_are_hard_errors() {
        let bad = minimal_toml().replace("horizon = 10", "horizon = 10\nhorzion = 3");
        assert!(ExperimentConfig::from_toml(&bad).is_err());
        let bad_env = minimal_toml().replace("seed = 7", "seed = 7\nslate = 2");
        assert!(ExperimentConfig::from_toml(&bad_env).is_err());
    }

    #[test]
    fn irrelevant_env_keys_are_rejected_at_build() {
        let cfg = ExperimentConfig::from_toml(
            &minimal_toml().replace("seed = 7", "seed = 7\nedge_mean = 0.5"),
        )
        .unwrap();
        assert!(cfg.env.build().is_err());
    }

    #[test]
    fn duplicate_policy_ids_are_rejected() {
        let dup = format!("{}\n[[policies]]\nkind = \"contextual-ucb\"\n", minimal_toml());
        assert!(ExperimentConfig::from_toml(&dup).is_err());
        let named = format!(
            "{}\n[[policies]]\nkind = \"contextual-ucb\"\nname = \"tuned\"\n",
            minimal_toml()
        );
        assert!(ExperimentConfig::from_toml(&named).is_ok());
    }

    #[test]
    fn policy_overrides_apply() {
        let toml = minimal_toml().replace(
            "kind = \"contextual-ucb\"",
            "kind = \"contextual-ucb\"\ngamma = 3.5\nexploration_scale = 0.1",
        );
        let cfg = ExperimentConfig::from_toml(&toml).unwrap();
        let spec = &cfg.policies[0];
        assert_eq!(spec.gamma, Some(3.5));
        assert!(spec.build(3, 6, 2, 10).is_ok());
    }
}
