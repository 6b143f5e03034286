use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::Deserialize;

use dard::agents::Policy;
use dard::domain::Domain;
use dard::orchestrator::{AgentSpec, Registry};

fn default_threshold() -> f64 {
    0.9
}

fn default_concurrency() -> usize {
    4
}

fn default_spec() -> AgentSpec {
    AgentSpec::template(Policy::SuggestAndAsk)
}

/// Run configuration, read from TOML.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// MultiWOZ 2.2 distribution root. Needed by `run`; optional for `chat`.
    #[serde(default)]
    pub corpus_root: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_threshold")]
    pub fuzzy_threshold: f64,
    #[serde(default = "default_concurrency")]
    pub concurrency: usize,
    #[serde(default)]
    pub agents: AgentsConfig,
    #[serde(default)]
    pub output: OutputPaths,
}

/// Agent wiring: `default` fills every role not listed explicitly.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentsConfig {
    #[serde(default = "default_spec")]
    pub default: AgentSpec,
    #[serde(default)]
    pub manager: Option<AgentSpec>,
    #[serde(default)]
    pub trackers: BTreeMap<Domain, AgentSpec>,
    #[serde(default)]
    pub responders: BTreeMap<Domain, AgentSpec>,
}

impl Default for AgentsConfig {
    fn default() -> Self {
        AgentsConfig {
            default: default_spec(),
            manager: None,
            trackers: BTreeMap::new(),
            responders: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    pub predictions: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub transcript: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<RunConfig> {
        let raw = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let mut cfg: RunConfig =
            toml::from_str(&raw).with_context(|| format!("invalid config {}", path.display()))?;
        // Relative corpus paths resolve against the config file.
        if let (Some(root), Some(dir)) = (&cfg.corpus_root, path.parent()) {
            if root.is_relative() {
                cfg.corpus_root = Some(dir.join(root));
            }
        }
        Ok(cfg)
    }

    /// Applies command-line overrides, then validates.
    pub fn finish(mut self, seed: Option<u64>, threshold: Option<f64>) -> anyhow::Result<RunConfig> {
        if let Some(s) = seed {
            self.seed = s;
        }
        if let Some(t) = threshold {
            self.fuzzy_threshold = t;
        }
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        check_threshold(self.fuzzy_threshold)?;
        if self.concurrency == 0 {
            bail!("concurrency must be at least 1");
        }
        self.registry().validate().map_err(anyhow::Error::msg)?;
        Ok(())
    }

    /// Full registry with the seed applied to every agent.
    pub fn registry(&self) -> Registry {
        let a = &self.agents;
        let seeded = |s: &AgentSpec| AgentSpec {
            seed: self.seed,
            ..s.clone()
        };
        let mut reg = Registry::uniform(seeded(&a.default));
        if let Some(m) = &a.manager {
            reg.manager = seeded(m);
        }
        for (d, s) in &a.trackers {
            reg.trackers.insert(*d, seeded(s));
        }
        for (d, s) in &a.responders {
            reg.responders.insert(*d, seeded(s));
        }
        reg
    }
}

pub fn check_threshold(t: f64) -> anyhow::Result<()> {
    if !(t > 0.0 && t <= 1.0) {
        bail!("fuzzy threshold must be in (0, 1], got {t}");
    }
    Ok(())
}
