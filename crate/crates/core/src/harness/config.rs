use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::envfile::load_env_file;
use crate::envs::EnvSpec;
use crate::learners::LearnerConfig;
use crate::mdp::{Regime, TabularLookaheadMdp};
use crate::planning::DEFAULT_SUPPORT_CAP;

/// Where the environment comes from: a JSON file or a built-in family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EnvRef {
    File { path: PathBuf },
    Family(EnvSpec),
}

impl EnvRef {
    pub fn load(&self) -> Result<TabularLookaheadMdp, HarnessError> {
        match self {
            EnvRef::File { path } => {
                load_env_file(path).map_err(|e| HarnessError::Env(e.to_string()))
            }
            EnvRef::Family(spec) => spec.build().map_err(|e| HarnessError::Env(e.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegretMode {
    /// `V*_1(s_1) - V^{pi_k}_1(s_1)` with the played policy evaluated exactly.
    #[default]
    ExactEval,
    /// `V*_1(s_1) - G_k` with `G_k` the realized return.
    RealizedReturn,
}

fn default_cap() -> usize {
    DEFAULT_SUPPORT_CAP
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Run label; also the prefix of every output file.
    pub id: String,
    pub env: EnvRef,
    pub learner: LearnerConfig,
    pub regime: Regime,
    #[serde(rename = "K")]
    pub episodes: usize,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub regret_mode: RegretMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Write a checkpoint every this many episodes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoint_every: Option<usize>,
    /// Fill the `elapsed_ms` column. Off by default so outputs stay
    /// byte-reproducible.
    #[serde(default)]
    pub timing: bool,
    #[serde(default = "default_cap")]
    pub support_cap: usize,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    Many(Vec<ExperimentConfig>),
    One(Box<ExperimentConfig>),
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Config(format!("{}: {m}", self.id)));
        if self.id.is_empty()
            || self.id.contains("__")
            || !self
                .id
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c))
        {
            return Err(HarnessError::Config(format!(
                "config id {:?} must be non-empty ASCII letters, digits, '-', '_' or '.', without '__'",
                self.id
            )));
        }
        if self.episodes == 0 {
            return bad("K must be at least 1".into());
        }
        if self.seeds.is_empty() {
            return bad("seeds must be non-empty".into());
        }
        if self.seeds.iter().collect::<BTreeSet<_>>().len() != self.seeds.len() {
            return bad("seeds must be distinct".into());
        }
        if !self.learner.algo.accepts(self.regime) {
            return bad(format!(
                "{} cannot run under the {} regime",
                self.learner.algo, self.regime
            ));
        }
        if self.checkpoint_every == Some(0) {
            return bad("checkpoint_every must be at least 1".into());
        }
        self.learner
            .bonus()
            .validate()
            .map_err(|e| HarnessError::Config(format!("{}: {e}", self.id)))?;
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let c: Self =
            serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    fn resolve_paths(&mut self, base: &Path) {
        if let EnvRef::File { path } = &mut self.env {
            if path.is_relative() {
                *path = base.join(&*path);
            }
        }
        if let Some(out) = &mut self.output {
            if out.is_relative() {
                *out = base.join(&*out);
            }
        }
    }
}

/// Reads one config or an array of configs. Relative paths inside are
/// taken relative to the file's directory.
pub fn load_configs(path: &Path) -> Result<Vec<ExperimentConfig>, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    let parsed: OneOrMany = serde_json::from_str(&text)
        .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
    let mut configs = match parsed {
        OneOrMany::Many(v) => v,
        OneOrMany::One(c) => vec![*c],
    };
    if configs.is_empty() {
        return Err(HarnessError::Config(format!(
            "{}: no configs",
            path.display()
        )));
    }
    let base = path.parent().unwrap_or(Path::new("."));
    for c in &mut configs {
        c.resolve_paths(base);
        c.validate()?;
    }
    Ok(configs)
}
