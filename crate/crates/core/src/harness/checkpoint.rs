use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::experiment::RegretPoint;
use super::HarnessError;
use crate::learners::EmpiricalStore;

/// Learner data and curve so far; enough to resume a run bit-for-bit,
/// since learners replan from the store every episode.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checkpoint {
    pub config_id: String,
    pub seed: u64,
    /// Last completed episode.
    pub k: usize,
    pub store: Option<EmpiricalStore>,
    pub points: Vec<RegretPoint>,
}

pub fn checkpoint_path(dir: &Path, config_id: &str, seed: u64) -> PathBuf {
    dir.join(format!("{config_id}__seed{seed}.ckpt.json"))
}

impl Checkpoint {
    /// Writes through a temporary file so a crash never leaves a torn checkpoint.
    pub fn save(&self, path: &Path) -> Result<(), HarnessError> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
        }
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, self.to_json()).map_err(|e| HarnessError::io(&tmp, e))?;
        std::fs::rename(&tmp, path).map_err(|e| HarnessError::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_json(&text).map_err(|msg| HarnessError::Checkpoint {
            path: path.display().to_string(),
            msg,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| e.to_string())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("checkpoint serializes")
    }

    pub(crate) fn check(
        &self,
        config_id: &str,
        seed: u64,
        episodes: usize,
        path: &Path,
    ) -> Result<(), HarnessError> {
        let fail = |msg: String| {
            Err(HarnessError::Checkpoint {
                path: path.display().to_string(),
                msg,
            })
        };
        if self.config_id != config_id || self.seed != seed {
            return fail(format!("belongs to {} seed {}", self.config_id, self.seed));
        }
        if self.points.len() != self.k || self.k > episodes {
            return fail(format!(
                "{} points for episode {}",
                self.points.len(),
                self.k
            ));
        }
        if self
            .points
            .iter()
            .enumerate()
            .any(|(i, p)| p.k != i + 1 || p.seed != seed)
        {
            return fail("curve rows out of order".into());
        }
        Ok(())
    }
}
