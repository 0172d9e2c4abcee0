//! JSON environment files.
//!
//! ```json
//! {
//!   "S": 2, "A": 2, "H": 1,
//!   "rewards":     [[{"kind": "product", "marginals": [[{"value": 0.0, "weight": 1.0}], ...]}, ...]],
//!   "transitions": [[{"kind": "joint", "atoms": [{"weight": 1.0, "outcome": [0, 1]}]}, ...]],
//!   "initial_states": [0]
//! }
//! ```
//!
//! `rewards[h][s]` and `transitions[h][s]` use 0-based indices into the
//! 1-based steps `1..=H`. Weights whose total drifts from 1 by at most
//! [`DRIFT_TOL`] are renormalized; larger drift is rejected. Totals within
//! round-off of 1 are kept as written.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dist::{Atom, JointFiniteDistribution, JointKind, Marginal, Outcome};
use crate::mdp::{InitialStates, ModelError, TabularLookaheadMdp};

pub const DRIFT_TOL: f64 = 1e-9;

/// Drift treated as summation round-off and not renormalized.
const ROUNDING_TOL: f64 = 1e-12;

/// Upper bound on `H * S * A * S`, the size of the dense kernel.
const MAX_MODEL_CELLS: u128 = 50_000_000;

#[derive(Debug, Error)]
pub enum EnvFileError {
    #[error("malformed environment JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{what} at step {h}, state {s}: weights sum to {total}, drift above {DRIFT_TOL}")]
    Drift {
        what: &'static str,
        h: usize,
        s: usize,
        total: f64,
    },
    #[error("{what} at step {h}, state {s}: {msg}")]
    Entry {
        what: &'static str,
        h: usize,
        s: usize,
        msg: String,
    },
    #[error("environment too large")]
    TooLarge,
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvFile {
    #[serde(rename = "S")]
    pub num_states: usize,
    #[serde(rename = "A")]
    pub num_actions: usize,
    #[serde(rename = "H")]
    pub horizon: usize,
    pub rewards: Vec<Vec<DistFile<f64>>>,
    pub transitions: Vec<Vec<DistFile<usize>>>,
    #[serde(default = "default_initial")]
    pub initial_states: Vec<usize>,
}

fn default_initial() -> Vec<usize> {
    vec![0]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DistFile<T> {
    Joint { atoms: Vec<AtomFile<T>> },
    Product { marginals: Vec<Vec<PointFile<T>>> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomFile<T> {
    pub weight: f64,
    pub outcome: Vec<T>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointFile<T> {
    pub value: T,
    pub weight: f64,
}

pub fn parse_env_json(text: &str) -> Result<TabularLookaheadMdp, EnvFileError> {
    let file: EnvFile = serde_json::from_str(text)?;
    file.into_mdp()
}

pub fn load_env_file(path: &Path) -> Result<TabularLookaheadMdp, EnvFileError> {
    let text = fs::read_to_string(path).map_err(|source| EnvFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_env_json(&text)
}

pub fn to_env_json(mdp: &TabularLookaheadMdp) -> String {
    serde_json::to_string_pretty(&EnvFile::from_mdp(mdp)).expect("env file serializes")
}

pub fn save_env_file(mdp: &TabularLookaheadMdp, path: &Path) -> std::io::Result<()> {
    fs::write(path, to_env_json(mdp) + "\n")
}

impl EnvFile {
    pub fn from_mdp(mdp: &TabularLookaheadMdp) -> Self {
        let (hn, sn) = (mdp.horizon(), mdp.num_states());
        let grid = |f: &dyn Fn(usize, usize) -> _| -> Vec<Vec<_>> {
            (0..hn)
                .map(|h| (0..sn).map(|s| f(h, s)).collect())
                .collect()
        };
        Self {
            num_states: sn,
            num_actions: mdp.num_actions(),
            horizon: hn,
            rewards: grid(&|h, s| dist_to_file(mdp.reward_dist(h, s).kind())),
            transitions: (0..hn)
                .map(|h| {
                    (0..sn)
                        .map(|s| dist_to_file(mdp.transition_dist(h, s).kind()))
                        .collect()
                })
                .collect(),
            initial_states: mdp.initial_states().states().to_vec(),
        }
    }

    pub fn into_mdp(self) -> Result<TabularLookaheadMdp, EnvFileError> {
        let cells = (self.horizon as u128)
            .saturating_mul(self.num_states as u128)
            .saturating_mul(self.num_actions as u128)
            .saturating_mul(self.num_states as u128);
        if cells > MAX_MODEL_CELLS {
            return Err(EnvFileError::TooLarge);
        }
        let rewards = convert_grid("reward", self.rewards)?;
        let transitions = convert_grid("transition", self.transitions)?;
        Ok(TabularLookaheadMdp::new(
            self.num_states,
            self.num_actions,
            self.horizon,
            rewards,
            transitions,
            InitialStates::cyclic(self.initial_states),
        )?)
    }
}

fn dist_to_file<T: Outcome>(kind: &JointKind<T>) -> DistFile<T> {
    match kind {
        JointKind::Joint(atoms) => DistFile::Joint {
            atoms: atoms
                .iter()
                .map(|a| AtomFile {
                    weight: a.weight,
                    outcome: a.outcome.clone(),
                })
                .collect(),
        },
        JointKind::Product(ms) => DistFile::Product {
            marginals: ms
                .iter()
                .map(|m| {
                    m.support()
                        .iter()
                        .map(|&(value, weight)| PointFile { value, weight })
                        .collect()
                })
                .collect(),
        },
    }
}

fn convert_grid<T: Outcome>(
    what: &'static str,
    grid: Vec<Vec<DistFile<T>>>,
) -> Result<Vec<Vec<JointFiniteDistribution<T>>>, EnvFileError> {
    grid.into_iter()
        .enumerate()
        .map(|(h, row)| {
            row.into_iter()
                .enumerate()
                .map(|(s, d)| convert(what, h, s, d))
                .collect()
        })
        .collect()
}

fn convert<T: Outcome>(
    what: &'static str,
    h: usize,
    s: usize,
    d: DistFile<T>,
) -> Result<JointFiniteDistribution<T>, EnvFileError> {
    let entry = |e: crate::dist::DistError| EnvFileError::Entry {
        what,
        h,
        s,
        msg: e.to_string(),
    };
    match d {
        DistFile::Joint { atoms } => {
            let scale = normalizer(what, h, s, atoms.iter().map(|a| a.weight))?;
            let arity = atoms.first().map_or(0, |a| a.outcome.len());
            let atoms = atoms
                .into_iter()
                .map(|a| Atom {
                    weight: a.weight / scale,
                    outcome: a.outcome,
                })
                .collect();
            JointFiniteDistribution::joint(arity, atoms).map_err(entry)
        }
        DistFile::Product { marginals } => {
            let ms = marginals
                .into_iter()
                .map(|points| {
                    let scale = normalizer(what, h, s, points.iter().map(|p| p.weight))?;
                    Marginal::new(
                        points
                            .into_iter()
                            .map(|p| (p.value, p.weight / scale))
                            .collect(),
                    )
                    .map_err(entry)
                })
                .collect::<Result<Vec<_>, _>>()?;
            JointFiniteDistribution::product(ms).map_err(entry)
        }
    }
}

/// Total weight to divide by, provided it is within the drift tolerance.
fn normalizer(
    what: &'static str,
    h: usize,
    s: usize,
    weights: impl Iterator<Item = f64>,
) -> Result<f64, EnvFileError> {
    let total: f64 = weights.sum();
    if !total.is_finite() || (total - 1.0).abs() > DRIFT_TOL {
        return Err(EnvFileError::Drift { what, h, s, total });
    }
    // rounding noise from summation is left alone so that saving and
    // reloading a model reproduces its weights exactly
    if (total - 1.0).abs() <= ROUNDING_TOL {
        return Ok(1.0);
    }
    Ok(total)
}
