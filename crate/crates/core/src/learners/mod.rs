//! Optimistic model-based learners.

mod bonus;
mod mvp_rl;
mod mvp_tl;
mod oracle;
mod store;
mod vanilla;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bonus::{
    log_term_rl, log_term_tl, monotone_bonus_value, rl_reward_bonus, rl_transition_bonus,
    rl_transition_term, tl_reward_bonus, tl_transition_bonus, variance, BonusConfig, BonusScale,
};
pub use mvp_rl::{mvp_rl_act, mvp_rl_bonuses, mvp_rl_plan, MvpRl};
pub use mvp_tl::{mvp_tl_act, mvp_tl_bonuses, mvp_tl_plan, MvpTl};
pub use oracle::OracleLearner;
pub use store::{EmpiricalStore, RewardEstimate, StoreError};
pub use vanilla::{vanilla_plan, VanillaMvp};

use crate::episode::{Agent, EpisodeRecord};
use crate::mdp::{Regime, TabularLookaheadMdp};
use crate::planning::{LookaheadPolicy, PlanError, ValueTable};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LearnerError {
    #[error("invalid learner config: {0}")]
    Config(String),
    #[error("{algo} cannot run under the {regime} regime")]
    Regime { algo: Algo, regime: Regime },
    #[error("observation has {got} entries, expected {expected}")]
    Arity { expected: usize, got: usize },
    #[error("observation out of range: {0}")]
    Observation(String),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Plan(#[from] PlanError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algo {
    MvpRl,
    MvpTl,
    MvpVanilla,
    /// Plays an exact optimal policy; a zero-regret reference.
    Oracle,
}

impl std::fmt::Display for Algo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algo::MvpRl => "mvp-rl",
            Algo::MvpTl => "mvp-tl",
            Algo::MvpVanilla => "mvp-vanilla",
            Algo::Oracle => "oracle",
        })
    }
}

impl Algo {
    pub fn accepts(self, regime: Regime) -> bool {
        match self {
            Algo::MvpRl => regime == Regime::Reward,
            Algo::MvpTl => regime == Regime::Transition,
            Algo::MvpVanilla | Algo::Oracle => true,
        }
    }
}

fn default_delta() -> f64 {
    0.1
}

/// Learner block of an experiment config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearnerConfig {
    pub algo: Algo,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default)]
    pub bonus_scale: BonusScale,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_term: Option<f64>,
    /// Mean-reward estimate of the vanilla learner under reward lookahead.
    #[serde(default)]
    pub reward_estimate: RewardEstimate,
}

impl LearnerConfig {
    pub fn new(algo: Algo) -> Self {
        Self {
            algo,
            delta: default_delta(),
            bonus_scale: BonusScale::default(),
            log_term: None,
            reward_estimate: RewardEstimate::default(),
        }
    }

    pub fn bonus(&self) -> BonusConfig {
        BonusConfig {
            delta: self.delta,
            bonus_scale: self.bonus_scale,
            log_term: self.log_term,
        }
    }

    pub fn build(
        &self,
        mdp: &TabularLookaheadMdp,
        regime: Regime,
    ) -> Result<Box<dyn Learner>, LearnerError> {
        if !self.algo.accepts(regime) {
            return Err(LearnerError::Regime {
                algo: self.algo,
                regime,
            });
        }
        let bonus = self.bonus();
        bonus.validate()?;
        let (sn, an, hn) = (mdp.num_states(), mdp.num_actions(), mdp.horizon());
        Ok(match self.algo {
            Algo::MvpRl => Box::new(MvpRl::new(sn, an, hn, bonus)?),
            Algo::MvpTl => Box::new(MvpTl::new(sn, an, hn, bonus)?),
            Algo::MvpVanilla => Box::new(VanillaMvp::new(
                regime,
                sn,
                an,
                hn,
                bonus,
                self.reward_estimate,
            )?),
            Algo::Oracle => Box::new(OracleLearner::new(mdp, regime)?),
        })
    }
}

/// A learning agent driven episode by episode.
pub trait Learner: Agent {
    fn algo(&self) -> Algo;

    /// Plans episode `k` (1-based) from the data of episodes `1..k`.
    fn plan(&mut self, k: usize) -> Result<(), LearnerError>;

    fn update(&mut self, record: &EpisodeRecord) -> Result<(), LearnerError>;

    /// The policy played in the current episode.
    fn policy(&self) -> LookaheadPolicy;

    /// Optimistic value of the first step at `s`, if the learner keeps one.
    fn optimistic_value(&self, _s: usize) -> Option<f64> {
        None
    }

    fn store(&self) -> Option<&EmpiricalStore> {
        None
    }

    fn restore(&mut self, _store: EmpiricalStore) -> Result<(), LearnerError> {
        Ok(())
    }
}

/// Truncated optimistic values plus the per-action scores used to act.
#[derive(Debug, Clone)]
pub struct OptimisticValues {
    pub values: ValueTable,
    num_actions: usize,
    scores: Vec<f64>,
}

impl OptimisticValues {
    pub(crate) fn new(values: ValueTable, num_actions: usize, scores: Vec<f64>) -> Self {
        Self {
            values,
            num_actions,
            scores,
        }
    }

    pub fn value(&self, h: usize, s: usize) -> f64 {
        self.values.get(h, s)
    }

    /// Cached scores of `(h, s)`, one per action.
    pub fn scores(&self, h: usize, s: usize) -> &[f64] {
        let start = (h * self.values.num_states() + s) * self.num_actions;
        &self.scores[start..start + self.num_actions]
    }

    pub(crate) fn all_scores(&self) -> &[f64] {
        &self.scores
    }
}

pub(crate) fn check_store(
    store: &EmpiricalStore,
    regime: Regime,
    sn: usize,
    an: usize,
    hn: usize,
) -> Result<(), LearnerError> {
    if store.regime() != regime
        || store.num_states() != sn
        || store.num_actions() != an
        || store.horizon() != hn
    {
        return Err(StoreError::Corrupt("checkpoint does not match the learner".into()).into());
    }
    Ok(())
}

/// The episode-`k` log term, or the configured override.
pub(crate) fn log_term(
    config: &BonusConfig,
    f: fn(usize, usize, usize, usize, f64) -> Result<f64, LearnerError>,
    k: usize,
    store: &EmpiricalStore,
) -> Result<f64, LearnerError> {
    match config.log_term {
        Some(l) => Ok(l),
        None => f(
            k,
            store.num_states(),
            store.num_actions(),
            store.horizon(),
            config.delta,
        ),
    }
}
