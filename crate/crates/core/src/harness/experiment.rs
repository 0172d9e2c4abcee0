use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::checkpoint::{checkpoint_path, Checkpoint};
use super::config::{ExperimentConfig, RegretMode};
use super::stats::{summarize, Summary};
use super::HarnessError;
use crate::episode::{run_episode, Agent};
use crate::mdp::{Regime, TabularLookaheadMdp};
use crate::planning::{
    plan_no_lookahead, plan_reward_lookahead, plan_transition_lookahead, Evaluator, PlanError,
    RewardMethod, TransitionMethod, ValueTable,
};

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretPoint {
    pub seed: u64,
    pub k: usize,
    pub vstar: f64,
    pub policy_value: f64,
    pub cum_regret: f64,
    pub elapsed_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegretCurve {
    pub config_id: String,
    pub seed: u64,
    pub points: Vec<RegretPoint>,
}

impl RegretCurve {
    pub fn episodes(&self) -> usize {
        self.points.len()
    }

    pub fn cumulative(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.cum_regret).collect()
    }

    /// `Reg(k)` for 1-based `k`.
    pub fn regret_at(&self, k: usize) -> f64 {
        self.points[k - 1].cum_regret
    }

    pub fn final_regret(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.cum_regret)
    }

    /// Mean per-episode value over episodes `from..=K`.
    pub fn mean_value_from(&self, from: usize) -> f64 {
        let tail = &self.points[from - 1..];
        tail.iter().map(|p| p.policy_value).sum::<f64>() / tail.len() as f64
    }
}

/// Lookahead-optimal values for `regime`. Transition lookahead uses the
/// closed-form list planner when transitions are independent.
pub fn optimal_values(
    mdp: &TabularLookaheadMdp,
    regime: Regime,
    cap: usize,
) -> Result<ValueTable, PlanError> {
    Ok(match regime {
        Regime::None => plan_no_lookahead(mdp).values,
        Regime::Reward => plan_reward_lookahead(mdp, RewardMethod::Exact { cap })?.values,
        Regime::Transition if mdp.has_independent_transitions() => {
            plan_transition_lookahead(mdp, TransitionMethod::ExactList)?.values
        }
        Regime::Transition => {
            plan_transition_lookahead(mdp, TransitionMethod::ExactJoint { cap })?.values
        }
    })
}

/// Samples per `(h, s)` for the optimal values when exact planning exceeds
/// the support cap in realized-return mode.
const FALLBACK_SAMPLES: usize = 4096;

/// A validated config with its environment and optimal values loaded.
#[derive(Debug, Clone)]
pub struct Experiment {
    config: ExperimentConfig,
    mdp: TabularLookaheadMdp,
    vstar: ValueTable,
    resume: bool,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub curves: Vec<RegretCurve>,
    pub summary: Summary,
}

impl Experiment {
    pub fn new(config: ExperimentConfig) -> Result<Self, HarnessError> {
        config.validate()?;
        let mdp = config.env.load()?;
        let vstar = match optimal_values(&mdp, config.regime, config.support_cap) {
            Ok(v) => v,
            Err(PlanError::Capacity { .. }) if config.regret_mode == RegretMode::RealizedReturn => {
                let v = match config.regime {
                    Regime::Reward => plan_reward_lookahead(
                        &mdp,
                        RewardMethod::Sample {
                            samples: FALLBACK_SAMPLES,
                            seed: 0,
                        },
                    ),
                    _ => plan_transition_lookahead(
                        &mdp,
                        TransitionMethod::Sample {
                            samples: FALLBACK_SAMPLES,
                            seed: 0,
                        },
                    ),
                };
                v.map_err(|source| HarnessError::Plan { k: 0, source })?
                    .values
            }
            Err(source) => return Err(HarnessError::Plan { k: 0, source }),
        };
        Ok(Self {
            config,
            mdp,
            vstar,
            resume: false,
        })
    }

    /// Continue from existing checkpoints instead of starting over.
    pub fn with_resume(mut self, resume: bool) -> Self {
        self.resume = resume;
        self
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn mdp(&self) -> &TabularLookaheadMdp {
        &self.mdp
    }

    pub fn optimal(&self) -> &ValueTable {
        &self.vstar
    }

    pub fn run_seed(&self, seed: u64) -> Result<RegretCurve, HarnessError> {
        let cfg = &self.config;
        let mut learner = cfg
            .learner
            .build(&self.mdp, cfg.regime)
            .map_err(|source| HarnessError::Learner { k: 0, source })?;
        let ckpt = match (&cfg.output, cfg.checkpoint_every) {
            (Some(dir), Some(every)) => Some((checkpoint_path(dir, &cfg.id, seed), every)),
            _ => None,
        };
        let mut points = Vec::with_capacity(cfg.episodes);
        if let Some((path, _)) = ckpt.as_ref().filter(|_| self.resume) {
            if path.exists() {
                let c = Checkpoint::load(path)?;
                c.check(&cfg.id, seed, cfg.episodes, path)?;
                if let Some(store) = c.store {
                    learner
                        .restore(store)
                        .map_err(|source| HarnessError::Learner { k: c.k, source })?;
                }
                points = c.points;
            }
        }
        let mut cum = points.last().map_or(0.0, |p: &RegretPoint| p.cum_regret);
        let mut evaluator = Evaluator::new(&self.mdp, cfg.support_cap);
        for k in points.len() + 1..=cfg.episodes {
            let start = Instant::now();
            learner
                .plan(k)
                .map_err(|source| HarnessError::Learner { k, source })?;
            let s1 = self.mdp.initial_state(k);
            let vstar = self.vstar.initial(s1);
            let evaluated = match cfg.regret_mode {
                RegretMode::ExactEval => Some(
                    evaluator
                        .evaluate(&learner.policy())
                        .map_err(|source| HarnessError::Plan { k, source })?
                        .initial(s1),
                ),
                RegretMode::RealizedReturn => None,
            };
            let record = run_episode(
                &self.mdp,
                learner.as_mut() as &mut dyn Agent,
                cfg.regime,
                k,
                seed,
            )
            .map_err(|source| HarnessError::Episode { k, source })?;
            learner
                .update(&record)
                .map_err(|source| HarnessError::Learner { k, source })?;
            let policy_value = evaluated.unwrap_or(record.total_return);
            cum += vstar - policy_value;
            points.push(RegretPoint {
                seed,
                k,
                vstar,
                policy_value,
                cum_regret: cum,
                elapsed_ms: cfg.timing.then(|| start.elapsed().as_secs_f64() * 1e3),
            });
            if let Some((path, every)) = &ckpt {
                if k % every == 0 || k == cfg.episodes {
                    Checkpoint {
                        config_id: cfg.id.clone(),
                        seed,
                        k,
                        store: learner.store().cloned(),
                        points: points.clone(),
                    }
                    .save(path)?;
                }
            }
        }
        Ok(RegretCurve {
            config_id: cfg.id.clone(),
            seed,
            points,
        })
    }

    /// Runs every seed in order on the calling thread.
    pub fn run(&self) -> Result<ExperimentResult, HarnessError> {
        let curves = self
            .config
            .seeds
            .iter()
            .map(|&seed| self.run_seed(seed))
            .collect::<Result<Vec<_>, _>>()?;
        let summary = summarize(&self.config.id, &curves);
        Ok(ExperimentResult { curves, summary })
    }
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult, HarnessError> {
    Experiment::new(config.clone())?.run()
}
