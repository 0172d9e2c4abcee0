//! Reference agent that plays an exact optimal policy from the start.

use super::{Algo, Learner, LearnerError};
use crate::episode::{Agent, EpisodeRecord, Observation};
use crate::mdp::{Regime, TabularLookaheadMdp};
use crate::planning::{
    plan_no_lookahead, plan_reward_lookahead, plan_transition_lookahead, LookaheadPolicy, Plan,
    RewardMethod, TransitionMethod,
};

#[derive(Debug, Clone)]
pub struct OracleLearner {
    plan: Plan,
}

impl OracleLearner {
    pub fn new(mdp: &TabularLookaheadMdp, regime: Regime) -> Result<Self, LearnerError> {
        let plan = match regime {
            Regime::None => plan_no_lookahead(mdp),
            Regime::Reward => plan_reward_lookahead(mdp, RewardMethod::default())?,
            Regime::Transition => plan_transition_lookahead(mdp, TransitionMethod::default())?,
        };
        Ok(Self { plan })
    }
}

impl Agent for OracleLearner {
    fn accepts(&self, regime: Regime) -> bool {
        self.plan.policy.accepts(regime)
    }

    fn act(&mut self, h: usize, state: usize, observation: &Observation) -> usize {
        self.plan.policy.act(h, state, observation)
    }
}

impl Learner for OracleLearner {
    fn algo(&self) -> Algo {
        Algo::Oracle
    }

    fn plan(&mut self, _k: usize) -> Result<(), LearnerError> {
        Ok(())
    }

    fn update(&mut self, _record: &EpisodeRecord) -> Result<(), LearnerError> {
        Ok(())
    }

    fn policy(&self) -> LookaheadPolicy {
        self.plan.policy.clone()
    }

    fn optimistic_value(&self, s: usize) -> Option<f64> {
        Some(self.plan.values.initial(s))
    }
}
