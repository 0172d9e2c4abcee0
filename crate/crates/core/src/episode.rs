//! Episode execution under the three observation regimes.

use serde::Serialize;
use thiserror::Error;

use crate::mdp::{Regime, TabularLookaheadMdp};
use crate::rng::{Purpose, RngStream, StreamId};

/// Information revealed before acting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Observation {
    None,
    /// Realized reward of every action.
    Rewards(Vec<f64>),
    /// Realized next state of every action.
    NextStates(Vec<usize>),
}

/// Anything that can pick actions during an episode.
pub trait Agent {
    fn accepts(&self, regime: Regime) -> bool;

    /// Action for 0-based step `h` at `state`.
    fn act(&mut self, h: usize, state: usize, observation: &Observation) -> usize;
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EpisodeError {
    #[error("agent does not accept the {0} regime")]
    RegimeMismatch(Regime),
    #[error("agent chose action {action} at step {h} but only {num_actions} exist")]
    InvalidAction {
        h: usize,
        action: usize,
        num_actions: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord {
    pub state: usize,
    pub observation: Observation,
    /// Full reward vector drawn at this step, revealed or not.
    pub rewards: Vec<f64>,
    /// Full next-state vector drawn at this step, revealed or not.
    pub next_states: Vec<usize>,
    pub action: usize,
    pub reward: f64,
    pub next_state: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpisodeRecord {
    pub episode: usize,
    pub regime: Regime,
    pub steps: Vec<StepRecord>,
    pub total_return: f64,
}

impl EpisodeRecord {
    pub fn initial_state(&self) -> usize {
        self.steps[0].state
    }
}

/// Runs episode `k` (1-based). Each step draws a full reward vector and a
/// full next-state vector from fresh streams keyed by `(seed, k, h)`; the
/// regime decides which of the two the agent sees.
pub fn run_episode(
    mdp: &TabularLookaheadMdp,
    agent: &mut dyn Agent,
    regime: Regime,
    k: usize,
    seed: u64,
) -> Result<EpisodeRecord, EpisodeError> {
    if !agent.accepts(regime) {
        return Err(EpisodeError::RegimeMismatch(regime));
    }
    let num_actions = mdp.num_actions();
    let mut state = mdp.initial_state(k);
    let mut steps = Vec::with_capacity(mdp.horizon());
    let mut total = 0.0;
    for h in 0..mdp.horizon() {
        let mut reward_rng = RngStream::new(seed, StreamId::new(k as u64, h, Purpose::Reward));
        let mut next_rng = RngStream::new(seed, StreamId::new(k as u64, h, Purpose::Transition));
        let rewards = mdp.reward_dist(h, state).sample(&mut reward_rng);
        let next_states = mdp.transition_dist(h, state).sample(&mut next_rng);
        let observation = match regime {
            Regime::None => Observation::None,
            Regime::Reward => Observation::Rewards(rewards.clone()),
            Regime::Transition => Observation::NextStates(next_states.clone()),
        };
        let action = agent.act(h, state, &observation);
        if action >= num_actions {
            return Err(EpisodeError::InvalidAction {
                h,
                action,
                num_actions,
            });
        }
        let reward = rewards[action];
        let next_state = next_states[action];
        total += reward;
        steps.push(StepRecord {
            state,
            observation,
            rewards,
            next_states,
            action,
            reward,
            next_state,
        });
        state = next_state;
    }
    Ok(EpisodeRecord {
        episode: k,
        regime,
        steps,
        total_return: total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::{make_fig1_prophet, make_random_mdp};

    struct Constant(usize);

    impl Agent for Constant {
        fn accepts(&self, _: Regime) -> bool {
            true
        }
        fn act(&mut self, _: usize, _: usize, _: &Observation) -> usize {
            self.0
        }
    }

    struct Greedy;

    impl Agent for Greedy {
        fn accepts(&self, regime: Regime) -> bool {
            regime == Regime::Reward
        }
        fn act(&mut self, _: usize, _: usize, obs: &Observation) -> usize {
            match obs {
                Observation::Rewards(r) => crate::planning::argmax_first(r),
                _ => unreachable!(),
            }
        }
    }

    #[test]
    fn staying_in_fig1_earns_nothing() {
        let mdp = make_fig1_prophet(5, 20).unwrap();
        for k in 1..50 {
            let rec = run_episode(&mdp, &mut Constant(0), Regime::Reward, k, 9).unwrap();
            assert_eq!(rec.total_return, 0.0);
            assert!(rec.steps.iter().all(|st| st.state == 0));
        }
    }

    #[test]
    fn invalid_action_aborts() {
        let mdp = make_fig1_prophet(3, 4).unwrap();
        let err = run_episode(&mdp, &mut Constant(3), Regime::None, 1, 0).unwrap_err();
        assert_eq!(
            err,
            EpisodeError::InvalidAction {
                h: 0,
                action: 3,
                num_actions: 3
            }
        );
    }

    #[test]
    fn regime_mismatch_is_rejected() {
        let mdp = make_fig1_prophet(3, 4).unwrap();
        assert_eq!(
            run_episode(&mdp, &mut Greedy, Regime::Transition, 1, 0).unwrap_err(),
            EpisodeError::RegimeMismatch(Regime::Transition)
        );
    }

    #[test]
    fn one_step_greedy_collects_the_max() {
        let mdp = make_random_mdp(3, 4, 1, 5, true).unwrap();
        for k in 1..200 {
            let rec = run_episode(&mdp, &mut Greedy, Regime::Reward, k, 1).unwrap();
            let st = &rec.steps[0];
            let best = st.rewards.iter().cloned().fold(f64::MIN, f64::max);
            assert_eq!(rec.total_return, best);
        }
    }

    #[test]
    fn transition_lookahead_moves_to_observed_state() {
        let mdp = make_random_mdp(4, 3, 5, 2, false).unwrap();
        for k in 1..100 {
            let rec = run_episode(&mdp, &mut Constant(k % 3), Regime::Transition, k, 4).unwrap();
            for (i, st) in rec.steps.iter().enumerate() {
                let Observation::NextStates(ns) = &st.observation else {
                    panic!("missing observation")
                };
                assert_eq!(ns[st.action], st.next_state);
                if i + 1 < rec.steps.len() {
                    assert_eq!(rec.steps[i + 1].state, st.next_state);
                }
            }
            assert!(rec.total_return >= 0.0 && rec.total_return <= 5.0);
        }
    }

    #[test]
    fn replay_is_byte_identical() {
        let mdp = make_random_mdp(3, 3, 4, 11, false).unwrap();
        for regime in [Regime::None, Regime::Reward, Regime::Transition] {
            let a = run_episode(&mdp, &mut Constant(1), regime, 7, 123).unwrap();
            let b = run_episode(&mdp, &mut Constant(1), regime, 7, 123).unwrap();
            assert_eq!(
                serde_json::to_string(&a).unwrap(),
                serde_json::to_string(&b).unwrap()
            );
        }
    }
}
