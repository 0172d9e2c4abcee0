//! Episodic tabular MDP whose per-step randomness is a joint draw over all
//! actions.
//!
//! Steps are indexed `0..H` in code; step `h` here is step `h + 1` in the
//! usual 1-based notation. Files and CSV output use 1-based steps.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dist::{DistError, JointFiniteDistribution};

pub type RewardDist = JointFiniteDistribution<f64>;
pub type TransitionDist = JointFiniteDistribution<usize>;

/// What the agent sees before acting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    None,
    Reward,
    Transition,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::None => "none",
            Regime::Reward => "reward",
            Regime::Transition => "transition",
        })
    }
}

impl FromStr for Regime {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(Regime::None),
            "reward" => Ok(Regime::Reward),
            "transition" => Ok(Regime::Transition),
            other => Err(format!("unknown regime `{other}`")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("S, A and H must be positive")]
    EmptyDimension,
    #[error("expected {expected} {what} entries, got {got}")]
    WrongCount {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("{what} at step {h}, state {s}: {source}")]
    Dist {
        what: &'static str,
        h: usize,
        s: usize,
        source: DistError,
    },
    #[error("{what} at step {h}, state {s} has arity {got}, expected A = {expected}")]
    Arity {
        what: &'static str,
        h: usize,
        s: usize,
        expected: usize,
        got: usize,
    },
    #[error("reward {value} at step {h}, state {s} lies outside [0, 1]")]
    RewardRange { h: usize, s: usize, value: f64 },
    #[error("next state {value} at step {h}, state {s} is not below S = {num_states}")]
    StateRange {
        h: usize,
        s: usize,
        value: usize,
        num_states: usize,
    },
    #[error("initial state schedule is empty")]
    NoInitialState,
    #[error("initial state {0} out of range")]
    InitialStateRange(usize),
}

/// Rule producing the first state of each episode: a cyclic list
/// (a fixed state is a list of length one).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InitialStates(Vec<usize>);

impl InitialStates {
    pub fn fixed(state: usize) -> Self {
        Self(vec![state])
    }

    pub fn cyclic(states: Vec<usize>) -> Self {
        Self(states)
    }

    /// Initial state of episode `k` (1-based).
    pub fn for_episode(&self, k: usize) -> usize {
        self.0[(k.max(1) - 1) % self.0.len()]
    }

    pub fn states(&self) -> &[usize] {
        &self.0
    }
}

impl Default for InitialStates {
    fn default() -> Self {
        Self::fixed(0)
    }
}

/// Full environment: sizes, per-(h, s) joint reward and next-state laws and
/// the initial-state schedule. Immutable after construction.
#[derive(Debug, Clone)]
pub struct TabularLookaheadMdp {
    num_states: usize,
    num_actions: usize,
    horizon: usize,
    rewards: Vec<RewardDist>,
    transitions: Vec<TransitionDist>,
    initial_states: InitialStates,
    mean_rewards: Vec<f64>,
    kernel: Vec<f64>,
}

impl TabularLookaheadMdp {
    /// `rewards` and `transitions` are indexed `[h][s]`.
    pub fn new(
        num_states: usize,
        num_actions: usize,
        horizon: usize,
        rewards: Vec<Vec<RewardDist>>,
        transitions: Vec<Vec<TransitionDist>>,
        initial_states: InitialStates,
    ) -> Result<Self, ModelError> {
        if num_states == 0 || num_actions == 0 || horizon == 0 {
            return Err(ModelError::EmptyDimension);
        }
        let rewards = flatten("reward", rewards, horizon, num_states)?;
        let transitions = flatten("transition", transitions, horizon, num_states)?;
        if initial_states.0.is_empty() {
            return Err(ModelError::NoInitialState);
        }
        if let Some(&bad) = initial_states.0.iter().find(|&&s| s >= num_states) {
            return Err(ModelError::InitialStateRange(bad));
        }

        let (sn, an) = (num_states, num_actions);
        let mut mean_rewards = vec![0.0; horizon * sn * an];
        let mut kernel = vec![0.0; horizon * sn * an * sn];
        for h in 0..horizon {
            for s in 0..sn {
                let idx = h * sn + s;
                let (rd, td) = (&rewards[idx], &transitions[idx]);
                for (what, arity) in [("reward", rd.arity()), ("transition", td.arity())] {
                    if arity != an {
                        return Err(ModelError::Arity {
                            what,
                            h,
                            s,
                            expected: an,
                            got: arity,
                        });
                    }
                }
                for a in 0..an {
                    for (value, weight) in rd.marginal(a) {
                        if !(0.0..=1.0).contains(&value) {
                            return Err(ModelError::RewardRange { h, s, value });
                        }
                        mean_rewards[idx * an + a] += value * weight;
                    }
                    for (value, weight) in td.marginal(a) {
                        if value >= sn {
                            return Err(ModelError::StateRange {
                                h,
                                s,
                                value,
                                num_states: sn,
                            });
                        }
                        kernel[(idx * an + a) * sn + value] += weight;
                    }
                }
            }
        }

        Ok(Self {
            num_states,
            num_actions,
            horizon,
            rewards,
            transitions,
            initial_states,
            mean_rewards,
            kernel,
        })
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn initial_states(&self) -> &InitialStates {
        &self.initial_states
    }

    pub fn initial_state(&self, k: usize) -> usize {
        self.initial_states.for_episode(k)
    }

    pub fn reward_dist(&self, h: usize, s: usize) -> &RewardDist {
        &self.rewards[h * self.num_states + s]
    }

    pub fn transition_dist(&self, h: usize, s: usize) -> &TransitionDist {
        &self.transitions[h * self.num_states + s]
    }

    /// Expected reward `r_h(s, a)`.
    pub fn mean_reward(&self, h: usize, s: usize, a: usize) -> f64 {
        self.mean_rewards[(h * self.num_states + s) * self.num_actions + a]
    }

    /// Marginal next-state law `P_h(. | s, a)` as a dense vector over states.
    pub fn kernel(&self, h: usize, s: usize, a: usize) -> &[f64] {
        let sn = self.num_states;
        let start = ((h * sn + s) * self.num_actions + a) * sn;
        &self.kernel[start..start + sn]
    }

    /// `sum_s' P_h(s' | s, a) v(s')`.
    pub fn expected_next(&self, h: usize, s: usize, a: usize, v: &[f64]) -> f64 {
        self.kernel(h, s, a).iter().zip(v).map(|(p, x)| p * x).sum()
    }

    /// True when every transition joint has independent coordinates.
    pub fn has_independent_transitions(&self) -> bool {
        self.transitions.iter().all(|d| d.is_independent())
    }
}

fn flatten<T>(
    what: &'static str,
    table: Vec<Vec<T>>,
    horizon: usize,
    num_states: usize,
) -> Result<Vec<T>, ModelError> {
    if table.len() != horizon {
        return Err(ModelError::WrongCount {
            what,
            expected: horizon,
            got: table.len(),
        });
    }
    let mut out = Vec::with_capacity(horizon * num_states);
    for row in table {
        if row.len() != num_states {
            return Err(ModelError::WrongCount {
                what,
                expected: num_states,
                got: row.len(),
            });
        }
        out.extend(row);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Marginal;

    fn one_state(reward: f64, next: usize) -> (Vec<Vec<RewardDist>>, Vec<Vec<TransitionDist>>) {
        (
            vec![vec![JointFiniteDistribution::point(vec![reward]).unwrap()]],
            vec![vec![JointFiniteDistribution::point(vec![next]).unwrap()]],
        )
    }

    #[test]
    fn rejects_out_of_range_values() {
        let (r, t) = one_state(1.5, 0);
        assert!(matches!(
            TabularLookaheadMdp::new(1, 1, 1, r, t, InitialStates::default()),
            Err(ModelError::RewardRange { .. })
        ));
        let (r, t) = one_state(0.5, 3);
        assert!(matches!(
            TabularLookaheadMdp::new(1, 1, 1, r, t, InitialStates::default()),
            Err(ModelError::StateRange { .. })
        ));
    }

    #[test]
    fn rejects_wrong_shapes() {
        let (r, t) = one_state(0.5, 0);
        assert!(matches!(
            TabularLookaheadMdp::new(1, 1, 2, r.clone(), t.clone(), InitialStates::default()),
            Err(ModelError::WrongCount { .. })
        ));
        assert!(matches!(
            TabularLookaheadMdp::new(1, 2, 1, r.clone(), t.clone(), InitialStates::default()),
            Err(ModelError::Arity { .. })
        ));
        assert!(matches!(
            TabularLookaheadMdp::new(1, 1, 1, r, t, InitialStates::cyclic(vec![])),
            Err(ModelError::NoInitialState)
        ));
    }

    #[test]
    fn derived_means_and_kernel() {
        let r = vec![vec![
            JointFiniteDistribution::product(vec![
                Marginal::bernoulli(0.25).unwrap(),
                Marginal::bernoulli(0.75).unwrap(),
            ])
            .unwrap();
            2
        ]];
        let t = vec![
            vec![
                JointFiniteDistribution::product(vec![
                    Marginal::new(vec![(0, 0.4), (1, 0.6)]).unwrap(),
                    Marginal::point(1),
                ])
                .unwrap();
                2
            ];
            1
        ];
        let m = TabularLookaheadMdp::new(2, 2, 1, r, t, InitialStates::cyclic(vec![1, 0])).unwrap();
        assert_eq!(m.mean_reward(0, 1, 1), 0.75);
        assert_eq!(m.kernel(0, 0, 0), &[0.4, 0.6]);
        assert_eq!(m.kernel(0, 0, 1), &[0.0, 1.0]);
        assert_eq!(m.initial_state(1), 1);
        assert_eq!(m.initial_state(2), 0);
        assert_eq!(m.initial_state(3), 1);
        assert!(m.has_independent_transitions());
    }

    #[test]
    fn regime_parses() {
        assert_eq!("reward".parse::<Regime>().unwrap(), Regime::Reward);
        assert!("lookahead".parse::<Regime>().is_err());
        assert_eq!(Regime::Transition.to_string(), "transition");
    }
}
