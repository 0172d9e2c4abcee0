//! Hard instances and random instances.

use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dist::{Atom, JointFiniteDistribution, Marginal};
use crate::mdp::{InitialStates, ModelError, RewardDist, TabularLookaheadMdp, TransitionDist};
use crate::rng::{Purpose, RngStream, StreamId};

pub const MAX_RANDOM_STATES: usize = 10;
pub const MAX_RANDOM_ACTIONS: usize = 6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnvError {
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn bad(msg: impl Into<String>) -> EnvError {
    EnvError::Params(msg.into())
}

/// Parameters of one environment family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum EnvSpec {
    Fig1Prophet {
        #[serde(rename = "A")]
        num_actions: usize,
        #[serde(rename = "H")]
        horizon: usize,
    },
    TransitionChain {
        #[serde(rename = "A")]
        num_actions: usize,
        #[serde(rename = "H")]
        horizon: usize,
    },
    /// Stage `i` draws its reward from `stages[i]`, a list of `[value, weight]`.
    ProphetChain { stages: Vec<Vec<[f64; 2]>> },
    Random {
        #[serde(rename = "S")]
        num_states: usize,
        #[serde(rename = "A")]
        num_actions: usize,
        #[serde(rename = "H")]
        horizon: usize,
        seed: u64,
        #[serde(default = "yes")]
        independent: bool,
    },
}

fn yes() -> bool {
    true
}

impl EnvSpec {
    pub fn build(&self) -> Result<TabularLookaheadMdp, EnvError> {
        match *self {
            EnvSpec::Fig1Prophet {
                num_actions,
                horizon,
            } => make_fig1_prophet(num_actions, horizon),
            EnvSpec::TransitionChain {
                num_actions,
                horizon,
            } => make_transition_chain(num_actions, horizon),
            EnvSpec::ProphetChain { ref stages } => {
                let marginals = stages
                    .iter()
                    .map(|pts| {
                        Marginal::new(pts.iter().map(|p| (p[0], p[1])).collect())
                            .map_err(|e| bad(format!("prophet stage: {e}")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                make_prophet_chain(&marginals)
            }
            EnvSpec::Random {
                num_states,
                num_actions,
                horizon,
                seed,
                independent,
            } => make_random_mdp(num_states, num_actions, horizon, seed, independent),
        }
    }
}

fn zeros(num_actions: usize) -> RewardDist {
    JointFiniteDistribution::point(vec![0.0; num_actions]).expect("positive arity")
}

fn goto(num_actions: usize, state: usize) -> TransitionDist {
    JointFiniteDistribution::point(vec![state; num_actions]).expect("positive arity")
}

/// Two-state prophet instance. State 0 is the start, state 1 is absorbing.
/// Action 0 stays for reward 0; every other action pays an independent
/// Bernoulli reward with mean `1 / ((A - 1) H)` and moves to state 1.
pub fn make_fig1_prophet(
    num_actions: usize,
    horizon: usize,
) -> Result<TabularLookaheadMdp, EnvError> {
    if num_actions < 2 {
        return Err(bad("fig1-prophet needs A >= 2"));
    }
    if horizon == 0 {
        return Err(bad("H must be positive"));
    }
    let p = 1.0 / ((num_actions - 1) * horizon) as f64;
    let mut marginals = vec![Marginal::point(0.0)];
    marginals.extend((1..num_actions).map(|_| Marginal::bernoulli(p).expect("p in [0, 1]")));
    let start_reward = JointFiniteDistribution::product(marginals).expect("valid marginals");
    let mut leave = vec![1; num_actions];
    leave[0] = 0;
    let start_next = JointFiniteDistribution::point(leave).expect("positive arity");

    let rewards = vec![vec![start_reward, zeros(num_actions)]; horizon];
    let transitions = vec![vec![start_next, goto(num_actions, 1)]; horizon];
    Ok(TabularLookaheadMdp::new(
        2,
        num_actions,
        horizon,
        rewards,
        transitions,
        InitialStates::fixed(0),
    )?)
}

/// Chain of `N = H / 2` states `0..N` plus a terminal state `N`. Action 0
/// stays put; every other action independently moves one state forward with
/// probability `1 / A` and resets to state 0 otherwise. Any action at state
/// `N - 1` pays 1 and moves to the terminal state.
pub fn make_transition_chain(
    num_actions: usize,
    horizon: usize,
) -> Result<TabularLookaheadMdp, EnvError> {
    if num_actions < 2 {
        return Err(bad("transition-chain needs A >= 2"));
    }
    if !horizon.is_multiple_of(2) {
        return Err(bad(format!(
            "transition-chain needs an even H, got {horizon}"
        )));
    }
    let n = horizon / 2;
    if n < 2 {
        return Err(bad("transition-chain needs N = H / 2 >= 2"));
    }
    let forward = 1.0 / num_actions as f64;
    let mut rewards = Vec::with_capacity(n + 1);
    let mut transitions = Vec::with_capacity(n + 1);
    for i in 0..n - 1 {
        rewards.push(zeros(num_actions));
        let mut ms = vec![Marginal::point(i)];
        ms.extend((1..num_actions).map(|_| {
            Marginal::new(vec![(i + 1, forward), (0, 1.0 - forward)]).expect("valid marginal")
        }));
        transitions.push(JointFiniteDistribution::product(ms).expect("valid marginals"));
    }
    rewards.push(JointFiniteDistribution::point(vec![1.0; num_actions]).expect("positive arity"));
    transitions.push(goto(num_actions, n));
    rewards.push(zeros(num_actions));
    transitions.push(goto(num_actions, n));

    Ok(TabularLookaheadMdp::new(
        n + 1,
        num_actions,
        horizon,
        vec![rewards; horizon],
        vec![transitions; horizon],
        InitialStates::fixed(0),
    )?)
}

/// Prophet problem with `n` stages as a chain: `S = n + 1`, `A = 2`, `H = n`.
/// At state `i`, action 0 advances with reward 0 and action 1 collects a
/// reward drawn from `stages[i]` and moves to the terminal state `n`.
pub fn make_prophet_chain(stages: &[Marginal<f64>]) -> Result<TabularLookaheadMdp, EnvError> {
    let n = stages.len();
    if n == 0 {
        return Err(bad("prophet-chain needs at least one stage"));
    }
    let mut rewards = Vec::with_capacity(n + 1);
    let mut transitions = Vec::with_capacity(n + 1);
    for (i, stage) in stages.iter().enumerate() {
        rewards.push(
            JointFiniteDistribution::product(vec![Marginal::point(0.0), stage.clone()])
                .expect("valid marginals"),
        );
        transitions.push(JointFiniteDistribution::point(vec![i + 1, n]).expect("positive arity"));
    }
    rewards.push(zeros(2));
    transitions.push(goto(2, n));
    Ok(TabularLookaheadMdp::new(
        n + 1,
        2,
        n,
        vec![rewards; n],
        vec![transitions; n],
        InitialStates::fixed(0),
    )?)
}

/// Random instance: Bernoulli rewards with uniform means, and either
/// independent Dirichlet(1) next-state marginals or a correlated joint over
/// `2S` random next-state vectors with Dirichlet(1) weights.
pub fn make_random_mdp(
    num_states: usize,
    num_actions: usize,
    horizon: usize,
    seed: u64,
    independent: bool,
) -> Result<TabularLookaheadMdp, EnvError> {
    if num_states == 0 || num_states > MAX_RANDOM_STATES {
        return Err(bad(format!(
            "random env needs 1 <= S <= {MAX_RANDOM_STATES}"
        )));
    }
    if num_actions == 0 || num_actions > MAX_RANDOM_ACTIONS {
        return Err(bad(format!(
            "random env needs 1 <= A <= {MAX_RANDOM_ACTIONS}"
        )));
    }
    if horizon == 0 {
        return Err(bad("H must be positive"));
    }
    let mut rng = RngStream::new(seed, StreamId::new(0, 0, Purpose::Generate));
    let mut rewards = Vec::with_capacity(horizon);
    let mut transitions = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        let mut rrow = Vec::with_capacity(num_states);
        let mut trow = Vec::with_capacity(num_states);
        for _ in 0..num_states {
            let ms = (0..num_actions)
                .map(|_| Marginal::bernoulli(rng.uniform()).expect("p in [0, 1]"))
                .collect();
            rrow.push(JointFiniteDistribution::product(ms).expect("valid marginals"));
            let t = if independent {
                let ms = (0..num_actions)
                    .map(|_| {
                        let w = dirichlet(&mut rng, num_states);
                        Marginal::new(w.into_iter().enumerate().collect()).expect("normalized")
                    })
                    .collect();
                JointFiniteDistribution::product(ms).expect("valid marginals")
            } else {
                let m = 2 * num_states;
                let w = dirichlet(&mut rng, m);
                let atoms = w
                    .into_iter()
                    .map(|weight| Atom {
                        weight,
                        outcome: (0..num_actions)
                            .map(|_| {
                                ((rng.uniform() * num_states as f64) as usize).min(num_states - 1)
                            })
                            .collect(),
                    })
                    .collect();
                JointFiniteDistribution::joint(num_actions, atoms).expect("normalized")
            };
            trow.push(t);
        }
        rewards.push(rrow);
        transitions.push(trow);
    }
    Ok(TabularLookaheadMdp::new(
        num_states,
        num_actions,
        horizon,
        rewards,
        transitions,
        InitialStates::fixed(0),
    )?)
}

/// Uniform draw from the probability simplex on `n` points.
pub fn dirichlet(rng: &mut RngStream, n: usize) -> Vec<f64> {
    let draws: Vec<f64> = (0..n).map(|_| Exp1.sample(rng.rng())).collect();
    let total: f64 = draws.iter().sum();
    draws.into_iter().map(|x| x / total).collect()
}

/// The random instance used by default in desk-scale experiments.
pub fn standard_instance() -> TabularLookaheadMdp {
    make_random_mdp(3, 3, 4, 2024, true).expect("valid parameters")
}
