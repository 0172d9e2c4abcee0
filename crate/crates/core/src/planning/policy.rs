//! Policy forms and exact policy evaluation.

use super::list::{mu_independent, RankedList};
use super::values::ValueTable;
use super::PlanError;
use crate::dist::{Atom, JointKind};
use crate::episode::{Agent, Observation};
use crate::mdp::{Regime, TabularLookaheadMdp};

/// A deterministic policy in one of the three forms the planners and
/// learners produce.
#[derive(Debug, Clone, PartialEq)]
pub enum LookaheadPolicy {
    /// `actions[h * S + s]`; ignores observations.
    Markov {
        num_states: usize,
        actions: Vec<usize>,
    },
    /// Plays `argmax_a R(a) + continuation[(h * S + s) * A + a]` on the
    /// observed rewards.
    Threshold {
        num_states: usize,
        num_actions: usize,
        continuation: Vec<f64>,
    },
    /// Plays the highest-ranked realized pair of `lists[h * S + s]`.
    List {
        num_states: usize,
        lists: Vec<RankedList>,
    },
}

impl LookaheadPolicy {
    pub fn regime(&self) -> Regime {
        match self {
            LookaheadPolicy::Markov { .. } => Regime::None,
            LookaheadPolicy::Threshold { .. } => Regime::Reward,
            LookaheadPolicy::List { .. } => Regime::Transition,
        }
    }

    /// Whether the policy can act under `regime`. Markov policies need no
    /// observation and run anywhere.
    pub fn accepts(&self, regime: Regime) -> bool {
        matches!(self, LookaheadPolicy::Markov { .. }) || self.regime() == regime
    }

    pub fn continuation(&self, h: usize, s: usize) -> Option<&[f64]> {
        match self {
            LookaheadPolicy::Threshold {
                num_states,
                num_actions,
                continuation,
            } => {
                let start = (h * num_states + s) * num_actions;
                Some(&continuation[start..start + num_actions])
            }
            _ => None,
        }
    }

    pub fn list(&self, h: usize, s: usize) -> Option<&RankedList> {
        match self {
            LookaheadPolicy::List { num_states, lists } => Some(&lists[h * num_states + s]),
            _ => None,
        }
    }

    /// # Panics
    /// If the observation does not match the policy form.
    pub fn act(&self, h: usize, s: usize, observation: &Observation) -> usize {
        match (self, observation) {
            (
                LookaheadPolicy::Markov {
                    num_states,
                    actions,
                },
                _,
            ) => actions[h * num_states + s],
            (LookaheadPolicy::Threshold { .. }, Observation::Rewards(r)) => {
                threshold_choice(r, self.continuation(h, s).expect("threshold form"))
            }
            (LookaheadPolicy::List { num_states, lists }, Observation::NextStates(ns)) => {
                lists[h * num_states + s].choose(ns)
            }
            _ => panic!("observation does not match a {} policy", self.regime()),
        }
    }
}

/// `argmax_a rewards[a] + continuation[a]`, lowest index on ties.
pub fn threshold_choice(rewards: &[f64], continuation: &[f64]) -> usize {
    assert_eq!(rewards.len(), continuation.len(), "observation arity");
    let mut best = 0;
    let mut best_value = f64::NEG_INFINITY;
    for (a, (r, c)) in rewards.iter().zip(continuation).enumerate() {
        let v = r + c;
        if v > best_value {
            best = a;
            best_value = v;
        }
    }
    best
}

/// Runs a fixed policy as an [`Agent`].
#[derive(Debug, Clone)]
pub struct PolicyAgent {
    pub policy: LookaheadPolicy,
}

impl Agent for PolicyAgent {
    fn accepts(&self, regime: Regime) -> bool {
        self.policy.accepts(regime)
    }

    fn act(&mut self, h: usize, state: usize, observation: &Observation) -> usize {
        self.policy.act(h, state, observation)
    }
}

/// Exact evaluator with the atom expansions cached, for repeated use on
/// one environment.
#[derive(Debug, Clone)]
pub struct Evaluator<'a> {
    mdp: &'a TabularLookaheadMdp,
    cap: usize,
    reward_atoms: Option<Vec<Vec<Atom<f64>>>>,
    transition_atoms: Vec<Option<Vec<Atom<usize>>>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(mdp: &'a TabularLookaheadMdp, cap: usize) -> Self {
        Self {
            mdp,
            cap,
            reward_atoms: None,
            transition_atoms: Vec::new(),
        }
    }

    pub fn mdp(&self) -> &TabularLookaheadMdp {
        self.mdp
    }

    /// `V^pi` under the policy's own regime; Markov policies are evaluated
    /// without lookahead.
    pub fn evaluate(&mut self, policy: &LookaheadPolicy) -> Result<ValueTable, PlanError> {
        let mdp = self.mdp;
        let (hn, sn, an) = (mdp.horizon(), mdp.num_states(), mdp.num_actions());
        let mut v = ValueTable::zeros(policy.regime(), hn, sn);
        match policy {
            LookaheadPolicy::Markov { actions, .. } => {
                for h in (0..hn).rev() {
                    let (cur, next) = v.split_rows(h);
                    for s in 0..sn {
                        let a = actions[h * sn + s];
                        cur[s] = mdp.mean_reward(h, s, a) + mdp.expected_next(h, s, a, next);
                    }
                }
            }
            LookaheadPolicy::Threshold { .. } => {
                self.ensure_reward_atoms()?;
                let atoms = self.reward_atoms.as_ref().expect("filled");
                let mut pv = vec![0.0; an];
                for h in (0..hn).rev() {
                    let (cur, next) = v.split_rows(h);
                    for s in 0..sn {
                        let cont = policy.continuation(h, s).expect("threshold form");
                        for (a, x) in pv.iter_mut().enumerate() {
                            *x = mdp.expected_next(h, s, a, next);
                        }
                        cur[s] = atoms[h * sn + s]
                            .iter()
                            .map(|atom| {
                                let a = threshold_choice(&atom.outcome, cont);
                                atom.weight * (atom.outcome[a] + pv[a])
                            })
                            .sum();
                    }
                }
            }
            LookaheadPolicy::List { .. } => {
                for h in (0..hn).rev() {
                    for s in 0..sn {
                        self.ensure_transition_atoms(h, s)?;
                    }
                    let (cur, next) = v.split_rows(h);
                    for (s, slot) in cur.iter_mut().enumerate() {
                        let list = policy.list(h, s).expect("list form");
                        *slot = match &self.transition_atoms[h * sn + s] {
                            None => {
                                let kernels: Vec<&[f64]> =
                                    (0..an).map(|a| mdp.kernel(h, s, a)).collect();
                                let mu = mu_independent(list, &kernels)?;
                                list.pairs()
                                    .iter()
                                    .zip(mu.probs())
                                    .map(|(&(sp, a), m)| m * (mdp.mean_reward(h, s, a) + next[sp]))
                                    .sum()
                            }
                            Some(atoms) => atoms
                                .iter()
                                .map(|atom| {
                                    let a = list.choose(&atom.outcome);
                                    atom.weight * (mdp.mean_reward(h, s, a) + next[atom.outcome[a]])
                                })
                                .sum(),
                        };
                    }
                }
            }
        }
        Ok(v)
    }

    fn ensure_reward_atoms(&mut self) -> Result<(), PlanError> {
        if self.reward_atoms.is_none() {
            self.reward_atoms = Some(reward_atoms(self.mdp, self.cap)?);
        }
        Ok(())
    }

    /// Correlated joints are expanded; products stay `None` and use the
    /// closed-form list distribution.
    fn ensure_transition_atoms(&mut self, h: usize, s: usize) -> Result<(), PlanError> {
        let sn = self.mdp.num_states();
        if self.transition_atoms.is_empty() {
            self.transition_atoms = vec![None; self.mdp.horizon() * sn];
        }
        let d = self.mdp.transition_dist(h, s);
        if matches!(d.kind(), JointKind::Joint(_)) && self.transition_atoms[h * sn + s].is_none() {
            self.transition_atoms[h * sn + s] = Some(expand(d, "transition", h, s, self.cap)?);
        }
        Ok(())
    }
}

/// Exact evaluation of `policy` on `mdp`.
pub fn evaluate_lookahead_policy(
    mdp: &TabularLookaheadMdp,
    policy: &LookaheadPolicy,
    cap: usize,
) -> Result<ValueTable, PlanError> {
    Evaluator::new(mdp, cap).evaluate(policy)
}

pub(crate) fn expand<T: crate::dist::Outcome>(
    d: &crate::dist::JointFiniteDistribution<T>,
    what: &'static str,
    h: usize,
    s: usize,
    cap: usize,
) -> Result<Vec<Atom<T>>, PlanError> {
    d.atoms(cap).map_err(|_| PlanError::Capacity {
        what,
        h,
        s,
        size: d.support_size(),
        cap,
    })
}

/// Atom lists of every reward joint, indexed `h * S + s`.
pub(crate) fn reward_atoms(
    mdp: &TabularLookaheadMdp,
    cap: usize,
) -> Result<Vec<Vec<Atom<f64>>>, PlanError> {
    let mut out = Vec::with_capacity(mdp.horizon() * mdp.num_states());
    for h in 0..mdp.horizon() {
        for s in 0..mdp.num_states() {
            out.push(expand(mdp.reward_dist(h, s), "reward", h, s, cap)?);
        }
    }
    Ok(out)
}
