//! Backward induction for the three regimes.

use super::list::{build_ranked_list, mu_independent, MuFn, RankedList};
use super::policy::{expand, LookaheadPolicy};
use super::values::ValueTable;
use super::{argmax_first, PlanError, DEFAULT_SUPPORT_CAP};
use crate::mdp::{Regime, TabularLookaheadMdp};
use crate::rng::{Purpose, RngStream, StreamId};

/// Optimal values together with a policy attaining them.
#[derive(Debug, Clone)]
pub struct Plan {
    pub values: ValueTable,
    pub policy: LookaheadPolicy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RewardMethod {
    /// Sum over the atoms of each reward joint.
    Exact { cap: usize },
    /// Average over `samples` draws per `(h, s)`, fixed for the whole pass.
    Sample { samples: usize, seed: u64 },
}

impl Default for RewardMethod {
    fn default() -> Self {
        RewardMethod::Exact {
            cap: DEFAULT_SUPPORT_CAP,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransitionMethod {
    /// Sum over the atoms of each next-state joint.
    ExactJoint {
        cap: usize,
    },
    /// Ranked-list closed form; independent transitions only.
    ExactList,
    Sample {
        samples: usize,
        seed: u64,
    },
}

impl Default for TransitionMethod {
    fn default() -> Self {
        TransitionMethod::ExactJoint {
            cap: DEFAULT_SUPPORT_CAP,
        }
    }
}

/// `V*_h(s) = max_a r_h(s, a) + P_h V*_{h+1}(s, a)` with the greedy policy.
pub fn plan_no_lookahead(mdp: &TabularLookaheadMdp) -> Plan {
    let (hn, sn, an) = (mdp.horizon(), mdp.num_states(), mdp.num_actions());
    let mut v = ValueTable::zeros(Regime::None, hn, sn);
    let mut actions = vec![0; hn * sn];
    let mut q = vec![0.0; an];
    for h in (0..hn).rev() {
        let (cur, next) = v.split_rows(h);
        for s in 0..sn {
            for (a, x) in q.iter_mut().enumerate() {
                *x = mdp.mean_reward(h, s, a) + mdp.expected_next(h, s, a, next);
            }
            let a = argmax_first(&q);
            actions[h * sn + s] = a;
            cur[s] = q[a];
        }
    }
    Plan {
        values: v,
        policy: LookaheadPolicy::Markov {
            num_states: sn,
            actions,
        },
    }
}

/// `V^R_h(s) = E_R[max_a R(a) + P_h V^R_{h+1}(s, a)]`. The returned policy
/// is in threshold form with continuation `P_h V^R_{h+1}(s, .)`.
pub fn plan_reward_lookahead(
    mdp: &TabularLookaheadMdp,
    method: RewardMethod,
) -> Result<Plan, PlanError> {
    let (hn, sn, an) = (mdp.horizon(), mdp.num_states(), mdp.num_actions());
    if let RewardMethod::Sample { samples: 0, .. } = method {
        return Err(PlanError::NoSamples);
    }
    let mut v = ValueTable::zeros(Regime::Reward, hn, sn);
    let mut continuation = vec![0.0; hn * sn * an];
    let mut draw = Vec::with_capacity(an);
    for h in (0..hn).rev() {
        let (cur, next) = v.split_rows(h);
        for s in 0..sn {
            let cont = &mut continuation[(h * sn + s) * an..(h * sn + s + 1) * an];
            for (a, x) in cont.iter_mut().enumerate() {
                *x = mdp.expected_next(h, s, a, next);
            }
            let best = |r: &[f64]| {
                r.iter()
                    .zip(cont.iter())
                    .map(|(r, c)| r + c)
                    .fold(f64::NEG_INFINITY, f64::max)
            };
            let d = mdp.reward_dist(h, s);
            cur[s] = match method {
                RewardMethod::Exact { cap } => expand(d, "reward", h, s, cap)?
                    .iter()
                    .map(|atom| atom.weight * best(&atom.outcome))
                    .sum(),
                RewardMethod::Sample { samples, seed } => {
                    let mut rng =
                        RngStream::new(seed, StreamId::new(s as u64, h, Purpose::PlanReward));
                    let mut total = 0.0;
                    for _ in 0..samples {
                        d.sample_into(&mut rng, &mut draw);
                        total += best(&draw);
                    }
                    total / samples as f64
                }
            };
        }
    }
    Ok(Plan {
        values: v,
        policy: LookaheadPolicy::Threshold {
            num_states: sn,
            num_actions: an,
            continuation,
        },
    })
}

/// `V^T_h(s) = E_{s'}[max_a r_h(s, a) + V^T_{h+1}(s'(a))]`. The returned
/// policy is in list form with scores `r_h(s, a) + V^T_{h+1}(s')`.
pub fn plan_transition_lookahead(
    mdp: &TabularLookaheadMdp,
    method: TransitionMethod,
) -> Result<Plan, PlanError> {
    plan_transition_lookahead_with_mu(mdp, method, mu_independent)
}

/// As [`plan_transition_lookahead`], with the list distribution supplied.
pub fn plan_transition_lookahead_with_mu(
    mdp: &TabularLookaheadMdp,
    method: TransitionMethod,
    mu: MuFn,
) -> Result<Plan, PlanError> {
    let (hn, sn, an) = (mdp.horizon(), mdp.num_states(), mdp.num_actions());
    if let TransitionMethod::Sample { samples: 0, .. } = method {
        return Err(PlanError::NoSamples);
    }
    let mut v = ValueTable::zeros(Regime::Transition, hn, sn);
    let mut lists: Vec<Vec<RankedList>> = Vec::with_capacity(hn);
    let mut scores = vec![0.0; sn * an];
    let mut draw = Vec::with_capacity(an);
    for h in (0..hn).rev() {
        let mut row = Vec::with_capacity(sn);
        let (cur, next) = v.split_rows(h);
        for (s, slot) in cur.iter_mut().enumerate() {
            for sp in 0..sn {
                for a in 0..an {
                    scores[sp * an + a] = mdp.mean_reward(h, s, a) + next[sp];
                }
            }
            let list = build_ranked_list(sn, an, &scores);
            let best = |ns: &[usize]| {
                ns.iter()
                    .enumerate()
                    .map(|(a, &sp)| scores[sp * an + a])
                    .fold(f64::NEG_INFINITY, f64::max)
            };
            let d = mdp.transition_dist(h, s);
            *slot = match method {
                TransitionMethod::ExactJoint { cap } => expand(d, "transition", h, s, cap)?
                    .iter()
                    .map(|atom| atom.weight * best(&atom.outcome))
                    .sum(),
                TransitionMethod::ExactList => {
                    if !d.is_independent() {
                        return Err(PlanError::NotIndependent { h, s });
                    }
                    let kernels: Vec<&[f64]> = (0..an).map(|a| mdp.kernel(h, s, a)).collect();
                    mu(&list, &kernels)?.expectation(list.scores())
                }
                TransitionMethod::Sample { samples, seed } => {
                    let mut rng =
                        RngStream::new(seed, StreamId::new(s as u64, h, Purpose::PlanTransition));
                    let mut total = 0.0;
                    for _ in 0..samples {
                        d.sample_into(&mut rng, &mut draw);
                        total += best(&draw);
                    }
                    total / samples as f64
                }
            };
            row.push(list);
        }
        lists.push(row);
    }
    // rows were produced from the last step backwards
    let lists = lists.into_iter().rev().flatten().collect();
    Ok(Plan {
        values: v,
        policy: LookaheadPolicy::List {
            num_states: sn,
            lists,
        },
    })
}
