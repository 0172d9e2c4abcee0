//! Optimistic learner for one-step reward lookahead.
//!
//! The optimistic value averages `max_a R(a) + scores[a]` over the reward
//! vectors seen at `(h, s)`, where `scores[a] = b_p(s, a) + P_hat V_{h+1}`,
//! then adds the reward bonus and truncates at `H`.

use super::bonus::{log_term_rl, rl_reward_bonus, rl_transition_bonus};
use super::{
    check_store, log_term, Algo, BonusConfig, EmpiricalStore, Learner, LearnerError,
    OptimisticValues,
};
use crate::episode::{Agent, EpisodeRecord, Observation};
use crate::mdp::Regime;
use crate::planning::{threshold_choice, LookaheadPolicy, ValueTable};

/// Reward bonus of `(h, s)` and the transition bonus of every action, for
/// next-step values `next`.
pub fn mvp_rl_bonuses(
    store: &EmpiricalStore,
    config: &BonusConfig,
    log_term: f64,
    h: usize,
    s: usize,
    next: &[f64],
) -> (f64, Vec<f64>) {
    let an = store.num_actions();
    let reward = config.bonus_scale.reward * rl_reward_bonus(an, log_term, store.visits(h, s));
    let transition = (0..an)
        .map(|a| {
            let (_, var) = store.next_value_moments(h, s, a, next);
            rl_transition_bonus(
                var,
                log_term,
                store.transition_count(h, s, a),
                store.horizon(),
                config.bonus_scale.transition,
            )
        })
        .collect();
    (reward, transition)
}

/// Optimistic values for episode `k`.
pub fn mvp_rl_plan(
    store: &EmpiricalStore,
    config: &BonusConfig,
    k: usize,
) -> Result<OptimisticValues, LearnerError> {
    if store.regime() != Regime::Reward {
        return Err(LearnerError::Regime {
            algo: Algo::MvpRl,
            regime: store.regime(),
        });
    }
    let l = log_term(config, log_term_rl, k, store)?;
    let (sn, an, hn) = (store.num_states(), store.num_actions(), store.horizon());
    let cap = hn as f64;
    let mut values = ValueTable::zeros(Regime::Reward, hn, sn);
    let mut scores = vec![0.0; hn * sn * an];
    for h in (0..hn).rev() {
        let (row, next) = values.split_rows(h);
        for (s, slot) in row.iter_mut().enumerate() {
            let (b_r, b_p) = mvp_rl_bonuses(store, config, l, h, s, next);
            let sc = &mut scores[(h * sn + s) * an..][..an];
            for (a, x) in sc.iter_mut().enumerate() {
                let (pv, _) = store.next_value_moments(h, s, a, next);
                *x = b_p[a] + pv;
            }
            let n = store.visits(h, s);
            *slot = if n == 0 {
                cap
            } else {
                let total: f64 = store
                    .reward_histogram(h, s)
                    .iter()
                    .map(|(r, c)| *c as f64 * best_total(r, sc))
                    .sum();
                (total / n as f64 + b_r).min(cap)
            };
        }
    }
    Ok(OptimisticValues::new(values, an, scores))
}

fn best_total(rewards: &[f64], scores: &[f64]) -> f64 {
    rewards
        .iter()
        .zip(scores)
        .map(|(r, c)| r + c)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `argmax_a R(a) + scores[a]` on the observed rewards, lowest index on ties.
pub fn mvp_rl_act(scores: &[f64], rewards: &[f64]) -> Result<usize, LearnerError> {
    if rewards.len() != scores.len() {
        return Err(LearnerError::Arity {
            expected: scores.len(),
            got: rewards.len(),
        });
    }
    Ok(threshold_choice(rewards, scores))
}

#[derive(Debug, Clone)]
pub struct MvpRl {
    store: EmpiricalStore,
    config: BonusConfig,
    values: OptimisticValues,
}

impl MvpRl {
    pub fn new(
        num_states: usize,
        num_actions: usize,
        horizon: usize,
        config: BonusConfig,
    ) -> Result<Self, LearnerError> {
        config.validate()?;
        let store = EmpiricalStore::new(Regime::Reward, num_states, num_actions, horizon);
        let values = mvp_rl_plan(&store, &config, 1)?;
        Ok(Self {
            store,
            config,
            values,
        })
    }

    pub fn values(&self) -> &OptimisticValues {
        &self.values
    }
}

impl Agent for MvpRl {
    fn accepts(&self, regime: Regime) -> bool {
        regime == Regime::Reward
    }

    /// # Panics
    /// On anything but a full reward vector.
    fn act(&mut self, h: usize, state: usize, observation: &Observation) -> usize {
        match observation {
            Observation::Rewards(r) => {
                mvp_rl_act(self.values.scores(h, state), r).expect("reward vector arity")
            }
            _ => panic!("reward-lookahead learner needs the reward vector"),
        }
    }
}

impl Learner for MvpRl {
    fn algo(&self) -> Algo {
        Algo::MvpRl
    }

    fn plan(&mut self, k: usize) -> Result<(), LearnerError> {
        self.values = mvp_rl_plan(&self.store, &self.config, k)?;
        Ok(())
    }

    fn update(&mut self, record: &EpisodeRecord) -> Result<(), LearnerError> {
        Ok(self.store.update(record)?)
    }

    fn policy(&self) -> LookaheadPolicy {
        LookaheadPolicy::Threshold {
            num_states: self.store.num_states(),
            num_actions: self.store.num_actions(),
            continuation: self.values.all_scores().to_vec(),
        }
    }

    fn optimistic_value(&self, s: usize) -> Option<f64> {
        Some(self.values.value(0, s))
    }

    fn store(&self) -> Option<&EmpiricalStore> {
        Some(&self.store)
    }

    fn restore(&mut self, store: EmpiricalStore) -> Result<(), LearnerError> {
        check_store(
            &store,
            Regime::Reward,
            self.store.num_states(),
            self.store.num_actions(),
            self.store.horizon(),
        )?;
        self.store = store;
        Ok(())
    }
}
