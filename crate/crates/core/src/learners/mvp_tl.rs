//! Optimistic learner for one-step transition lookahead.
//!
//! `scores[a] = r_hat(s, a) + b_r(s, a)`. The optimistic value averages
//! `max_a scores[a] + V_{h+1}(s'(a))` over the next-state vectors seen at
//! `(h, s)` and adds a variance bonus on that same sample.

use super::bonus::{log_term_tl, tl_reward_bonus, tl_transition_bonus};
use super::{
    check_store, log_term, Algo, BonusConfig, EmpiricalStore, Learner, LearnerError,
    OptimisticValues, RewardEstimate,
};
use crate::episode::{Agent, EpisodeRecord, Observation};
use crate::mdp::Regime;
use crate::planning::{build_ranked_list, LookaheadPolicy, ValueTable};

/// Reward bonus of every action at `(h, s)`.
pub fn mvp_tl_bonuses(
    store: &EmpiricalStore,
    config: &BonusConfig,
    log_term: f64,
    h: usize,
    s: usize,
) -> Vec<f64> {
    (0..store.num_actions())
        .map(|a| {
            tl_reward_bonus(
                log_term,
                store.pair_visits(h, s, a),
                config.bonus_scale.reward,
            )
        })
        .collect()
}

fn best_total(scores: &[f64], next_states: &[usize], next: &[f64]) -> f64 {
    scores
        .iter()
        .zip(next_states)
        .map(|(c, &sp)| c + next[sp])
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Optimistic values for episode `k`.
pub fn mvp_tl_plan(
    store: &EmpiricalStore,
    config: &BonusConfig,
    k: usize,
) -> Result<OptimisticValues, LearnerError> {
    if store.regime() != Regime::Transition {
        return Err(LearnerError::Regime {
            algo: Algo::MvpTl,
            regime: store.regime(),
        });
    }
    let l = log_term(config, log_term_tl, k, store)?;
    let (sn, an, hn) = (store.num_states(), store.num_actions(), store.horizon());
    let cap = hn as f64;
    let mut values = ValueTable::zeros(Regime::Transition, hn, sn);
    let mut scores = vec![0.0; hn * sn * an];
    let mut sample = Vec::new();
    for h in (0..hn).rev() {
        let (row, next) = values.split_rows(h);
        for (s, slot) in row.iter_mut().enumerate() {
            let b_r = mvp_tl_bonuses(store, config, l, h, s);
            let sc = &mut scores[(h * sn + s) * an..][..an];
            for (a, x) in sc.iter_mut().enumerate() {
                *x = store.reward_mean(h, s, a, RewardEstimate::TakenAction) + b_r[a];
            }
            let n = store.visits(h, s);
            if n == 0 {
                *slot = cap;
                continue;
            }
            sample.clear();
            sample.extend(
                store
                    .next_state_histogram(h, s)
                    .iter()
                    .map(|(ns, c)| (*c as f64 / n as f64, best_total(sc, ns, next))),
            );
            let mean: f64 = sample.iter().map(|(p, x)| p * x).sum();
            let var: f64 = sample
                .iter()
                .map(|(p, x)| p * (x - mean) * (x - mean))
                .sum();
            let b_p = tl_transition_bonus(var, l, n, hn, config.bonus_scale.transition);
            *slot = (mean + b_p).min(cap);
        }
    }
    Ok(OptimisticValues::new(values, an, scores))
}

/// `argmax_a scores[a] + V_{h+1}(s'(a))` on the observed next states; ties
/// go to the smallest `(s'(a), a)`, matching the ranked-list order.
pub fn mvp_tl_act(
    scores: &[f64],
    next_values: &[f64],
    next_states: &[usize],
) -> Result<usize, LearnerError> {
    if next_states.len() != scores.len() {
        return Err(LearnerError::Arity {
            expected: scores.len(),
            got: next_states.len(),
        });
    }
    if let Some(&s) = next_states.iter().find(|&&s| s >= next_values.len()) {
        return Err(LearnerError::Observation(format!(
            "next state {s} with {} states",
            next_values.len()
        )));
    }
    let (sc, next) = (scores, next_values);
    let mut best = 0;
    let mut best_value = f64::NEG_INFINITY;
    for (a, (&c, &sp)) in sc.iter().zip(next_states).enumerate() {
        let v = c + next[sp];
        if v > best_value || (v == best_value && sp < next_states[best]) {
            best = a;
            best_value = v;
        }
    }
    Ok(best)
}

#[derive(Debug, Clone)]
pub struct MvpTl {
    store: EmpiricalStore,
    config: BonusConfig,
    values: OptimisticValues,
}

impl MvpTl {
    pub fn new(
        num_states: usize,
        num_actions: usize,
        horizon: usize,
        config: BonusConfig,
    ) -> Result<Self, LearnerError> {
        config.validate()?;
        let store = EmpiricalStore::new(Regime::Transition, num_states, num_actions, horizon);
        let values = mvp_tl_plan(&store, &config, 1)?;
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

impl Agent for MvpTl {
    fn accepts(&self, regime: Regime) -> bool {
        regime == Regime::Transition
    }

    /// # Panics
    /// On anything but a full next-state vector.
    fn act(&mut self, h: usize, state: usize, observation: &Observation) -> usize {
        match observation {
            Observation::NextStates(ns) => mvp_tl_act(
                self.values.scores(h, state),
                self.values.values.row(h + 1),
                ns,
            )
            .expect("next-state vector arity"),
            _ => panic!("transition-lookahead learner needs the next-state vector"),
        }
    }
}

impl Learner for MvpTl {
    fn algo(&self) -> Algo {
        Algo::MvpTl
    }

    fn plan(&mut self, k: usize) -> Result<(), LearnerError> {
        self.values = mvp_tl_plan(&self.store, &self.config, k)?;
        Ok(())
    }

    fn update(&mut self, record: &EpisodeRecord) -> Result<(), LearnerError> {
        Ok(self.store.update(record)?)
    }

    fn policy(&self) -> LookaheadPolicy {
        let (sn, an, hn) = (
            self.store.num_states(),
            self.store.num_actions(),
            self.store.horizon(),
        );
        let mut lists = Vec::with_capacity(hn * sn);
        let mut pair_scores = vec![0.0; sn * an];
        for h in 0..hn {
            let next = self.values.values.row(h + 1);
            for s in 0..sn {
                let sc = self.values.scores(h, s);
                for sp in 0..sn {
                    for a in 0..an {
                        pair_scores[sp * an + a] = sc[a] + next[sp];
                    }
                }
                lists.push(build_ranked_list(sn, an, &pair_scores));
            }
        }
        LookaheadPolicy::List {
            num_states: sn,
            lists,
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
            Regime::Transition,
            self.store.num_states(),
            self.store.num_actions(),
            self.store.horizon(),
        )?;
        self.store = store;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::episode::StepRecord;

    fn record(k: usize, ns: Vec<usize>, action: usize, reward: f64) -> EpisodeRecord {
        EpisodeRecord {
            episode: k,
            regime: Regime::Transition,
            total_return: reward,
            steps: vec![StepRecord {
                state: 0,
                observation: Observation::NextStates(ns.clone()),
                rewards: vec![reward; 2],
                next_state: ns[action],
                next_states: ns,
                action,
                reward,
            }],
        }
    }

    #[test]
    fn plug_in_values_without_bonuses() {
        let mut store = EmpiricalStore::new(Regime::Transition, 2, 2, 1);
        store.update(&record(1, vec![0, 1], 0, 1.0)).unwrap();
        store.update(&record(2, vec![1, 1], 1, 0.5)).unwrap();
        let v = mvp_tl_plan(&store, &BonusConfig::without_bonuses(), 3).unwrap();
        assert_eq!(v.scores(0, 0), &[1.0, 0.5]);
        assert_eq!(v.value(0, 0), 1.0);
        assert_eq!(v.value(0, 1), 1.0);
    }

    #[test]
    fn act_matches_policy_list_on_ties() {
        let mut learner = MvpTl::new(3, 3, 2, BonusConfig::default()).unwrap();
        learner.plan(1).unwrap();
        let policy = learner.policy();
        for ns in [[2, 1, 0], [1, 1, 2], [0, 2, 0], [2, 2, 2]] {
            for s in 0..3 {
                let obs = Observation::NextStates(ns.to_vec());
                assert_eq!(learner.act(0, s, &obs), policy.act(0, s, &obs));
            }
        }
    }
}
