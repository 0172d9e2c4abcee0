//! Optimistic learner that ignores the lookahead observation.

use super::bonus::{log_term_rl, rl_transition_bonus, tl_reward_bonus};
use super::{
    check_store, log_term, Algo, BonusConfig, EmpiricalStore, Learner, LearnerError,
    OptimisticValues, RewardEstimate,
};
use crate::episode::{Agent, EpisodeRecord, Observation};
use crate::mdp::Regime;
use crate::planning::{argmax_first, LookaheadPolicy, ValueTable};

/// Optimistic `Q` values stored as the scores, with `V = min(max_a Q, H)`.
pub fn vanilla_plan(
    store: &EmpiricalStore,
    config: &BonusConfig,
    estimate: RewardEstimate,
    k: usize,
) -> Result<OptimisticValues, LearnerError> {
    let l = log_term(config, log_term_rl, k, store)?;
    let (sn, an, hn) = (store.num_states(), store.num_actions(), store.horizon());
    let cap = hn as f64;
    let mut values = ValueTable::zeros(store.regime(), hn, sn);
    let mut q = vec![0.0; hn * sn * an];
    for h in (0..hn).rev() {
        let (row, next) = values.split_rows(h);
        for (s, slot) in row.iter_mut().enumerate() {
            let qs = &mut q[(h * sn + s) * an..][..an];
            for (a, x) in qs.iter_mut().enumerate() {
                let (pv, var) = store.next_value_moments(h, s, a, next);
                let b_r = tl_reward_bonus(
                    l,
                    store.reward_count(h, s, a, estimate),
                    config.bonus_scale.reward,
                );
                let b_p = rl_transition_bonus(
                    var,
                    l,
                    store.transition_count(h, s, a),
                    hn,
                    config.bonus_scale.transition,
                );
                *x = store.reward_mean(h, s, a, estimate) + b_r + b_p + pv;
            }
            *slot = if store.visits(h, s) == 0 {
                cap
            } else {
                qs.iter()
                    .copied()
                    .fold(f64::NEG_INFINITY, f64::max)
                    .min(cap)
            };
        }
    }
    Ok(OptimisticValues::new(values, an, q))
}

#[derive(Debug, Clone)]
pub struct VanillaMvp {
    store: EmpiricalStore,
    config: BonusConfig,
    estimate: RewardEstimate,
    values: OptimisticValues,
}

impl VanillaMvp {
    pub fn new(
        regime: Regime,
        num_states: usize,
        num_actions: usize,
        horizon: usize,
        config: BonusConfig,
        estimate: RewardEstimate,
    ) -> Result<Self, LearnerError> {
        config.validate()?;
        let store = EmpiricalStore::new(regime, num_states, num_actions, horizon);
        let values = vanilla_plan(&store, &config, estimate, 1)?;
        Ok(Self {
            store,
            config,
            estimate,
            values,
        })
    }

    pub fn values(&self) -> &OptimisticValues {
        &self.values
    }
}

impl Agent for VanillaMvp {
    fn accepts(&self, regime: Regime) -> bool {
        regime == self.store.regime()
    }

    fn act(&mut self, h: usize, state: usize, _observation: &Observation) -> usize {
        argmax_first(self.values.scores(h, state))
    }
}

impl Learner for VanillaMvp {
    fn algo(&self) -> Algo {
        Algo::MvpVanilla
    }

    fn plan(&mut self, k: usize) -> Result<(), LearnerError> {
        self.values = vanilla_plan(&self.store, &self.config, self.estimate, k)?;
        Ok(())
    }

    fn update(&mut self, record: &EpisodeRecord) -> Result<(), LearnerError> {
        Ok(self.store.update(record)?)
    }

    fn policy(&self) -> LookaheadPolicy {
        let (sn, hn) = (self.store.num_states(), self.store.horizon());
        let actions = (0..hn * sn)
            .map(|i| argmax_first(self.values.scores(i / sn, i % sn)))
            .collect();
        LookaheadPolicy::Markov {
            num_states: sn,
            actions,
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
            self.store.regime(),
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

    #[test]
    fn plug_in_q_values() {
        let mut store = EmpiricalStore::new(Regime::None, 2, 2, 2);
        let steps = vec![
            StepRecord {
                state: 0,
                observation: Observation::None,
                rewards: vec![0.5, 0.0],
                next_states: vec![1, 0],
                action: 0,
                reward: 0.5,
                next_state: 1,
            },
            StepRecord {
                state: 1,
                observation: Observation::None,
                rewards: vec![0.0, 1.0],
                next_states: vec![0, 0],
                action: 1,
                reward: 1.0,
                next_state: 0,
            },
        ];
        store
            .update(&EpisodeRecord {
                episode: 1,
                regime: Regime::None,
                steps,
                total_return: 1.5,
            })
            .unwrap();
        let v = vanilla_plan(
            &store,
            &BonusConfig::without_bonuses(),
            RewardEstimate::AllActions,
            2,
        )
        .unwrap();
        assert_eq!(v.scores(1, 1), &[0.0, 1.0]);
        assert_eq!(v.value(1, 1), 1.0);
        assert_eq!(v.scores(0, 0), &[1.5, 0.0]);
        assert_eq!(v.value(0, 0), 1.5);
        // unvisited (h, s) keeps the cap
        assert_eq!(v.value(0, 1), 2.0);
    }
}
