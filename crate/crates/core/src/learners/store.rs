//! Visit counts, raw observation lists and the plug-in estimates built on
//! them.

use std::collections::HashMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::dist::Outcome;
use crate::episode::{EpisodeRecord, Observation};
use crate::mdp::Regime;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StoreError {
    #[error("store collects {store} data but the episode ran under {record}")]
    RegimeMismatch { store: Regime, record: Regime },
    #[error("episode does not fit the store: {0}")]
    Shape(String),
    #[error("corrupt store: {0}")]
    Corrupt(String),
}

/// How the mean reward of `(s, a)` is estimated when every action's reward
/// is observed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RewardEstimate {
    /// Average over every visit to `s` (all rewards are revealed).
    #[default]
    AllActions,
    /// Average over the visits that played `a`.
    TakenAction,
}

/// Distinct observation vectors with multiplicities, in first-seen order.
#[derive(Debug, Clone, Default)]
struct Histogram<T> {
    index: HashMap<Vec<u64>, usize>,
    entries: Vec<(Vec<T>, u64)>,
}

impl<T: Outcome> Histogram<T> {
    fn add(&mut self, v: &[T]) {
        let key: Vec<u64> = v.iter().map(|x| x.key()).collect();
        match self.index.get(&key) {
            Some(&i) => self.entries[i].1 += 1,
            None => {
                self.index.insert(key, self.entries.len());
                self.entries.push((v.to_vec(), 1));
            }
        }
    }
}

/// Serialized form: everything except the derived histograms.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StoreData {
    regime: Regime,
    num_states: usize,
    num_actions: usize,
    horizon: usize,
    visits: Vec<u64>,
    pair_visits: Vec<u64>,
    reward_obs: Vec<Vec<Vec<f64>>>,
    next_state_obs: Vec<Vec<Vec<usize>>>,
    reward_sum_all: Vec<f64>,
    reward_sum_taken: Vec<f64>,
    transition_counts: Vec<u64>,
    transition_totals: Vec<u64>,
}

/// Empirical model of one learner. Indexing: `(h, s)` pairs at `h * S + s`,
/// `(h, s, a)` triples at `(h * S + s) * A + a`.
#[derive(Debug, Clone)]
pub struct EmpiricalStore {
    data: StoreData,
    reward_hist: Vec<Histogram<f64>>,
    next_state_hist: Vec<Histogram<usize>>,
}

impl EmpiricalStore {
    pub fn new(regime: Regime, num_states: usize, num_actions: usize, horizon: usize) -> Self {
        let hs = horizon * num_states;
        let hsa = hs * num_actions;
        let data = StoreData {
            regime,
            num_states,
            num_actions,
            horizon,
            visits: vec![0; hs],
            pair_visits: vec![0; hsa],
            reward_obs: vec![Vec::new(); hs],
            next_state_obs: vec![Vec::new(); hs],
            reward_sum_all: vec![0.0; hsa],
            reward_sum_taken: vec![0.0; hsa],
            transition_counts: vec![0; hsa * num_states],
            transition_totals: vec![0; hsa],
        };
        Self::from_data(data)
    }

    fn from_data(data: StoreData) -> Self {
        let hs = data.horizon * data.num_states;
        let mut reward_hist = vec![Histogram::default(); hs];
        let mut next_state_hist = vec![Histogram::default(); hs];
        for (hist, obs) in reward_hist.iter_mut().zip(&data.reward_obs) {
            obs.iter().for_each(|v| hist.add(v));
        }
        for (hist, obs) in next_state_hist.iter_mut().zip(&data.next_state_obs) {
            obs.iter().for_each(|v| hist.add(v));
        }
        Self {
            data,
            reward_hist,
            next_state_hist,
        }
    }

    pub fn regime(&self) -> Regime {
        self.data.regime
    }

    pub fn num_states(&self) -> usize {
        self.data.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.data.num_actions
    }

    pub fn horizon(&self) -> usize {
        self.data.horizon
    }

    fn hs(&self, h: usize, s: usize) -> usize {
        h * self.data.num_states + s
    }

    fn hsa(&self, h: usize, s: usize, a: usize) -> usize {
        self.hs(h, s) * self.data.num_actions + a
    }

    /// `n_h(s)`.
    pub fn visits(&self, h: usize, s: usize) -> u64 {
        self.data.visits[self.hs(h, s)]
    }

    /// `n_h(s, a)`: visits that played `a`.
    pub fn pair_visits(&self, h: usize, s: usize, a: usize) -> u64 {
        self.data.pair_visits[self.hsa(h, s, a)]
    }

    /// Reward vectors observed at `(h, s)`, one per visit.
    pub fn reward_observations(&self, h: usize, s: usize) -> &[Vec<f64>] {
        &self.data.reward_obs[self.hs(h, s)]
    }

    /// Next-state vectors observed at `(h, s)`, one per visit.
    pub fn next_state_observations(&self, h: usize, s: usize) -> &[Vec<usize>] {
        &self.data.next_state_obs[self.hs(h, s)]
    }

    /// Distinct reward vectors at `(h, s)` with their counts.
    pub fn reward_histogram(&self, h: usize, s: usize) -> &[(Vec<f64>, u64)] {
        &self.reward_hist[self.hs(h, s)].entries
    }

    /// Distinct next-state vectors at `(h, s)` with their counts.
    pub fn next_state_histogram(&self, h: usize, s: usize) -> &[(Vec<usize>, u64)] {
        &self.next_state_hist[self.hs(h, s)].entries
    }

    /// Mean reward of `a` over the visits that played it; 0 if none.
    pub fn reward_mean_taken(&self, h: usize, s: usize, a: usize) -> f64 {
        let n = self.pair_visits(h, s, a);
        if n == 0 {
            0.0
        } else {
            self.data.reward_sum_taken[self.hsa(h, s, a)] / n as f64
        }
    }

    /// Number of samples behind [`Self::reward_mean`].
    pub fn reward_count(&self, h: usize, s: usize, a: usize, estimate: RewardEstimate) -> u64 {
        if self.data.regime == Regime::Reward && estimate == RewardEstimate::AllActions {
            self.visits(h, s)
        } else {
            self.pair_visits(h, s, a)
        }
    }

    /// `r_hat_h(s, a)`. The all-actions estimate only differs from the
    /// taken-action one when rewards of every action are observed.
    pub fn reward_mean(&self, h: usize, s: usize, a: usize, estimate: RewardEstimate) -> f64 {
        if self.data.regime == Regime::Reward && estimate == RewardEstimate::AllActions {
            let n = self.visits(h, s);
            if n == 0 {
                0.0
            } else {
                self.data.reward_sum_all[self.hsa(h, s, a)] / n as f64
            }
        } else {
            self.reward_mean_taken(h, s, a)
        }
    }

    /// Samples behind `P_hat_h(. | s, a)`: `n_h(s, a)`, or `n_h(s)` when the
    /// next state of every action is observed.
    pub fn transition_count(&self, h: usize, s: usize, a: usize) -> u64 {
        self.data.transition_totals[self.hsa(h, s, a)]
    }

    /// Raw next-state counts of `(h, s, a)`, one entry per state.
    pub fn transition_counts(&self, h: usize, s: usize, a: usize) -> &[u64] {
        let sn = self.data.num_states;
        let start = self.hsa(h, s, a) * sn;
        &self.data.transition_counts[start..start + sn]
    }

    /// `P_hat_h(. | s, a)`; all zeros before the first sample.
    pub fn p_hat(&self, h: usize, s: usize, a: usize) -> Vec<f64> {
        let n = self.transition_count(h, s, a);
        self.transition_counts(h, s, a)
            .iter()
            .map(|&c| if n == 0 { 0.0 } else { c as f64 / n as f64 })
            .collect()
    }

    /// `(P_hat v, Var_{P_hat}(v))` for `(h, s, a)`; zeros before the first
    /// sample.
    pub fn next_value_moments(&self, h: usize, s: usize, a: usize, v: &[f64]) -> (f64, f64) {
        let n = self.transition_count(h, s, a);
        if n == 0 {
            return (0.0, 0.0);
        }
        let n = n as f64;
        let counts = self.transition_counts(h, s, a);
        let mean: f64 = counts.iter().zip(v).map(|(&c, x)| c as f64 / n * x).sum();
        let var: f64 = counts
            .iter()
            .zip(v)
            .map(|(&c, x)| c as f64 / n * (x - mean) * (x - mean))
            .sum();
        (mean, var)
    }

    /// Folds one episode into the store.
    pub fn update(&mut self, record: &EpisodeRecord) -> Result<(), StoreError> {
        if record.regime != self.data.regime {
            return Err(StoreError::RegimeMismatch {
                store: self.data.regime,
                record: record.regime,
            });
        }
        if record.steps.len() != self.data.horizon {
            return Err(StoreError::Shape(format!(
                "{} steps, expected {}",
                record.steps.len(),
                self.data.horizon
            )));
        }
        self.check_record(record)?;
        let an = self.data.num_actions;
        for (h, step) in record.steps.iter().enumerate() {
            let (s, a) = (step.state, step.action);
            let hs = self.hs(h, s);
            let hsa = self.hsa(h, s, a);
            self.data.visits[hs] += 1;
            self.data.pair_visits[hsa] += 1;
            self.data.reward_sum_taken[hsa] += step.reward;
            match &step.observation {
                Observation::Rewards(r) => {
                    for (b, x) in r.iter().enumerate() {
                        self.data.reward_sum_all[hs * an + b] += x;
                    }
                    self.reward_hist[hs].add(r);
                    self.data.reward_obs[hs].push(r.clone());
                    self.count_transition(hsa, step.next_state);
                }
                Observation::NextStates(ns) => {
                    for (b, &x) in ns.iter().enumerate() {
                        self.count_transition(hs * an + b, x);
                    }
                    self.next_state_hist[hs].add(ns);
                    self.data.next_state_obs[hs].push(ns.clone());
                }
                Observation::None => self.count_transition(hsa, step.next_state),
            }
        }
        Ok(())
    }

    /// Checks the whole record first so a bad one leaves the store intact.
    fn check_record(&self, record: &EpisodeRecord) -> Result<(), StoreError> {
        let (sn, an) = (self.data.num_states, self.data.num_actions);
        for (h, step) in record.steps.iter().enumerate() {
            if step.state >= sn || step.action >= an || step.next_state >= sn {
                return Err(StoreError::Shape(format!(
                    "step {h} leaves the state or action range"
                )));
            }
            let ok = match (&step.observation, self.data.regime) {
                (Observation::Rewards(r), Regime::Reward) => {
                    r.len() == an && r.iter().all(|x| (0.0..=1.0).contains(x))
                }
                (Observation::NextStates(ns), Regime::Transition) => {
                    ns.len() == an && ns.iter().all(|&x| x < sn)
                }
                (Observation::None, Regime::None) => true,
                _ => false,
            };
            if !ok {
                return Err(StoreError::Shape(format!(
                    "observation at step {h} does not fit the store"
                )));
            }
        }
        Ok(())
    }

    fn count_transition(&mut self, hsa: usize, next: usize) {
        self.data.transition_counts[hsa * self.data.num_states + next] += 1;
        self.data.transition_totals[hsa] += 1;
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("store serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, StoreError> {
        serde_json::from_str(text).map_err(|e| StoreError::Corrupt(e.to_string()))
    }

    fn check(data: &StoreData) -> Result<(), String> {
        let (sn, an, hn) = (data.num_states, data.num_actions, data.horizon);
        if sn == 0 || an == 0 || hn == 0 {
            return Err("empty dimension".into());
        }
        let hs = hn.checked_mul(sn).ok_or("size overflow")?;
        let hsa = hs.checked_mul(an).ok_or("size overflow")?;
        let lens = [
            (data.visits.len(), hs),
            (data.pair_visits.len(), hsa),
            (data.reward_obs.len(), hs),
            (data.next_state_obs.len(), hs),
            (data.reward_sum_all.len(), hsa),
            (data.reward_sum_taken.len(), hsa),
            (
                data.transition_counts.len(),
                hsa.checked_mul(sn).ok_or("size overflow")?,
            ),
            (data.transition_totals.len(), hsa),
        ];
        if lens.iter().any(|(got, want)| got != want) {
            return Err("table lengths do not match the dimensions".into());
        }
        for list in &data.reward_obs {
            if list
                .iter()
                .any(|v| v.len() != an || v.iter().any(|x| !(0.0..=1.0).contains(x)))
            {
                return Err("reward observation out of range".into());
            }
        }
        for list in &data.next_state_obs {
            if list
                .iter()
                .any(|v| v.len() != an || v.iter().any(|&x| x >= sn))
            {
                return Err("next-state observation out of range".into());
            }
        }
        Ok(())
    }
}

impl Serialize for EmpiricalStore {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.data.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for EmpiricalStore {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let data = StoreData::deserialize(deserializer)?;
        Self::check(&data).map_err(serde::de::Error::custom)?;
        Ok(Self::from_data(data))
    }
}
