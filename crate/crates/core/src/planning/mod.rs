//! Optimal values and policies with and without one-step lookahead.

mod bellman;
mod extended;
mod list;
mod policy;
mod values;

use thiserror::Error;

pub use bellman::{
    plan_no_lookahead, plan_reward_lookahead, plan_transition_lookahead,
    plan_transition_lookahead_with_mu, Plan, RewardMethod, TransitionMethod,
};
pub use extended::{oracle_extended_reward, oracle_extended_transition, MAX_EXTENDED_STATES};
pub use list::{
    build_ranked_list, mu_enumerated, mu_independent, ListDistribution, MuFn, RankedList,
};
pub use policy::{
    evaluate_lookahead_policy, threshold_choice, Evaluator, LookaheadPolicy, PolicyAgent,
};
pub use values::ValueTable;

/// Default cap on the number of atoms enumerated per `(h, s)`.
pub const DEFAULT_SUPPORT_CAP: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error("{what} support at step {h}, state {s} has {size} atoms, above the cap of {cap}; use sampling")]
    Capacity {
        what: &'static str,
        h: usize,
        s: usize,
        size: u128,
        cap: usize,
    },
    #[error("list planning needs independent transitions, but step {h}, state {s} has a correlated joint")]
    NotIndependent { h: usize, s: usize },
    #[error(
        "list probability became negative ({value}) at position {index}; marginals are corrupted"
    )]
    NegativeMass { index: usize, value: f64 },
    #[error("extended model would have {size} states, above the cap of {cap}")]
    ExtendedTooLarge { size: u128, cap: usize },
    #[error("sample planner needs at least one sample")]
    NoSamples,
    #[error("policy is for the {policy} regime but was evaluated under {regime}")]
    RegimeMismatch {
        policy: crate::mdp::Regime,
        regime: crate::mdp::Regime,
    },
}

/// Index of the first maximum. NaN entries never win.
pub fn argmax_first(values: &[f64]) -> usize {
    let mut best = 0;
    let mut best_value = f64::NEG_INFINITY;
    for (i, &v) in values.iter().enumerate() {
        if v > best_value {
            best = i;
            best_value = v;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmax_takes_the_lowest_index() {
        assert_eq!(argmax_first(&[1.0, 3.0, 3.0]), 1);
        assert_eq!(argmax_first(&[0.0, 0.0]), 0);
        assert_eq!(argmax_first(&[f64::NAN, -1.0]), 1);
    }
}
