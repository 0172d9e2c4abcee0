mod common;

use common::{ltv_reward, ltv_transition};
use lookahead_core::envs::make_random_mdp;

#[test]
fn reward_lookahead_total_variance() {
    for seed in [3, 4] {
        let mdp = make_random_mdp(3, 3, 4, seed, true).unwrap();
        let ltv = ltv_reward(&mdp, 100_000, seed);
        assert!(ltv.inequality_holds(), "{ltv:?}");
        assert!(ltv.identity_holds(), "{ltv:?}");
        // the reward-vector variance is strictly positive here, so the
        // inequality is not tight
        assert!(ltv.gap.0 < -3.0 * ltv.gap.1, "{ltv:?}");
    }
}

#[test]
fn transition_lookahead_total_variance() {
    for (seed, independent) in [(5, true), (6, false)] {
        let mdp = make_random_mdp(3, 3, 4, seed, independent).unwrap();
        let ltv = ltv_transition(&mdp, 100_000, seed);
        assert!(ltv.inequality_holds(), "{ltv:?}");
        assert!(ltv.identity_holds(), "{ltv:?}");
    }
}
