//! Hermetic closed-form and oracle-equivalence checks behind
//! `lookahead-rl selftest`. Every instance is generated in-process.

use crate::envs::{dirichlet, make_fig1_prophet, make_random_mdp, make_transition_chain};
use crate::mdp::TabularLookaheadMdp;
use crate::planning::{
    build_ranked_list, mu_enumerated, mu_independent, oracle_extended_reward,
    oracle_extended_transition, plan_no_lookahead, plan_reward_lookahead,
    plan_transition_lookahead_with_mu, MuFn, RewardMethod, TransitionMethod, ValueTable,
};
use crate::rng::{Purpose, RngStream, StreamId};

pub const CHECK_FIG1: &str = "fig1-value";
pub const CHECK_MU: &str = "mu-enumeration";
pub const CHECK_EXTENDED: &str = "extended-mdp";
pub const CHECK_CHAIN: &str = "transition-chain";

const TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    /// A one-line detail on success, the reason on failure.
    pub outcome: Result<String, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelftestReport {
    pub checks: Vec<Check>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.outcome.is_ok())
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| c.outcome.is_err())
    }
}

pub fn run_selftest() -> SelftestReport {
    run_selftest_with(mu_independent)
}

/// Runs every check with `mu` standing in for the list distribution, so a
/// perturbed formula can be fed in to confirm the suite catches it.
pub fn run_selftest_with(mu: MuFn) -> SelftestReport {
    let checks = vec![
        Check {
            name: CHECK_FIG1,
            outcome: fig1_value(),
        },
        Check {
            name: CHECK_MU,
            outcome: mu_matches_enumeration(mu, 100),
        },
        Check {
            name: CHECK_EXTENDED,
            outcome: extended_agreement(mu, 20),
        },
        Check {
            name: CHECK_CHAIN,
            outcome: chain_separation(mu),
        },
    ];
    SelftestReport { checks }
}

fn fig1_value() -> Result<String, String> {
    let (a, h) = (5, 20);
    let mdp = make_fig1_prophet(a, h).map_err(|e| e.to_string())?;
    let v = plan_no_lookahead(&mdp).values.initial(0);
    if v != 0.0125 {
        return Err(format!("V* = {v}, expected 0.0125"));
    }
    let vr = plan_reward_lookahead(&mdp, RewardMethod::default())
        .map_err(|e| e.to_string())?
        .values
        .initial(0);
    let n = ((a - 1) * h) as i32;
    let closed = 1.0 - (1.0 - 1.0 / f64::from(n)).powi(n);
    if (vr - closed).abs() > 1e-10 {
        return Err(format!("V^R = {vr}, closed form {closed}"));
    }
    Ok(format!("V* = {v}, V^R = {vr:.12}"))
}

fn random_marginals(rng: &mut RngStream, num_states: usize, num_actions: usize) -> Vec<Vec<f64>> {
    (0..num_actions)
        .map(|_| dirichlet(rng, num_states))
        .collect()
}

fn mu_matches_enumeration(mu: MuFn, trials: u64) -> Result<String, String> {
    let l = build_ranked_list(2, 2, &[4.0, 3.0, 1.0, 2.0]);
    let worked: [&[f64]; 2] = [&[0.7, 0.3], &[0.4, 0.6]];
    let got = mu(&l, &worked).map_err(|e| e.to_string())?;
    let expected = [0.7, 0.12, 0.18, 0.0];
    if got
        .probs()
        .iter()
        .zip(expected)
        .any(|(x, y)| (x - y).abs() > TOL)
    {
        return Err(format!(
            "worked example gave {:?}, expected {expected:?}",
            got.probs()
        ));
    }
    for t in 0..trials {
        let mut rng = RngStream::new(t, StreamId::new(0, 0, Purpose::Other(1)));
        let ns = 1 + (rng.uniform() * 3.0) as usize;
        let na = 1 + (rng.uniform() * 3.0) as usize;
        let marginals = random_marginals(&mut rng, ns, na);
        let refs: Vec<&[f64]> = marginals.iter().map(Vec::as_slice).collect();
        let scores: Vec<f64> = (0..ns * na)
            .map(|_| (rng.uniform() * 4.0).floor())
            .collect();
        let list = build_ranked_list(ns, na, &scores);
        let fast = mu(&list, &refs).map_err(|e| format!("trial {t}: {e}"))?;
        let brute = mu_enumerated(&list, &refs).map_err(|e| format!("trial {t}: {e}"))?;
        let gap = fast
            .probs()
            .iter()
            .zip(brute.probs())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        if gap > TOL || (fast.total() - 1.0).abs() > TOL {
            return Err(format!(
                "trial {t} (S={ns}, A={na}): gap {gap:e} to enumeration, total {}",
                fast.total()
            ));
        }
    }
    Ok(format!("{trials} random lists"))
}

fn max_gap(a: &ValueTable, b: &ValueTable) -> f64 {
    a.max_abs_diff(b)
}

/// Exact planners against the extended-model oracles on small random
/// instances. Returns the largest gap seen.
pub fn extended_agreement_gap(mu: MuFn, instances: u64) -> Result<f64, String> {
    let mut worst = 0.0f64;
    for i in 0..instances {
        let mut rng = RngStream::new(i, StreamId::new(0, 0, Purpose::Other(2)));
        let ns = 1 + (rng.uniform() * 3.0) as usize;
        let na = 1 + (rng.uniform() * 3.0) as usize;
        let hn = 1 + (rng.uniform() * 3.0) as usize;
        let mdp = make_random_mdp(ns, na, hn, 1000 + i, true).map_err(|e| e.to_string())?;
        let gap = instance_gap(&mdp, mu)
            .map_err(|e| format!("instance {i} (S={ns}, A={na}, H={hn}): {e}"))?;
        if gap > TOL {
            return Err(format!(
                "instance {i} (S={ns}, A={na}, H={hn}): gap {gap:e}"
            ));
        }
        worst = worst.max(gap);
    }
    Ok(worst)
}

fn instance_gap(mdp: &TabularLookaheadMdp, mu: MuFn) -> Result<f64, String> {
    let e = |x: crate::planning::PlanError| x.to_string();
    let reward = plan_reward_lookahead(mdp, RewardMethod::default())
        .map_err(e)?
        .values;
    let reward_oracle = oracle_extended_reward(mdp).map_err(e)?;
    let list = plan_transition_lookahead_with_mu(mdp, TransitionMethod::ExactList, mu)
        .map_err(e)?
        .values;
    let joint = plan_transition_lookahead_with_mu(mdp, TransitionMethod::default(), mu)
        .map_err(e)?
        .values;
    let transition_oracle = oracle_extended_transition(mdp).map_err(e)?;
    Ok(max_gap(&reward, &reward_oracle)
        .max(max_gap(&list, &joint))
        .max(max_gap(&list, &transition_oracle))
        .max(max_gap(&joint, &transition_oracle)))
}

fn extended_agreement(mu: MuFn, instances: u64) -> Result<String, String> {
    extended_agreement_gap(mu, instances).map(|g| format!("{instances} instances, max gap {g:e}"))
}

fn chain_separation(mu: MuFn) -> Result<String, String> {
    let mdp = make_transition_chain(4, 12).map_err(|e| e.to_string())?;
    let v = plan_no_lookahead(&mdp).values.initial(0);
    let vt = plan_transition_lookahead_with_mu(&mdp, TransitionMethod::ExactList, mu)
        .map_err(|e| e.to_string())?
        .values
        .initial(0);
    if vt >= 0.5 && vt > 10.0 * v {
        Ok(format!("V^T = {vt:.6}, V* = {v:.3e}"))
    } else {
        Err(format!("V^T = {vt}, V* = {v}: separation not reached"))
    }
}
