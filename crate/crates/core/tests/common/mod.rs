//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use lookahead_core::dist::{JointFiniteDistribution, Marginal};
use lookahead_core::envs::EnvSpec;
use lookahead_core::episode::{run_episode, Agent};
use lookahead_core::harness::{EnvRef, ExperimentConfig, RegretMode};
use lookahead_core::learners::{Algo, Learner, LearnerConfig};
use lookahead_core::mdp::{InitialStates, Regime, TabularLookaheadMdp};
use lookahead_core::planning::{LookaheadPolicy, PolicyAgent, RankedList, DEFAULT_SUPPORT_CAP};
use lookahead_core::rng::{Purpose, RngStream, StreamId};

pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Mean realized return of `policy` over `episodes` simulated episodes, with
/// its standard error.
pub fn monte_carlo_return(
    mdp: &TabularLookaheadMdp,
    policy: &LookaheadPolicy,
    regime: Regime,
    episodes: usize,
    seed: u64,
) -> (f64, f64) {
    let mut agent = PolicyAgent {
        policy: policy.clone(),
    };
    let returns: Vec<f64> = (1..=episodes)
        .map(|k| {
            run_episode(mdp, &mut agent, regime, k, seed)
                .unwrap()
                .total_return
        })
        .collect();
    mean_se(&returns)
}

/// Probability that each list element is the highest-ranked realized pair,
/// by enumerating all `S^A` next-state vectors of independent actions.
pub fn mu_by_enumeration(list: &RankedList, marginals: &[Vec<f64>]) -> Vec<f64> {
    let (sn, an) = (list.num_states(), list.num_actions());
    let mut mu = vec![0.0; list.len()];
    let mut ns = vec![0usize; an];
    loop {
        let p: f64 = ns
            .iter()
            .enumerate()
            .map(|(a, &s)| marginals[a][s])
            .product();
        let best = list
            .pairs()
            .iter()
            .position(|&(s, a)| ns[a] == s)
            .expect("every action realizes some pair");
        mu[best] += p;
        let mut i = 0;
        loop {
            if i == an {
                return mu;
            }
            ns[i] += 1;
            if ns[i] < sn {
                break;
            }
            ns[i] = 0;
            i += 1;
        }
    }
}

/// Best value over all deterministic Markov policies, each scored by its own
/// backward evaluation.
pub fn brute_force_markov_value(mdp: &TabularLookaheadMdp, s1: usize) -> f64 {
    let (hn, sn, an) = (mdp.horizon(), mdp.num_states(), mdp.num_actions());
    let cells = hn * sn;
    let total = an.pow(cells as u32);
    let mut best = f64::NEG_INFINITY;
    for code in 0..total {
        let mut c = code;
        let actions: Vec<usize> = (0..cells)
            .map(|_| {
                let a = c % an;
                c /= an;
                a
            })
            .collect();
        let mut v = vec![0.0; sn];
        for h in (0..hn).rev() {
            v = (0..sn)
                .map(|s| {
                    let a = actions[h * sn + s];
                    mdp.mean_reward(h, s, a)
                        + mdp
                            .kernel(h, s, a)
                            .iter()
                            .zip(&v)
                            .map(|(p, x)| p * x)
                            .sum::<f64>()
                })
                .collect();
        }
        best = best.max(v[s1]);
    }
    best
}

/// Prophet value of independent stages: `V_i = E[max(X_i, V_{i+1})]`.
pub fn prophet_value(stages: &[Vec<(f64, f64)>]) -> f64 {
    stages
        .iter()
        .rev()
        .fold(0.0, |v, st| st.iter().map(|(x, p)| p * x.max(v)).sum())
}

fn stream(seed: u64, tag: u8) -> RngStream {
    RngStream::new(seed, StreamId::new(0, 0, Purpose::Other(tag)))
}

fn simplex(rng: &mut RngStream, n: usize) -> Vec<f64> {
    lookahead_core::envs::dirichlet(rng, n)
}

/// Random instance whose rewards are deterministic and whose transitions
/// are independent across actions.
pub fn deterministic_reward_mdp(seed: u64, sn: usize, an: usize, hn: usize) -> TabularLookaheadMdp {
    let mut rng = stream(seed, 1);
    let rewards = (0..hn)
        .map(|_| {
            (0..sn)
                .map(|_| {
                    JointFiniteDistribution::point((0..an).map(|_| rng.uniform()).collect())
                        .unwrap()
                })
                .collect()
        })
        .collect();
    let transitions = (0..hn)
        .map(|_| {
            (0..sn)
                .map(|_| {
                    let ms = (0..an)
                        .map(|_| {
                            Marginal::new(simplex(&mut rng, sn).into_iter().enumerate().collect())
                                .unwrap()
                        })
                        .collect();
                    JointFiniteDistribution::product(ms).unwrap()
                })
                .collect()
        })
        .collect();
    TabularLookaheadMdp::new(sn, an, hn, rewards, transitions, InitialStates::fixed(0)).unwrap()
}

/// Random instance with Bernoulli rewards and deterministic transitions.
pub fn deterministic_transition_mdp(
    seed: u64,
    sn: usize,
    an: usize,
    hn: usize,
) -> TabularLookaheadMdp {
    let mut rng = stream(seed, 2);
    let mut rewards = Vec::new();
    let mut transitions = Vec::new();
    for _ in 0..hn {
        let mut rrow = Vec::new();
        let mut trow = Vec::new();
        for _ in 0..sn {
            let ms = (0..an)
                .map(|_| Marginal::bernoulli(rng.uniform()).unwrap())
                .collect();
            rrow.push(JointFiniteDistribution::product(ms).unwrap());
            let targets = (0..an)
                .map(|_| ((rng.uniform() * sn as f64) as usize).min(sn - 1))
                .collect();
            trow.push(JointFiniteDistribution::point(targets).unwrap());
        }
        rewards.push(rrow);
        transitions.push(trow);
    }
    TabularLookaheadMdp::new(sn, an, hn, rewards, transitions, InitialStates::fixed(0)).unwrap()
}

pub fn experiment(
    id: &str,
    env: EnvSpec,
    learner: LearnerConfig,
    regime: Regime,
    episodes: usize,
    seeds: Vec<u64>,
) -> ExperimentConfig {
    ExperimentConfig {
        id: id.to_string(),
        env: EnvRef::Family(env),
        learner,
        regime,
        episodes,
        seeds,
        regret_mode: RegretMode::ExactEval,
        output: None,
        checkpoint_every: None,
        timing: false,
        support_cap: DEFAULT_SUPPORT_CAP,
    }
}

pub fn standard_env() -> EnvSpec {
    EnvSpec::Random {
        num_states: 3,
        num_actions: 3,
        horizon: 4,
        seed: 2024,
        independent: true,
    }
}

/// Learner config with both bonus multipliers and the log term at zero.
pub fn plug_in(algo: Algo) -> LearnerConfig {
    let mut c = LearnerConfig::new(algo);
    c.bonus_scale.reward = 0.0;
    c.bonus_scale.transition = 0.0;
    c.log_term = Some(0.0);
    c
}

/// Plays `episodes` episodes, calling `after(k, learner)` right after each
/// plan step.
pub fn drive(
    mdp: &TabularLookaheadMdp,
    learner: &mut dyn Learner,
    regime: Regime,
    episodes: usize,
    seed: u64,
    mut after: impl FnMut(usize, &dyn Learner),
) {
    for k in 1..=episodes {
        learner.plan(k).unwrap();
        after(k, learner);
        let record = run_episode(mdp, learner as &mut dyn Agent, regime, k, seed).unwrap();
        learner.update(&record).unwrap();
    }
}

/// Per-episode Monte Carlo statistics behind the total-variance checks.
#[derive(Debug, Clone, Copy)]
pub struct Ltv {
    /// Expected summed one-step variances.
    pub variances: (f64, f64),
    /// `E[(return - V_1)^2]`.
    pub squared_error: (f64, f64),
    /// Paired difference of the two, per episode.
    pub gap: (f64, f64),
    /// `(return - V_1)^2` minus the full odd-plus-even variance sum.
    pub identity: (f64, f64),
}

impl Ltv {
    /// The inequality holds within three standard errors.
    pub fn inequality_holds(&self) -> bool {
        self.gap.0 <= 3.0 * self.gap.1
    }

    /// The exact decomposition holds within three standard errors.
    pub fn identity_holds(&self) -> bool {
        self.identity.0.abs() <= 3.0 * self.identity.1
    }
}

fn variance_under(p: &[f64], v: &[f64]) -> f64 {
    let m: f64 = p.iter().zip(v).map(|(p, v)| p * v).sum();
    p.iter().zip(v).map(|(p, v)| p * (v - m) * (v - m)).sum()
}

fn weighted_variance(points: &[(f64, f64)]) -> (f64, f64) {
    let m: f64 = points.iter().map(|(w, x)| w * x).sum();
    (m, points.iter().map(|(w, x)| w * (x - m) * (x - m)).sum())
}

fn summarize_ltv(rows: &[(f64, f64, f64)]) -> Ltv {
    let col =
        |f: &dyn Fn(&(f64, f64, f64)) -> f64| mean_se(&rows.iter().map(f).collect::<Vec<_>>());
    Ltv {
        variances: col(&|r| r.0),
        squared_error: col(&|r| r.1),
        gap: col(&|r| r.0 - r.1),
        identity: col(&|r| r.1 - r.2),
    }
}

/// Reward lookahead under the optimal threshold policy: summed
/// `Var_{P_h(.|s_h, a_h)}(V_{h+1})` against `(sum_h R_h - V_1)^2`; the
/// identity adds the variance over the reward vector of
/// `R(a) + P_h V_{h+1}(s_h, a)` at each step.
pub fn ltv_reward(mdp: &TabularLookaheadMdp, episodes: usize, seed: u64) -> Ltv {
    use lookahead_core::planning::{evaluate_lookahead_policy, plan_reward_lookahead};
    let plan = plan_reward_lookahead(mdp, Default::default()).unwrap();
    let v = evaluate_lookahead_policy(mdp, &plan.policy, DEFAULT_SUPPORT_CAP).unwrap();
    let (hn, sn, an) = (mdp.horizon(), mdp.num_states(), mdp.num_actions());
    let mut var_p = vec![0.0; hn * sn * an];
    let mut var_r = vec![0.0; hn * sn];
    for h in 0..hn {
        let next = v.row(h + 1);
        for s in 0..sn {
            let pv: Vec<f64> = (0..an)
                .map(|a| {
                    let k = mdp.kernel(h, s, a);
                    var_p[(h * sn + s) * an + a] = variance_under(k, next);
                    k.iter().zip(next).map(|(p, x)| p * x).sum()
                })
                .collect();
            let atoms = mdp.reward_dist(h, s).atoms(DEFAULT_SUPPORT_CAP).unwrap();
            let points: Vec<(f64, f64)> = atoms
                .iter()
                .map(|atom| {
                    let obs = lookahead_core::Observation::Rewards(atom.outcome.clone());
                    let a = plan.policy.act(h, s, &obs);
                    (atom.weight, atom.outcome[a] + pv[a])
                })
                .collect();
            let (m, var) = weighted_variance(&points);
            assert!((m - v.get(h, s)).abs() < 1e-9, "policy value mismatch");
            var_r[h * sn + s] = var;
        }
    }
    let mut agent = PolicyAgent {
        policy: plan.policy.clone(),
    };
    let rows: Vec<(f64, f64, f64)> = (1..=episodes)
        .map(|k| {
            let rec = run_episode(mdp, &mut agent, Regime::Reward, k, seed).unwrap();
            let (mut x, mut z) = (0.0, 0.0);
            for (h, st) in rec.steps.iter().enumerate() {
                let vp = var_p[(h * sn + st.state) * an + st.action];
                x += vp;
                z += vp + var_r[h * sn + st.state];
            }
            let y = (rec.total_return - v.initial(rec.initial_state())).powi(2);
            (x, y, z)
        })
        .collect();
    summarize_ltv(&rows)
}

/// Transition lookahead under the optimal list policy: summed
/// `Var_{s' ~ P_h(s_h)}(r_h(s_h, a(s')) + V_{h+1}(s'(a)))` against
/// `(sum_h r_h(s_h, a_h) - V_1)^2`. The next state is fixed once `s'` is
/// seen, so the two sides are equal in expectation and the identity
/// coincides with the inequality.
pub fn ltv_transition(mdp: &TabularLookaheadMdp, episodes: usize, seed: u64) -> Ltv {
    use lookahead_core::planning::{evaluate_lookahead_policy, plan_transition_lookahead};
    let plan = plan_transition_lookahead(mdp, Default::default()).unwrap();
    let v = evaluate_lookahead_policy(mdp, &plan.policy, DEFAULT_SUPPORT_CAP).unwrap();
    let (hn, sn) = (mdp.horizon(), mdp.num_states());
    let mut var_t = vec![0.0; hn * sn];
    for h in 0..hn {
        let next = v.row(h + 1);
        for s in 0..sn {
            let atoms = mdp
                .transition_dist(h, s)
                .atoms(DEFAULT_SUPPORT_CAP)
                .unwrap();
            let points: Vec<(f64, f64)> = atoms
                .iter()
                .map(|atom| {
                    let obs = lookahead_core::Observation::NextStates(atom.outcome.clone());
                    let a = plan.policy.act(h, s, &obs);
                    (
                        atom.weight,
                        mdp.mean_reward(h, s, a) + next[atom.outcome[a]],
                    )
                })
                .collect();
            let (m, var) = weighted_variance(&points);
            assert!((m - v.get(h, s)).abs() < 1e-9, "policy value mismatch");
            var_t[h * sn + s] = var;
        }
    }
    let mut agent = PolicyAgent {
        policy: plan.policy.clone(),
    };
    let rows: Vec<(f64, f64, f64)> = (1..=episodes)
        .map(|k| {
            let rec = run_episode(mdp, &mut agent, Regime::Transition, k, seed).unwrap();
            let mut x = 0.0;
            let mut g = 0.0;
            for (h, st) in rec.steps.iter().enumerate() {
                x += var_t[h * sn + st.state];
                g += mdp.mean_reward(h, st.state, st.action);
            }
            let y = (g - v.initial(rec.initial_state())).powi(2);
            (x, y, x)
        })
        .collect();
    summarize_ltv(&rows)
}
