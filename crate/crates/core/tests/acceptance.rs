//! One test per acceptance criterion. Each prints a single
//! `PASS`/`FAIL criterion N: ...` line and then asserts the outcome.

mod common;

use std::io::Write;
use std::time::{Duration, Instant};

use common::{drive, experiment, ltv_reward, ltv_transition, mu_by_enumeration, standard_env};
use lookahead_core::envs::{
    make_fig1_prophet, make_random_mdp, make_transition_chain, standard_instance, EnvSpec,
};
use lookahead_core::harness::{sweep, ExperimentConfig, RegretCurve, SLOPE_WINDOW};
use lookahead_core::learners::{monotone_bonus_value, Algo, LearnerConfig};
use lookahead_core::planning::{
    build_ranked_list, mu_independent, oracle_extended_reward, oracle_extended_transition,
    plan_no_lookahead, plan_reward_lookahead, plan_transition_lookahead, RewardMethod,
    TransitionMethod, DEFAULT_SUPPORT_CAP,
};
use lookahead_core::rng::{Purpose, RngStream, StreamId};
use lookahead_core::selftest::run_selftest;
use lookahead_core::Regime;

const EXACT: RewardMethod = RewardMethod::Exact {
    cap: DEFAULT_SUPPORT_CAP,
};
const JOINT: TransitionMethod = TransitionMethod::ExactJoint {
    cap: DEFAULT_SUPPORT_CAP,
};

fn report(n: u32, ok: bool, limit: Duration, started: Instant, detail: String) {
    let took = started.elapsed();
    let ok = ok && took < limit;
    let verdict = if ok { "PASS" } else { "FAIL" };
    // written past the test harness capture so every verdict shows up
    writeln!(
        std::io::stdout().lock(),
        "{verdict} criterion {n}: {detail} ({:.2}s, limit {}s)",
        took.as_secs_f64(),
        limit.as_secs()
    )
    .unwrap();
    assert!(ok, "criterion {n} failed: {detail}");
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn stream(tag: u8) -> RngStream {
    RngStream::new(20_240_601, StreamId::new(0, 0, Purpose::Other(tag)))
}

fn pick(rng: &mut RngStream, lo: usize, hi: usize) -> usize {
    (lo + (rng.uniform() * (hi - lo + 1) as f64) as usize).min(hi)
}

#[test]
fn criterion_1_fig1_value_separation() {
    let t = Instant::now();
    let mdp = make_fig1_prophet(5, 20).unwrap();
    let v_star = plan_no_lookahead(&mdp).values.initial(0);
    let v_r = plan_reward_lookahead(&mdp, EXACT)
        .unwrap()
        .values
        .initial(0);
    let target = 1.0 - (79.0f64 / 80.0).powi(80);
    let mut ok = v_star == 0.0125 && (v_r - target).abs() <= 1e-10;
    let floor = 1.0 - (-1.0f64).exp();
    let mut worst = f64::INFINITY;
    for a in 2..=6 {
        for h in 2..=20 {
            let m = make_fig1_prophet(a, h).unwrap();
            let v = plan_reward_lookahead(&m, EXACT).unwrap().values.initial(0);
            worst = worst.min(v);
        }
    }
    ok &= worst >= floor;
    report(
        1,
        ok,
        secs(1),
        t,
        format!(
            "V* = {v_star}, V^R = {v_r:.12} vs {target:.12}, grid min {worst:.6} >= {floor:.6}"
        ),
    );
}

#[test]
fn criterion_2_transition_chain_separation() {
    let t = Instant::now();
    let mdp = make_transition_chain(4, 12).unwrap();
    let v_star = plan_no_lookahead(&mdp).values.initial(0);
    let v_t = plan_transition_lookahead(&mdp, TransitionMethod::ExactList)
        .unwrap()
        .values
        .initial(0);
    let ratio = v_t / v_star;
    report(
        2,
        v_t >= 0.5 && ratio > 10.0,
        secs(1),
        t,
        format!("V^T = {v_t:.6}, V* = {v_star:.3e}, ratio {ratio:.1}"),
    );
}

#[test]
fn criterion_3_oracle_equivalence() {
    let t = Instant::now();
    let mut rng = stream(3);
    let mut worst = 0.0f64;
    for i in 0..50u64 {
        let (s, a, h) = (
            pick(&mut rng, 1, 3),
            pick(&mut rng, 1, 3),
            pick(&mut rng, 1, 3),
        );
        let mdp = make_random_mdp(s, a, h, 1000 + i, true).unwrap();
        let exact = plan_reward_lookahead(&mdp, EXACT).unwrap().values;
        worst = worst.max(exact.max_abs_diff(&oracle_extended_reward(&mdp).unwrap()));
        let list = plan_transition_lookahead(&mdp, TransitionMethod::ExactList)
            .unwrap()
            .values;
        let joint = plan_transition_lookahead(&mdp, JOINT).unwrap().values;
        let ext = oracle_extended_transition(&mdp).unwrap();
        worst = worst
            .max(list.max_abs_diff(&joint))
            .max(list.max_abs_diff(&ext))
            .max(joint.max_abs_diff(&ext));
    }
    report(
        3,
        worst <= 1e-12,
        secs(30),
        t,
        format!("50 instances, largest gap {worst:.2e}"),
    );
}

#[test]
fn criterion_4_list_distribution() {
    let t = Instant::now();
    let mut rng = stream(4);
    let (mut gap, mut mass) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let (s, a) = (pick(&mut rng, 1, 3), pick(&mut rng, 1, 3));
        let scores: Vec<f64> = (0..s * a).map(|_| rng.uniform()).collect();
        let marginals: Vec<Vec<f64>> = (0..a)
            .map(|_| lookahead_core::envs::dirichlet(&mut rng, s))
            .collect();
        let list = build_ranked_list(s, a, &scores);
        let refs: Vec<&[f64]> = marginals.iter().map(Vec::as_slice).collect();
        let mu = mu_independent(&list, &refs).unwrap();
        let brute = mu_by_enumeration(&list, &marginals);
        for (x, y) in mu.probs().iter().zip(&brute) {
            gap = gap.max((x - y).abs());
        }
        mass = mass.max((mu.total() - 1.0).abs());
    }
    let list = build_ranked_list(2, 2, &[4.0, 3.0, 1.0, 2.0]);
    let m: [&[f64]; 2] = [&[0.7, 0.3], &[0.4, 0.6]];
    let example = mu_independent(&list, &m).unwrap();
    let example_ok = example
        .probs()
        .iter()
        .zip([0.7, 0.12, 0.18, 0.0])
        .all(|(x, y)| (x - y).abs() <= 1e-12);
    report(
        4,
        gap <= 1e-12 && mass <= 1e-12 && example_ok,
        secs(5),
        t,
        format!(
            "100 sets, enumeration gap {gap:.2e}, mass error {mass:.2e}, example {:?}",
            example.probs()
        ),
    );
}

#[test]
fn criterion_5_bonus_monotonicity() {
    let t = Instant::now();
    let mut rng = stream(5);
    let mut violations = 0;
    for _ in 0..10_000 {
        let len = pick(&mut rng, 2, 6);
        let horizon = pick(&mut rng, 1, 20);
        let hf = horizon as f64;
        let w: Vec<f64> = (0..len).map(|_| rng.uniform()).collect();
        let total: f64 = w.iter().sum::<f64>().max(1e-12);
        let p: Vec<f64> = w.iter().map(|x| x / total).collect();
        let v: Vec<f64> = (0..len).map(|_| rng.uniform() * hf).collect();
        let n = 1 + (rng.uniform() * 10_000.0) as u64;
        let l = 0.01 + rng.uniform() * 50.0;
        let i = pick(&mut rng, 0, len - 1);
        let mut up = v.clone();
        up[i] += rng.uniform() * (hf - v[i]);
        let before = monotone_bonus_value(&p, &v, n, l, horizon);
        let after = monotone_bonus_value(&p, &up, n, l, horizon);
        if after < before - 1e-12 * before.abs().max(1.0) {
            violations += 1;
        }
    }
    report(
        5,
        violations == 0,
        secs(5),
        t,
        format!("10000 trials, {violations} decreases"),
    );
}

/// Curves of `id` in seed order.
fn curves_of<'a>(all: &'a [RegretCurve], id: &str) -> Vec<&'a RegretCurve> {
    all.iter().filter(|c| c.config_id == id).collect()
}

fn mean_at(curves: &[&RegretCurve], k: usize) -> f64 {
    curves.iter().map(|c| c.regret_at(k)).sum::<f64>() / curves.len() as f64
}

fn tail_value(curves: &[&RegretCurve], k: usize) -> f64 {
    let from = k - k / 4 + 1;
    curves.iter().map(|c| c.mean_value_from(from)).sum::<f64>() / curves.len() as f64
}

#[test]
fn criterion_6_regret_sublinearity() {
    let t = Instant::now();
    let k = 20_000;
    let seeds: Vec<u64> = (1..=10).collect();
    let fig1 = EnvSpec::Fig1Prophet {
        num_actions: 5,
        horizon: 20,
    };
    let configs: Vec<ExperimentConfig> = vec![
        experiment(
            "rl",
            standard_env(),
            LearnerConfig::new(Algo::MvpRl),
            Regime::Reward,
            k,
            seeds.clone(),
        ),
        experiment(
            "tl",
            standard_env(),
            LearnerConfig::new(Algo::MvpTl),
            Regime::Transition,
            k,
            seeds.clone(),
        ),
        experiment(
            "fig1-rl",
            fig1.clone(),
            LearnerConfig::new(Algo::MvpRl),
            Regime::Reward,
            k,
            seeds.clone(),
        ),
        experiment(
            "fig1-vanilla",
            fig1,
            LearnerConfig::new(Algo::MvpVanilla),
            Regime::Reward,
            k,
            seeds,
        ),
    ];
    let dir = tempfile::tempdir().unwrap();
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    let out = sweep(&configs, threads, dir.path(), false).unwrap();
    assert!(out.failures.is_empty(), "{:?}", out.failures);

    let mut ok = true;
    let mut parts = Vec::new();
    for id in ["rl", "tl"] {
        let curves = curves_of(&out.curves, id);
        let ratio = mean_at(&curves, k) / mean_at(&curves, k / 2);
        let slope = out
            .summaries
            .iter()
            .find(|s| s.config_id == id)
            .and_then(|s| s.slope)
            .unwrap_or(f64::NAN);
        ok &= ratio <= 1.9 && slope <= 0.8;
        parts.push(format!(
            "{id}: Reg(K)/Reg(K/2) = {ratio:.3}, slope({SLOPE_WINDOW}) = {slope:.3}"
        ));
    }
    let rl = tail_value(&curves_of(&out.curves, "fig1-rl"), k);
    let vanilla = tail_value(&curves_of(&out.curves, "fig1-vanilla"), k);
    ok &= rl >= 0.5 && vanilla <= 0.02;
    parts.push(format!(
        "fig1 tail return rl {rl:.4} vs vanilla {vanilla:.4}"
    ));
    report(6, ok, secs(600), t, parts.join("; "));
}

#[test]
fn criterion_7_empirical_optimism() {
    let t = Instant::now();
    let mdp = standard_instance();
    let v_r = plan_reward_lookahead(&mdp, EXACT).unwrap().values;
    let v_t = plan_transition_lookahead(&mdp, JOINT).unwrap().values;
    let mut parts = Vec::new();
    let mut ok = true;
    for (algo, regime, target) in [
        (Algo::MvpRl, Regime::Reward, &v_r),
        (Algo::MvpTl, Regime::Transition, &v_t),
    ] {
        let mut good = 0;
        for seed in 1..=20u64 {
            let mut learner = LearnerConfig::new(algo).build(&mdp, regime).unwrap();
            let mut always = true;
            drive(&mdp, learner.as_mut(), regime, 2000, seed, |k, l| {
                let s1 = mdp.initial_state(k);
                always &= l.optimistic_value(s1).unwrap() >= target.initial(s1);
            });
            good += usize::from(always);
        }
        ok &= good >= 18;
        parts.push(format!(
            "{algo}: {good}/20 seeds optimistic for all k <= 2000"
        ));
    }
    report(7, ok, secs(120), t, parts.join("; "));
}

#[test]
fn criterion_8_total_variance() {
    let t = Instant::now();
    let reward = ltv_reward(&make_random_mdp(3, 3, 4, 3, true).unwrap(), 100_000, 1);
    let transition = ltv_transition(&make_random_mdp(3, 3, 4, 5, true).unwrap(), 100_000, 2);
    let ok = reward.inequality_holds()
        && reward.identity_holds()
        && transition.inequality_holds()
        && transition.identity_holds();
    report(
        8,
        ok,
        secs(60),
        t,
        format!(
            "reward: E[sum Var] {:.4} <= E[(G - V)^2] {:.4} (gap {:.4} +- {:.4}); \
             transition: {:.4} vs {:.4} (gap {:.4} +- {:.4})",
            reward.variances.0,
            reward.squared_error.0,
            reward.gap.0,
            reward.gap.1,
            transition.variances.0,
            transition.squared_error.0,
            transition.gap.0,
            transition.gap.1
        ),
    );
}

fn dir_bytes(dir: &std::path::Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn criterion_9_determinism_and_selftest() {
    let t = Instant::now();
    let seeds: Vec<u64> = (1..=3).collect();
    let configs = vec![
        experiment(
            "rl",
            standard_env(),
            LearnerConfig::new(Algo::MvpRl),
            Regime::Reward,
            300,
            seeds.clone(),
        ),
        experiment(
            "tl",
            standard_env(),
            LearnerConfig::new(Algo::MvpTl),
            Regime::Transition,
            300,
            seeds,
        ),
    ];
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    sweep(&configs, 2, a.path(), false).unwrap();
    sweep(&configs, 1, b.path(), false).unwrap();
    let (first, second) = (dir_bytes(a.path()), dir_bytes(b.path()));
    let identical = !first.is_empty() && first == second;
    let selftest = Instant::now();
    let st = run_selftest();
    let st_time = selftest.elapsed();
    let st_ok = st.passed() && st_time < secs(60);
    report(
        9,
        identical && st_ok,
        secs(90),
        t,
        format!(
            "{} CSVs byte-identical: {identical}; selftest passed: {} in {:.2}s",
            first.len(),
            st.passed(),
            st_time.as_secs_f64()
        ),
    );
}
