//! Confidence terms and exploration bonuses.

use serde::{Deserialize, Serialize};

use super::LearnerError;

/// `delta`, per-family bonus multipliers and an optional fixed log term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BonusConfig {
    pub delta: f64,
    #[serde(default)]
    pub bonus_scale: BonusScale,
    /// Replaces the episode-dependent log term when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_term: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BonusScale {
    #[serde(default = "one")]
    pub reward: f64,
    #[serde(default = "one")]
    pub transition: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for BonusScale {
    fn default() -> Self {
        Self {
            reward: 1.0,
            transition: 1.0,
        }
    }
}

impl Default for BonusConfig {
    fn default() -> Self {
        Self {
            delta: 0.1,
            bonus_scale: BonusScale::default(),
            log_term: None,
        }
    }
}

impl BonusConfig {
    pub fn new(delta: f64) -> Result<Self, LearnerError> {
        let c = Self {
            delta,
            ..Self::default()
        };
        c.validate()?;
        Ok(c)
    }

    /// Multipliers and fixed log term set to zero: plain plug-in planning.
    pub fn without_bonuses() -> Self {
        Self {
            delta: 0.1,
            bonus_scale: BonusScale {
                reward: 0.0,
                transition: 0.0,
            },
            log_term: Some(0.0),
        }
    }

    pub fn validate(&self) -> Result<(), LearnerError> {
        check_delta(self.delta)?;
        let s = self.bonus_scale;
        if !(s.reward >= 0.0
            && s.reward.is_finite()
            && s.transition >= 0.0
            && s.transition.is_finite())
        {
            return Err(LearnerError::Config(format!(
                "bonus multipliers must be finite and non-negative, got {} and {}",
                s.reward, s.transition
            )));
        }
        if let Some(l) = self.log_term {
            if !(l >= 0.0 && l.is_finite()) {
                return Err(LearnerError::Config(format!(
                    "log term override must be finite and >= 0, got {l}"
                )));
            }
        }
        Ok(())
    }
}

fn check_delta(delta: f64) -> Result<(), LearnerError> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(LearnerError::Config(format!(
            "delta must lie in (0, 1), got {delta}"
        )))
    }
}

fn check_episode(k: usize) -> Result<(), LearnerError> {
    if k == 0 {
        return Err(LearnerError::Config("episodes are numbered from 1".into()));
    }
    Ok(())
}

/// `ln(144 S^2 A H^2 k^3 (k + 1) / delta)`.
pub fn log_term_rl(
    k: usize,
    s: usize,
    a: usize,
    h: usize,
    delta: f64,
) -> Result<f64, LearnerError> {
    check_delta(delta)?;
    check_episode(k)?;
    let (s, a, h, k) = (s as f64, a as f64, h as f64, k as f64);
    Ok((144.0 * s * s * a * h * h * k * k * k * (k + 1.0) / delta).ln())
}

/// `ln(16 S^3 A^2 H k^2 (k + 1) / delta)`.
pub fn log_term_tl(
    k: usize,
    s: usize,
    a: usize,
    h: usize,
    delta: f64,
) -> Result<f64, LearnerError> {
    check_delta(delta)?;
    check_episode(k)?;
    let (s, a, h, k) = (s as f64, a as f64, h as f64, k as f64);
    Ok((16.0 * s * s * s * a * a * h * k * k * (k + 1.0) / delta).ln())
}

fn floor1(n: u64) -> f64 {
    n.max(1) as f64
}

/// Variance of `v` under weights `p` (two-pass, never negative).
pub fn variance(p: &[f64], v: &[f64]) -> f64 {
    let mean: f64 = p.iter().zip(v).map(|(p, v)| p * v).sum();
    p.iter()
        .zip(v)
        .map(|(p, v)| p * (v - mean) * (v - mean))
        .sum()
}

/// Reward bonus of the reward-lookahead learner, `3 sqrt(A L / (2 n(s)))`.
pub fn rl_reward_bonus(num_actions: usize, log_term: f64, n_s: u64) -> f64 {
    3.0 * (num_actions as f64 * log_term / (2.0 * floor1(n_s))).sqrt()
}

/// Transition bonus of the reward-lookahead learner before scaling is
/// applied: `(20/3) sqrt(Var L / n) + (400/9) H L / n`.
pub fn rl_transition_term(var: f64, log_term: f64, n_sa: u64, horizon: usize) -> f64 {
    let n = floor1(n_sa);
    20.0 / 3.0 * (var * log_term / n).sqrt() + 400.0 / 9.0 * horizon as f64 * log_term / n
}

/// `min{scale * term, H}`.
pub fn rl_transition_bonus(var: f64, log_term: f64, n_sa: u64, horizon: usize, scale: f64) -> f64 {
    (scale * rl_transition_term(var, log_term, n_sa, horizon)).min(horizon as f64)
}

/// Reward bonus of the transition-lookahead learner, `min{scale sqrt(L / n(s, a)), 1}`.
pub fn tl_reward_bonus(log_term: f64, n_sa: u64, scale: f64) -> f64 {
    (scale * (log_term / floor1(n_sa)).sqrt()).min(1.0)
}

/// Transition bonus of the transition-lookahead learner,
/// `scale ((20/3) sqrt(Var L / n(s)) + (400/3) H L / n(s))`.
pub fn tl_transition_bonus(var: f64, log_term: f64, n_s: u64, horizon: usize, scale: f64) -> f64 {
    let n = floor1(n_s);
    scale * (20.0 / 3.0 * (var * log_term / n).sqrt() + 400.0 / 3.0 * horizon as f64 * log_term / n)
}

/// `p.v + max{(20/3) sqrt(Var_p(v) L / n), (400/9) H L / n}`, which is
/// non-decreasing in every entry of `v` on `[0, H]^S`.
pub fn monotone_bonus_value(p: &[f64], v: &[f64], n: u64, log_term: f64, horizon: usize) -> f64 {
    let n = floor1(n);
    let mean: f64 = p.iter().zip(v).map(|(p, v)| p * v).sum();
    let a = 20.0 / 3.0 * (variance(p, v) * log_term / n).sqrt();
    let b = 400.0 / 9.0 * horizon as f64 * log_term / n;
    mean + a.max(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_terms() {
        // 144 * 4 * 2 * 4 * 1 * 2 / 0.1 and 16 * 8 * 4 * 2 * 1 * 2 / 0.1
        let rl = log_term_rl(1, 2, 2, 2, 0.1).unwrap();
        assert!((rl - 92160f64.ln()).abs() < 1e-12);
        assert!((rl - 11.4313).abs() < 1e-4);
        let tl = log_term_tl(1, 2, 2, 2, 0.1).unwrap();
        assert!((tl - 20480f64.ln()).abs() < 1e-12);
        assert!((tl - 9.9272).abs() < 1e-4);
        assert!(log_term_rl(1, 2, 2, 2, 1.0).is_err());
        assert!(log_term_tl(1, 2, 2, 2, 0.0).is_err());
        assert!(log_term_rl(0, 2, 2, 2, 0.5).is_err());
        for k in 1..500 {
            assert!(
                log_term_rl(k + 1, 3, 3, 4, 0.1).unwrap() > log_term_rl(k, 3, 3, 4, 0.1).unwrap()
            );
            assert!(
                log_term_tl(k + 1, 3, 3, 4, 0.1).unwrap() > log_term_tl(k, 3, 3, 4, 0.1).unwrap()
            );
        }
    }

    #[test]
    fn unvisited_pairs_saturate() {
        assert_eq!(rl_transition_bonus(0.0, 1.0, 0, 7, 1.0), 7.0);
        assert_eq!(tl_reward_bonus(2.0, 0, 1.0), 1.0);
    }

    #[test]
    fn hand_evaluations() {
        // V = (0, 2) under (0.5, 0.5): Var = 1
        let var = variance(&[0.5, 0.5], &[0.0, 2.0]);
        assert_eq!(var, 1.0);
        let raw = rl_transition_term(var, 10.0, 100, 2);
        let expected = 20.0 / 3.0 * 0.1f64.sqrt() + 400.0 / 9.0 * 2.0 * 10.0 / 100.0;
        assert!((raw - expected).abs() < 1e-12);
        assert!((raw - (2.1082 + 8.8889)).abs() < 1e-3);
        assert_eq!(rl_transition_bonus(var, 10.0, 100, 2, 1.0), 2.0);
        // stored values {1, 3}: Var = 1
        let var = variance(&[0.5, 0.5], &[1.0, 3.0]);
        let b = tl_transition_bonus(var, 10.0, 2, 5, 1.0);
        let expected = 20.0 / 3.0 * 5f64.sqrt() + 400.0 / 3.0 * 5.0 * 10.0 / 2.0;
        assert!((b - expected).abs() < 1e-9);
    }

    #[test]
    fn zero_variance_leaves_the_count_term() {
        assert_eq!(
            rl_transition_bonus(variance(&[0.25, 0.75], &[2.0, 2.0]), 3.0, 1000, 5, 1.0),
            400.0 / 9.0 * 5.0 * 3.0 / 1000.0
        );
        assert_eq!(
            tl_transition_bonus(0.0, 3.0, 400, 5, 1.0),
            400.0 / 3.0 * 5.0 * 3.0 / 400.0
        );
    }

    #[test]
    fn config_validation() {
        assert!(BonusConfig::new(0.0).is_err());
        assert!(BonusConfig::new(1.0).is_err());
        assert!(BonusConfig::new(0.5).is_ok());
        let mut c = BonusConfig::default();
        c.bonus_scale.reward = -1.0;
        assert!(c.validate().is_err());
        let c: BonusConfig =
            serde_json::from_str(r#"{"delta": 0.2, "bonus_scale": {"reward": 0.5}}"#).unwrap();
        assert_eq!(c.bonus_scale.transition, 1.0);
        assert_eq!(c.bonus_scale.reward, 0.5);
    }
}
