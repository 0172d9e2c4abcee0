//! Brute-force oracles: embed the lookahead observation into the state to
//! get an ordinary MDP of horizon `2H`, then run plain backward induction.
//!
//! Step `2h` moves `(s, 0)` to `(s, x)` where `x` is the drawn observation,
//! for every action and with reward 0. Step `2h + 1` plays an action against
//! the now visible `x`. The value of `(s, 0)` at step `2h` is the lookahead
//! value at step `h`.

use std::collections::HashMap;

use super::policy::expand;
use super::values::ValueTable;
use super::PlanError;
use crate::dist::Outcome;
use crate::mdp::{Regime, TabularLookaheadMdp};

/// Largest extended state space the oracles will build.
pub const MAX_EXTENDED_STATES: usize = 100_000;

/// Finite-horizon MDP given by a dynamics callback
/// `(t, x, a, next) -> reward` that fills `next` with `(x', prob)`.
fn backward_induction(
    num_states: usize,
    num_actions: usize,
    steps: usize,
    dynamics: impl Fn(usize, usize, usize, &mut Vec<(usize, f64)>) -> f64,
) -> Vec<Vec<f64>> {
    let mut w = vec![vec![0.0; num_states]; steps + 1];
    let mut next = Vec::new();
    for t in (0..steps).rev() {
        let (head, tail) = w.split_at_mut(t + 1);
        let (cur, after) = (&mut head[t], &tail[0]);
        for (x, slot) in cur.iter_mut().enumerate() {
            let mut best = f64::NEG_INFINITY;
            for a in 0..num_actions {
                next.clear();
                let r = dynamics(t, x, a, &mut next);
                let q = r + next.iter().map(|&(y, p)| p * after[y]).sum::<f64>();
                best = best.max(q);
            }
            *slot = best;
        }
    }
    w
}

fn check_size(size: u128) -> Result<usize, PlanError> {
    if size > MAX_EXTENDED_STATES as u128 {
        return Err(PlanError::ExtendedTooLarge {
            size,
            cap: MAX_EXTENDED_STATES,
        });
    }
    Ok(size as usize)
}

/// Reward-lookahead value via the extended model over states
/// `S x ({0} + reward vectors)`.
pub fn oracle_extended_reward(mdp: &TabularLookaheadMdp) -> Result<ValueTable, PlanError> {
    let (hn, sn, an) = (mdp.horizon(), mdp.num_states(), mdp.num_actions());
    let mut observations: Vec<Vec<f64>> = vec![vec![0.0; an]];
    let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
    index.insert(vec![0.0f64.key(); an], 0);
    // (observation id, weight) per (h, s)
    let mut laws = Vec::with_capacity(hn * sn);
    for h in 0..hn {
        for s in 0..sn {
            let atoms = expand(mdp.reward_dist(h, s), "reward", h, s, MAX_EXTENDED_STATES)?;
            let mut law = Vec::with_capacity(atoms.len());
            for atom in atoms {
                let key: Vec<u64> = atom.outcome.iter().map(|r| r.key()).collect();
                let id = *index.entry(key).or_insert_with(|| {
                    observations.push(atom.outcome.clone());
                    observations.len() - 1
                });
                law.push((id, atom.weight));
            }
            laws.push(law);
        }
        check_size(sn as u128 * observations.len() as u128)?;
    }
    let no = observations.len();
    let w = backward_induction(sn * no, an, 2 * hn, |t, x, a, next| {
        let (h, s, o) = (t / 2, x / no, x % no);
        if t % 2 == 0 {
            next.extend(laws[h * sn + s].iter().map(|&(id, p)| (s * no + id, p)));
            0.0
        } else {
            for (sp, &p) in mdp.kernel(h, s, a).iter().enumerate() {
                if p > 0.0 {
                    next.push((sp * no, p));
                }
            }
            observations[o][a]
        }
    });
    let mut v = ValueTable::zeros(Regime::Reward, hn, sn);
    for h in 0..hn {
        for s in 0..sn {
            v.set(h, s, w[2 * h][s * no]);
        }
    }
    Ok(v)
}

/// Transition-lookahead value via the extended model over states
/// `S x S^A`, where the all-zero vector doubles as the placeholder.
pub fn oracle_extended_transition(mdp: &TabularLookaheadMdp) -> Result<ValueTable, PlanError> {
    let (hn, sn, an) = (mdp.horizon(), mdp.num_states(), mdp.num_actions());
    let vectors = (sn as u128).checked_pow(an as u32).unwrap_or(u128::MAX);
    check_size((sn as u128).saturating_mul(vectors))?;
    let nv = vectors as usize;
    let encode = |v: &[usize]| v.iter().fold(0, |acc, &x| acc * sn + x);
    let mut laws = Vec::with_capacity(hn * sn);
    for h in 0..hn {
        for s in 0..sn {
            let atoms = expand(
                mdp.transition_dist(h, s),
                "transition",
                h,
                s,
                MAX_EXTENDED_STATES,
            )?;
            laws.push(
                atoms
                    .iter()
                    .map(|atom| (encode(&atom.outcome), atom.weight))
                    .collect::<Vec<_>>(),
            );
        }
    }
    let w = backward_induction(sn * nv, an, 2 * hn, |t, x, a, next| {
        let (h, s, code) = (t / 2, x / nv, x % nv);
        if t % 2 == 0 {
            next.extend(laws[h * sn + s].iter().map(|&(c, p)| (s * nv + c, p)));
            0.0
        } else {
            // coordinate a of the mixed-radix code, first action most significant
            let target = (code / sn.pow((an - 1 - a) as u32)) % sn;
            next.push((target * nv, 1.0));
            mdp.mean_reward(h, s, a)
        }
    });
    let mut v = ValueTable::zeros(Regime::Transition, hn, sn);
    for h in 0..hn {
        for s in 0..sn {
            v.set(h, s, w[2 * h][s * nv]);
        }
    }
    Ok(v)
}
