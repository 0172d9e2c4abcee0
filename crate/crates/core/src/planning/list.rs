//! Ranked lists of `(next state, action)` pairs and the distribution of the
//! highest-ranked realized pair.

use super::PlanError;

/// All `S * A` pairs sorted by non-increasing score, ties broken by
/// `(state, action)` ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedList {
    num_states: usize,
    num_actions: usize,
    pairs: Vec<(usize, usize)>,
    scores: Vec<f64>,
    /// Position of pair `(s, a)` at index `s * A + a`.
    rank: Vec<usize>,
}

/// `scores[s * A + a]` is the score of next state `s` under action `a`.
pub fn build_ranked_list(num_states: usize, num_actions: usize, scores: &[f64]) -> RankedList {
    assert_eq!(scores.len(), num_states * num_actions, "one score per pair");
    let mut order: Vec<usize> = (0..scores.len()).collect();
    // stable, so equal scores keep (state, action) order
    order.sort_by(|&i, &j| scores[j].total_cmp(&scores[i]));
    let mut rank = vec![0; order.len()];
    for (pos, &idx) in order.iter().enumerate() {
        rank[idx] = pos;
    }
    RankedList {
        num_states,
        num_actions,
        pairs: order
            .iter()
            .map(|&i| (i / num_actions, i % num_actions))
            .collect(),
        scores: order.iter().map(|&i| scores[i]).collect(),
        rank,
    }
}

impl RankedList {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn rank_of(&self, state: usize, action: usize) -> usize {
        self.rank[state * self.num_actions + action]
    }

    /// Action whose realized pair `(next_states[a], a)` ranks highest.
    pub fn choose(&self, next_states: &[usize]) -> usize {
        next_states
            .iter()
            .enumerate()
            .min_by_key(|&(a, &s)| self.rank_of(s, a))
            .map(|(a, _)| a)
            .expect("at least one action")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ListDistribution {
    mu: Vec<f64>,
}

impl ListDistribution {
    /// Wraps precomputed probabilities, one per list position.
    pub fn from_probs(mu: Vec<f64>) -> Self {
        Self { mu }
    }

    pub fn probs(&self) -> &[f64] {
        &self.mu
    }

    pub fn total(&self) -> f64 {
        self.mu.iter().sum()
    }

    /// `sum_i mu[i] * values[i]`.
    pub fn expectation(&self, values: &[f64]) -> f64 {
        self.mu.iter().zip(values).map(|(m, v)| m * v).sum()
    }
}

/// Signature shared by the closed form and the brute-force enumeration.
pub type MuFn = fn(&RankedList, &[&[f64]]) -> Result<ListDistribution, PlanError>;

/// Probability that each list element is the highest-ranked realized pair
/// when actions draw their next states independently. `marginals[a][s]` is
/// `P(s | a)`.
///
/// Element `i = (s_i, a_i)` wins iff `a_i` lands on `s_i` and every other
/// action `b` lands on a state not already listed for `b` above position `i`.
pub fn mu_independent(
    list: &RankedList,
    marginals: &[&[f64]],
) -> Result<ListDistribution, PlanError> {
    let na = list.num_actions;
    assert_eq!(marginals.len(), na, "one marginal per action");
    let mut covered = vec![0.0; na];
    let mut mu = Vec::with_capacity(list.len());
    for (index, &(s, a)) in list.pairs.iter().enumerate() {
        let p = marginals[a][s];
        let mut prob = p;
        for (b, &c) in covered.iter().enumerate() {
            if b == a {
                continue;
            }
            let rest = 1.0 - c;
            if rest < -1e-12 {
                return Err(PlanError::NegativeMass { index, value: rest });
            }
            prob *= rest.max(0.0);
        }
        mu.push(prob);
        covered[a] += p;
    }
    Ok(ListDistribution { mu })
}

/// Same quantity by summing over all `S^A` joint outcomes.
pub fn mu_enumerated(
    list: &RankedList,
    marginals: &[&[f64]],
) -> Result<ListDistribution, PlanError> {
    let (ns, na) = (list.num_states, list.num_actions);
    let mut mu = vec![0.0; list.len()];
    let mut outcome = vec![0usize; na];
    loop {
        let prob: f64 = outcome
            .iter()
            .enumerate()
            .map(|(a, &s)| marginals[a][s])
            .product();
        if prob > 0.0 {
            let a = list.choose(&outcome);
            mu[list.rank_of(outcome[a], a)] += prob;
        }
        // odometer increment, last action fastest
        let mut pos = na;
        loop {
            if pos == 0 {
                return Ok(ListDistribution { mu });
            }
            pos -= 1;
            outcome[pos] += 1;
            if outcome[pos] < ns {
                break;
            }
            outcome[pos] = 0;
        }
    }
}
