use crate::mdp::Regime;

/// `values[h][s]` for `h` in `0..=H`, with the row at `H` fixed to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueTable {
    regime: Regime,
    horizon: usize,
    num_states: usize,
    values: Vec<f64>,
}

impl ValueTable {
    pub fn zeros(regime: Regime, horizon: usize, num_states: usize) -> Self {
        Self {
            regime,
            horizon,
            num_states,
            values: vec![0.0; (horizon + 1) * num_states],
        }
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn get(&self, h: usize, s: usize) -> f64 {
        self.values[h * self.num_states + s]
    }

    pub fn set(&mut self, h: usize, s: usize, v: f64) {
        self.values[h * self.num_states + s] = v;
    }

    pub fn row(&self, h: usize) -> &[f64] {
        &self.values[h * self.num_states..(h + 1) * self.num_states]
    }

    /// Two disjoint rows: `h` mutable and `h + 1` shared.
    pub(crate) fn split_rows(&mut self, h: usize) -> (&mut [f64], &[f64]) {
        let sn = self.num_states;
        let (head, tail) = self.values.split_at_mut((h + 1) * sn);
        (&mut head[h * sn..], &tail[..sn])
    }

    /// Value at the first step.
    pub fn initial(&self, s: usize) -> f64 {
        self.get(0, s)
    }

    pub fn max_abs_diff(&self, other: &ValueTable) -> f64 {
        assert_eq!(self.values.len(), other.values.len(), "table shapes differ");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Rows `(h, s, value)` with 1-based `h` in `1..=H + 1`.
    pub fn rows(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..=self.horizon)
            .flat_map(move |h| (0..self.num_states).map(move |s| (h + 1, s, self.get(h, s))))
    }
}
