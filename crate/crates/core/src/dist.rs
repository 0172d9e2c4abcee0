//! Finitely supported joint distributions over per-action outcome vectors.
//!
//! A draw yields one outcome per action at once: a reward vector in
//! `[0, 1]^A` or a next-state vector in `{0..S-1}^A`. Coordinates may be
//! correlated (explicit joint) or independent (product of marginals).

use std::collections::HashMap;
use std::fmt::Debug;

use thiserror::Error;

use crate::rng::RngStream;

/// Tolerance on the total mass of a distribution.
pub const MASS_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistError {
    #[error("distribution arity must be positive")]
    ZeroArity,
    #[error("distribution has no atoms")]
    Empty,
    #[error("invalid weight {0}")]
    BadWeight(f64),
    #[error("weights sum to {0}, expected 1")]
    BadMass(f64),
    #[error("outcome vector has length {got}, expected {expected}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("support size {size} exceeds cap {cap}")]
    SupportTooLarge { size: u128, cap: usize },
}

/// Values that can appear in an outcome vector.
pub trait Outcome: Copy + PartialEq + Debug + Send + Sync + 'static {
    /// Identity used to deduplicate atoms.
    fn key(self) -> u64;
}

impl Outcome for f64 {
    fn key(self) -> u64 {
        // +0.0 and -0.0 are the same outcome
        if self == 0.0 {
            0
        } else {
            self.to_bits()
        }
    }
}

impl Outcome for usize {
    fn key(self) -> u64 {
        self as u64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Atom<T> {
    pub weight: f64,
    pub outcome: Vec<T>,
}

/// One coordinate's law in a product distribution: `(value, weight)` pairs
/// with distinct values.
#[derive(Debug, Clone, PartialEq)]
pub struct Marginal<T> {
    support: Vec<(T, f64)>,
}

impl<T: Outcome> Marginal<T> {
    pub fn new(points: Vec<(T, f64)>) -> Result<Self, DistError> {
        let mut support: Vec<(T, f64)> = Vec::with_capacity(points.len());
        let mut index: HashMap<u64, usize> = HashMap::new();
        for (value, weight) in points {
            check_weight(weight)?;
            if weight == 0.0 {
                continue;
            }
            match index.get(&value.key()) {
                Some(&i) => support[i].1 += weight,
                None => {
                    index.insert(value.key(), support.len());
                    support.push((value, weight));
                }
            }
        }
        if support.is_empty() {
            return Err(DistError::Empty);
        }
        check_mass(support.iter().map(|p| p.1))?;
        Ok(Self { support })
    }

    pub fn point(value: T) -> Self {
        Self {
            support: vec![(value, 1.0)],
        }
    }

    pub fn support(&self) -> &[(T, f64)] {
        &self.support
    }

    fn sample(&self, u: f64) -> T {
        let mut acc = 0.0;
        for &(value, weight) in &self.support {
            acc += weight;
            if u < acc {
                return value;
            }
        }
        self.support[self.support.len() - 1].0
    }
}

impl Marginal<f64> {
    /// Bernoulli law on `{0, 1}`.
    pub fn bernoulli(p: f64) -> Result<Self, DistError> {
        Self::new(vec![(1.0, p), (0.0, 1.0 - p)])
    }

    pub fn mean(&self) -> f64 {
        self.support.iter().map(|&(v, w)| v * w).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum JointKind<T> {
    Joint(Vec<Atom<T>>),
    Product(Vec<Marginal<T>>),
}

/// A finitely supported distribution over vectors of length `arity`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointFiniteDistribution<T> {
    arity: usize,
    kind: JointKind<T>,
}

impl<T: Outcome> JointFiniteDistribution<T> {
    /// Explicit joint law. Atoms sharing an outcome vector are merged and
    /// zero-weight atoms dropped.
    pub fn joint(arity: usize, atoms: Vec<Atom<T>>) -> Result<Self, DistError> {
        if arity == 0 {
            return Err(DistError::ZeroArity);
        }
        let mut merged: Vec<Atom<T>> = Vec::with_capacity(atoms.len());
        let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
        for atom in atoms {
            if atom.outcome.len() != arity {
                return Err(DistError::ArityMismatch {
                    expected: arity,
                    got: atom.outcome.len(),
                });
            }
            check_weight(atom.weight)?;
            if atom.weight == 0.0 {
                continue;
            }
            let key: Vec<u64> = atom.outcome.iter().map(|v| v.key()).collect();
            match index.get(&key) {
                Some(&i) => merged[i].weight += atom.weight,
                None => {
                    index.insert(key, merged.len());
                    merged.push(atom);
                }
            }
        }
        if merged.is_empty() {
            return Err(DistError::Empty);
        }
        check_mass(merged.iter().map(|a| a.weight))?;
        Ok(Self {
            arity,
            kind: JointKind::Joint(merged),
        })
    }

    /// Independent coordinates.
    pub fn product(marginals: Vec<Marginal<T>>) -> Result<Self, DistError> {
        if marginals.is_empty() {
            return Err(DistError::ZeroArity);
        }
        Ok(Self {
            arity: marginals.len(),
            kind: JointKind::Product(marginals),
        })
    }

    /// Point mass on one outcome vector.
    pub fn point(outcome: Vec<T>) -> Result<Self, DistError> {
        Self::joint(
            outcome.len(),
            vec![Atom {
                weight: 1.0,
                outcome,
            }],
        )
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn kind(&self) -> &JointKind<T> {
        &self.kind
    }

    pub fn is_product(&self) -> bool {
        matches!(self.kind, JointKind::Product(_))
    }

    /// Coordinates are independent: a product law or a single atom.
    pub fn is_independent(&self) -> bool {
        match &self.kind {
            JointKind::Product(_) => true,
            JointKind::Joint(atoms) => atoms.len() == 1,
        }
    }

    /// Number of atoms after Cartesian expansion (saturating).
    pub fn support_size(&self) -> u128 {
        match &self.kind {
            JointKind::Joint(atoms) => atoms.len() as u128,
            JointKind::Product(ms) => ms
                .iter()
                .fold(1u128, |acc, m| acc.saturating_mul(m.support.len() as u128)),
        }
    }

    /// All atoms, expanding a product law by Cartesian product. The last
    /// coordinate varies fastest.
    pub fn atoms(&self, cap: usize) -> Result<Vec<Atom<T>>, DistError> {
        let size = self.support_size();
        if size > cap as u128 {
            return Err(DistError::SupportTooLarge { size, cap });
        }
        match &self.kind {
            JointKind::Joint(atoms) => Ok(atoms.clone()),
            JointKind::Product(ms) => {
                let mut out = vec![Atom {
                    weight: 1.0,
                    outcome: Vec::with_capacity(self.arity),
                }];
                for m in ms {
                    let mut next = Vec::with_capacity(out.len() * m.support.len());
                    for atom in &out {
                        for &(value, weight) in &m.support {
                            let mut outcome = atom.outcome.clone();
                            outcome.push(value);
                            next.push(Atom {
                                weight: atom.weight * weight,
                                outcome,
                            });
                        }
                    }
                    out = next;
                }
                Ok(out)
            }
        }
    }

    /// Law of coordinate `a`, as `(value, weight)` pairs with distinct values.
    pub fn marginal(&self, a: usize) -> Vec<(T, f64)> {
        match &self.kind {
            JointKind::Product(ms) => ms[a].support.clone(),
            JointKind::Joint(atoms) => {
                let mut out: Vec<(T, f64)> = Vec::new();
                let mut index: HashMap<u64, usize> = HashMap::new();
                for atom in atoms {
                    let v = atom.outcome[a];
                    match index.get(&v.key()) {
                        Some(&i) => out[i].1 += atom.weight,
                        None => {
                            index.insert(v.key(), out.len());
                            out.push((v, atom.weight));
                        }
                    }
                }
                out
            }
        }
    }

    /// Draw one outcome vector.
    pub fn sample(&self, rng: &mut RngStream) -> Vec<T> {
        let mut out = Vec::with_capacity(self.arity);
        self.sample_into(rng, &mut out);
        out
    }

    pub fn sample_into(&self, rng: &mut RngStream, out: &mut Vec<T>) {
        out.clear();
        match &self.kind {
            JointKind::Product(ms) => {
                for m in ms {
                    out.push(m.sample(rng.uniform()));
                }
            }
            JointKind::Joint(atoms) => {
                let u = rng.uniform();
                let mut acc = 0.0;
                let mut chosen = &atoms[atoms.len() - 1];
                for atom in atoms {
                    acc += atom.weight;
                    if u < acc {
                        chosen = atom;
                        break;
                    }
                }
                out.extend_from_slice(&chosen.outcome);
            }
        }
    }

    /// Every value that occurs in any coordinate.
    pub fn values(&self) -> Vec<T> {
        match &self.kind {
            JointKind::Product(ms) => ms
                .iter()
                .flat_map(|m| m.support.iter().map(|p| p.0))
                .collect(),
            JointKind::Joint(atoms) => atoms.iter().flat_map(|a| a.outcome.clone()).collect(),
        }
    }

    /// Largest deviation of any mass total from 1.
    pub fn mass_error(&self) -> f64 {
        match &self.kind {
            JointKind::Joint(atoms) => (atoms.iter().map(|a| a.weight).sum::<f64>() - 1.0).abs(),
            JointKind::Product(ms) => ms
                .iter()
                .map(|m| (m.support.iter().map(|p| p.1).sum::<f64>() - 1.0).abs())
                .fold(0.0, f64::max),
        }
    }
}

/// Draw one outcome vector from `d`.
pub fn sample_joint<T: Outcome>(d: &JointFiniteDistribution<T>, rng: &mut RngStream) -> Vec<T> {
    d.sample(rng)
}

fn check_weight(w: f64) -> Result<(), DistError> {
    if !w.is_finite() || w < 0.0 {
        return Err(DistError::BadWeight(w));
    }
    Ok(())
}

fn check_mass(weights: impl Iterator<Item = f64>) -> Result<(), DistError> {
    let total: f64 = weights.sum();
    if (total - 1.0).abs() > MASS_TOL {
        return Err(DistError::BadMass(total));
    }
    Ok(())
}
