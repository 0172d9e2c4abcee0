//! Tabular episodic reinforcement learning with one-step reward or
//! transition lookahead: environments, exact planners, optimistic learners
//! and an experiment harness.

pub mod dist;
pub mod envfile;
pub mod envs;
pub mod episode;
pub mod harness;
pub mod learners;
pub mod mdp;
pub mod planning;
pub mod rng;
pub mod selftest;

pub use dist::{Atom, JointFiniteDistribution, Marginal};
pub use episode::{run_episode, Agent, EpisodeRecord, Observation};
pub use mdp::{InitialStates, Regime, TabularLookaheadMdp};
