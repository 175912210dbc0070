//! Online temporal approval voting toolkit: rule engines, proportionality
//! audits, strategyproofness checks, manipulation search, and the instance
//! file format behind the `tempvote` CLI.
//!
//! An instance is a fixed set of voters and a sequence of rounds; each round
//! offers an ordered list of alternatives (the order doubles as the tie-break
//! priority) and every voter approves a non-empty subset. Rules consume
//! rounds online and pick one winner per round. All rule arithmetic is exact
//! rational; nothing in a decision path touches floating point.

pub mod audit;
pub mod error;
pub mod fileio;
pub mod fixtures;
pub mod generate;
pub mod model;
pub mod pom;
pub mod rational;
pub mod rules;
pub mod strategy;

pub use error::CoreError;
pub use model::{
    AltSet, AlternativeId, CohesionRecord, Instance, OutcomeSequence, RoundSpec, VoterGroup,
    VoterId,
};
pub use rational::Rational;
pub use rules::{run, run_prefix, RuleKind, RuleMachine};
