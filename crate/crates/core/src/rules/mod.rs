//! Every voting rule as an online state machine with one interface: observe
//! a round, emit a winner (or nothing), update internal state. Only the
//! Method of Equal Shares is semi-online and needs the horizon up front; all
//! other rules never read it.

pub mod dictator;
pub mod mes;
pub mod phragmen;
pub mod tsd;
pub mod wam;

use crate::error::CoreError;
use crate::model::{Instance, OutcomeSequence, RoundSpec};

pub use dictator::DictatorMachine;
pub use mes::{minimal_share, MesMachine};
pub use phragmen::{best_group_fast, best_group_oracle, PhragmenMachine};
pub use tsd::{ChoiceRule, TsdMachine, TsdSpec};
pub use wam::{AffineMap, WamMachine, WamSpec};

/// Which rule to run, with its parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum RuleKind {
    /// Approval voting: the weighted approval method with constant weights.
    Av,
    /// Weighted approval method that zeroes out satisfied voters.
    GreedyJr,
    /// Weighted approval method with -1/+1 weight drift.
    WamUnitGain,
    /// Weighted approval method that resets winners and grows losers.
    WamResetGrow,
    /// A custom weighted approval method.
    Wam(WamSpec),
    /// Method of Equal Shares. `horizon`, when set, must match the instance.
    Mes { horizon: Option<usize> },
    PerpetualPhragmen,
    Tsd(TsdSpec),
    IrrelevantDictator,
}

impl RuleKind {
    pub fn mes() -> RuleKind {
        RuleKind::Mes { horizon: None }
    }

    pub fn tsd() -> RuleKind {
        RuleKind::Tsd(TsdSpec::default())
    }

    /// The cataloged weighted approval methods.
    pub fn wam_catalog() -> Vec<RuleKind> {
        vec![
            RuleKind::Av,
            RuleKind::GreedyJr,
            RuleKind::WamUnitGain,
            RuleKind::WamResetGrow,
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            RuleKind::Av => "av",
            RuleKind::GreedyJr => "greedyjr",
            RuleKind::WamUnitGain => "wam-unit-gain",
            RuleKind::WamResetGrow => "wam-reset-grow",
            RuleKind::Wam(_) => "wam",
            RuleKind::Mes { .. } => "mes",
            RuleKind::PerpetualPhragmen => "phragmen",
            RuleKind::Tsd(_) => "tsd",
            RuleKind::IrrelevantDictator => "irrelevant-dictator",
        }
    }

    /// Parses the CLI names of the parameterless rules.
    pub fn parse_name(name: &str) -> Option<RuleKind> {
        match name {
            "av" => Some(RuleKind::Av),
            "greedyjr" => Some(RuleKind::GreedyJr),
            "wam-unit-gain" => Some(RuleKind::WamUnitGain),
            "wam-reset-grow" => Some(RuleKind::WamResetGrow),
            "mes" => Some(RuleKind::mes()),
            "phragmen" => Some(RuleKind::PerpetualPhragmen),
            "tsd" => Some(RuleKind::tsd()),
            "irrelevant-dictator" => Some(RuleKind::IrrelevantDictator),
            _ => None,
        }
    }

    fn wam_spec(&self) -> Option<WamSpec> {
        match self {
            RuleKind::Av => Some(WamSpec::av()),
            RuleKind::GreedyJr => Some(WamSpec::greedy_jr()),
            RuleKind::WamUnitGain => Some(WamSpec::unit_gain()),
            RuleKind::WamResetGrow => Some(WamSpec::reset_grow()),
            RuleKind::Wam(spec) => Some(spec.clone()),
            _ => None,
        }
    }
}

/// A rule instantiated for `n` voters, ready to fold over rounds.
#[derive(Clone, Debug)]
pub enum RuleMachine {
    Wam(WamMachine),
    Mes(MesMachine),
    Phragmen(PhragmenMachine),
    Tsd(TsdMachine),
    Dictator(DictatorMachine),
}

impl RuleMachine {
    pub fn new(kind: &RuleKind, n: usize, instance_horizon: usize) -> Result<Self, CoreError> {
        if let Some(spec) = kind.wam_spec() {
            return Ok(RuleMachine::Wam(WamMachine::new(spec, n)?));
        }
        match kind {
            RuleKind::Mes { horizon } => {
                if let Some(declared) = horizon {
                    if *declared != instance_horizon {
                        return Err(CoreError::HorizonMismatch {
                            declared: *declared,
                            actual: instance_horizon,
                        });
                    }
                }
                Ok(RuleMachine::Mes(MesMachine::new(n, instance_horizon)))
            }
            RuleKind::PerpetualPhragmen => Ok(RuleMachine::Phragmen(PhragmenMachine::new(n))),
            RuleKind::Tsd(spec) => Ok(RuleMachine::Tsd(TsdMachine::new(spec, n)?)),
            RuleKind::IrrelevantDictator => Ok(RuleMachine::Dictator(DictatorMachine)),
            _ => unreachable!("weighted approval methods handled above"),
        }
    }

    /// Observes one round and returns the winner's index into the round's
    /// alternative list, or `None` for a round decided without a winner.
    pub fn step(&mut self, round: &RoundSpec) -> Option<u32> {
        match self {
            RuleMachine::Wam(m) => Some(m.step(round)),
            RuleMachine::Mes(m) => m.step(round),
            RuleMachine::Phragmen(m) => Some(m.step(round)),
            RuleMachine::Tsd(m) => Some(m.step(round)),
            RuleMachine::Dictator(m) => Some(m.step(round)),
        }
    }
}

/// Folds the rule over all rounds of the instance.
pub fn run(kind: &RuleKind, instance: &Instance) -> Result<OutcomeSequence, CoreError> {
    run_prefix(kind, instance, instance.round_count())
}

/// Folds the rule over the first `upto` rounds only. The machine is still
/// constructed against the full horizon, so a semi-online rule prices rounds
/// as it would in the complete run.
pub fn run_prefix(
    kind: &RuleKind,
    instance: &Instance,
    upto: usize,
) -> Result<OutcomeSequence, CoreError> {
    let mut machine = RuleMachine::new(kind, instance.voter_count(), instance.round_count())?;
    let mut winners = Vec::with_capacity(upto);
    for round in &instance.rounds()[..upto] {
        winners.push(machine.step(round));
    }
    Ok(OutcomeSequence::new(winners))
}
