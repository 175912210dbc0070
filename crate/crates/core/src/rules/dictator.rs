//! A dictatorship of the first voter with a quirk on three-alternative
//! rounds: there the outcome is a fixed lookup on the dictator's approval set
//! that is deliberately sensitive to non-winning alternatives. The rule stays
//! strategyproof (the outcome is always an approved alternative and ignores
//! everyone else), yet removing a losing alternative can change the winner.

use crate::model::{RoundSpec, VoterId};

#[derive(Clone, Debug, Default)]
pub struct DictatorMachine;

impl DictatorMachine {
    /// With alternatives (a, b, c) in tie-break order and the dictator's set
    /// S: the full set {a,b,c} maps to c; every other S maps to its
    /// tie-break-first element. Rounds of any other size always take the
    /// first approved alternative.
    pub fn step(&mut self, round: &RoundSpec) -> u32 {
        let approvals = round.approval_set(VoterId(0));
        if round.alternative_count() == 3 && approvals.len() == 3 {
            2
        } else {
            approvals.first().expect("approvals are non-empty")
        }
    }
}
