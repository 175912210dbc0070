//! Temporal Serial Dictator: voters take turns round-robin along a fixed
//! permutation; the round's dictator gets their chosen alternative.

use crate::error::CoreError;
use crate::model::{AltSet, RoundSpec};

/// How the dictator picks from their approval set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ChoiceRule {
    /// Tie-break-first (lowest index) element.
    #[default]
    First,
    /// Highest-index element; the permutation and choice are both
    /// configurable, this is the non-default option exercised in tests.
    Last,
}

impl ChoiceRule {
    pub fn pick(&self, set: AltSet) -> u32 {
        debug_assert!(!set.is_empty());
        match self {
            ChoiceRule::First => set.first().unwrap(),
            ChoiceRule::Last => 63 - set.0.leading_zeros(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TsdSpec {
    /// 0-based dictator order; `None` means identity.
    pub permutation: Option<Vec<usize>>,
    pub choice: ChoiceRule,
}

impl TsdSpec {
    pub fn validate(&self, n: usize) -> Result<(), CoreError> {
        if let Some(perm) = &self.permutation {
            let mut seen = vec![false; n];
            if perm.len() != n {
                return Err(CoreError::Internal(format!(
                    "permutation has {} entries for {n} voters",
                    perm.len()
                )));
            }
            for &v in perm {
                if v >= n || seen[v] {
                    return Err(CoreError::Internal(format!(
                        "invalid permutation entry {v} over {n} voters"
                    )));
                }
                seen[v] = true;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct TsdMachine {
    order: Vec<usize>,
    choice: ChoiceRule,
    round: usize,
}

impl TsdMachine {
    pub fn new(spec: &TsdSpec, n: usize) -> Result<TsdMachine, CoreError> {
        spec.validate(n)?;
        Ok(TsdMachine {
            order: spec
                .permutation
                .clone()
                .unwrap_or_else(|| (0..n).collect()),
            choice: spec.choice,
            round: 0,
        })
    }

    pub fn dictator_at(&self, round: usize) -> usize {
        self.order[round % self.order.len()]
    }

    pub fn step(&mut self, round: &RoundSpec) -> u32 {
        let dictator = self.dictator_at(self.round);
        self.round += 1;
        self.choice.pick(round.approvals[dictator])
    }
}
