//! Brute-force verification of justified-representation axioms against an
//! outcome sequence. Every non-empty voter group is enumerated; a group of
//! size `g` that agrees on some alternative in `l` rounds is owed
//! `min(1, floor(l*g/n))` satisfaction under JR and `floor(l*g/n)` under PJR
//! (as a group) and EJR (by some single member). Weak forms only constrain
//! groups cohesive in every round.
//!
//! Audits evaluate each group at its maximal cohesion level only: the bound
//! is non-decreasing in the level, so passing there implies passing at every
//! smaller level.

use std::fmt;

use crate::error::CoreError;
use crate::model::{for_each_group_lex, Instance, OutcomeSequence, VoterGroup, VoterId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Axiom {
    Jr,
    Pjr,
    Ejr,
    WJr,
    WPjr,
    WEjr,
}

pub const ALL_AXIOMS: [Axiom; 6] = [
    Axiom::Jr,
    Axiom::Pjr,
    Axiom::Ejr,
    Axiom::WJr,
    Axiom::WPjr,
    Axiom::WEjr,
];

impl Axiom {
    pub fn name(&self) -> &'static str {
        match self {
            Axiom::Jr => "jr",
            Axiom::Pjr => "pjr",
            Axiom::Ejr => "ejr",
            Axiom::WJr => "wjr",
            Axiom::WPjr => "wpjr",
            Axiom::WEjr => "wejr",
        }
    }

    pub fn parse_name(name: &str) -> Option<Axiom> {
        ALL_AXIOMS.into_iter().find(|a| a.name() == name)
    }

    /// Weak forms constrain only groups cohesive in all rounds.
    pub fn is_weak(&self) -> bool {
        matches!(self, Axiom::WJr | Axiom::WPjr | Axiom::WEjr)
    }

    /// EJR variants bound a single member's satisfaction, the others bound
    /// the group's.
    pub fn is_extended(&self) -> bool {
        matches!(self, Axiom::Ejr | Axiom::WEjr)
    }

    fn is_jr_like(&self) -> bool {
        matches!(self, Axiom::Jr | Axiom::WJr)
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// The satisfaction owed to a group of `group_size` voters, cohesive in
/// `level` rounds, out of `n` voters total. Exact integer arithmetic.
pub fn bound(axiom: Axiom, group_size: usize, level: usize, n: usize) -> usize {
    debug_assert!(group_size >= 1 && group_size <= n);
    let proportional = level * group_size / n;
    if axiom.is_jr_like() {
        proportional.min(1)
    } else {
        proportional
    }
}

/// One audited group with a positive bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditRow {
    pub group: VoterGroup,
    pub level: usize,
    pub bound: usize,
    pub achieved: usize,
    /// For EJR variants: the lowest-index member attaining `achieved`.
    pub witness: Option<VoterId>,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct AuditReport {
    pub axiom: Axiom,
    /// Rows for every group with a positive bound, in lexicographic group
    /// order. Groups with bound zero pass vacuously and are not listed.
    pub rows: Vec<AuditRow>,
    pub groups_checked: usize,
    pub pass: bool,
}

impl AuditReport {
    pub fn row_for(&self, group: VoterGroup) -> Option<&AuditRow> {
        self.rows.iter().find(|r| r.group == group)
    }
}

/// Audits one axiom over every non-empty group.
pub fn audit(
    axiom: Axiom,
    instance: &Instance,
    outcomes: &OutcomeSequence,
    cap: usize,
) -> Result<AuditReport, CoreError> {
    let n = instance.voter_count();
    if n > cap {
        return Err(CoreError::GroupCapExceeded { n, cap });
    }
    let horizon = instance.round_count();
    let mut rows = Vec::new();
    let mut groups_checked = 0usize;
    let mut failure: Option<CoreError> = None;

    for_each_group_lex(n, |group| {
        if failure.is_some() {
            return;
        }
        groups_checked += 1;
        let audit_one = || -> Result<Option<AuditRow>, CoreError> {
            let record = instance.cohesion_level(group)?;
            if axiom.is_weak() && record.level < horizon {
                return Ok(None);
            }
            let owed = bound(axiom, group.len(), record.level, n);
            if owed == 0 {
                return Ok(None);
            }
            let (achieved, witness) = if axiom.is_extended() {
                let mut best: Option<(usize, VoterId)> = None;
                for voter in group.members() {
                    let sat = instance.voter_satisfaction(voter, outcomes)?;
                    if best.as_ref().is_none_or(|(top, _)| sat > *top) {
                        best = Some((sat, voter));
                    }
                }
                let (sat, voter) = best.expect("group is non-empty");
                (sat, Some(voter))
            } else {
                (instance.satisfaction(group, outcomes)?, None)
            };
            Ok(Some(AuditRow {
                group,
                level: record.level,
                bound: owed,
                achieved,
                witness,
                pass: achieved >= owed,
            }))
        };
        match audit_one() {
            Ok(Some(row)) => rows.push(row),
            Ok(None) => {}
            Err(e) => failure = Some(e),
        }
    });

    if let Some(e) = failure {
        return Err(e);
    }
    let pass = rows.iter().all(|r| r.pass);
    Ok(AuditReport {
        axiom,
        rows,
        groups_checked,
        pass,
    })
}

/// Pass flags for all six axioms on one outcome sequence, in the order of
/// [`ALL_AXIOMS`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImplicationMatrix {
    pub flags: [(Axiom, bool); 6],
}

impl ImplicationMatrix {
    pub fn passed(&self, axiom: Axiom) -> bool {
        self.flags
            .iter()
            .find(|(a, _)| *a == axiom)
            .map(|(_, pass)| *pass)
            .expect("all axioms present")
    }
}

/// Audits all six axioms and confirms the implication lattice on the
/// observed flags: EJR => PJR => JR, the same chain among the weak forms,
/// and every strong form implying its weak form. A violation cannot arise
/// from any outcome sequence, so it is reported as an internal error.
pub fn implication_matrix(
    instance: &Instance,
    outcomes: &OutcomeSequence,
    cap: usize,
) -> Result<ImplicationMatrix, CoreError> {
    let mut flags = Vec::with_capacity(6);
    for axiom in ALL_AXIOMS {
        flags.push((axiom, audit(axiom, instance, outcomes, cap)?.pass));
    }
    let matrix = ImplicationMatrix {
        flags: flags.try_into().expect("six axioms"),
    };
    let edges = [
        (Axiom::Ejr, Axiom::Pjr),
        (Axiom::Pjr, Axiom::Jr),
        (Axiom::WEjr, Axiom::WPjr),
        (Axiom::WPjr, Axiom::WJr),
        (Axiom::Jr, Axiom::WJr),
        (Axiom::Pjr, Axiom::WPjr),
        (Axiom::Ejr, Axiom::WEjr),
    ];
    for (stronger, weaker) in edges {
        if matrix.passed(stronger) && !matrix.passed(weaker) {
            return Err(CoreError::Internal(format!(
                "audit lattice violated: {stronger} passed but {weaker} failed"
            )));
        }
    }
    Ok(matrix)
}
