//! Perpetual Phragmén: each round distributes one unit of load. Among all
//! groups that share an approved alternative this round, the rule picks the
//! one minimizing the average potential load `(1 + sum of loads) / |S|`,
//! elects the tie-break-first alternative from the group's intersection, and
//! sets every member's load to that average.
//!
//! Two solvers compute the winning group: an exhaustive oracle over all
//! cohesive groups, and a fast scan over load-sorted approver prefixes per
//! alternative. They agree exactly, including tie-breaks.

use std::cmp::Ordering;

use crate::error::CoreError;
use crate::model::{for_each_group_lex, AltSet, RoundSpec, VoterGroup};
use crate::rational::{rat_int, Rational};

fn group_intersection(round: &RoundSpec, group: VoterGroup) -> AltSet {
    group
        .members()
        .iter()
        .fold(round.full_set(), |acc, v| {
            acc.intersection(round.approvals[v.0])
        })
}

fn average_potential_load(loads: &[Rational], group: VoterGroup) -> Rational {
    let total: Rational = group.members().iter().map(|v| loads[v.0].clone()).sum();
    (rat_int(1) + total) / rat_int(group.len() as i64)
}

/// Enumerates every group with a non-empty approval intersection and returns
/// the lexicographically first one attaining the minimal average potential
/// load, together with that load.
pub fn best_group_oracle(
    loads: &[Rational],
    round: &RoundSpec,
    cap: usize,
) -> Result<(VoterGroup, Rational), CoreError> {
    let n = loads.len();
    if n > cap {
        return Err(CoreError::GroupCapExceeded { n, cap });
    }
    let mut best: Option<(VoterGroup, Rational)> = None;
    for_each_group_lex(n, |group| {
        if group_intersection(round, group).is_empty() {
            return;
        }
        let load = average_potential_load(loads, group);
        match &best {
            Some((_, incumbent)) if *incumbent <= load => {}
            _ => best = Some((group, load)),
        }
    });
    best.ok_or_else(|| {
        CoreError::Internal("no cohesive group: approvals must be non-empty".into())
    })
}

/// Same (group, load) as the oracle, via per-alternative prefix scans.
///
/// For a fixed alternative, the minimal average over approver subsets is
/// always attained by a prefix of the approvers sorted by (load, index); any
/// equal-value group is lexicographically no earlier than the best such
/// prefix, so scanning prefixes preserves the oracle's tie-breaking.
pub fn best_group_fast(loads: &[Rational], round: &RoundSpec) -> (VoterGroup, Rational) {
    let mut best: Option<(VoterGroup, Rational)> = None;
    for alt in 0..round.alternative_count() as u32 {
        let mut approvers = round.approvers(alt);
        if approvers.is_empty() {
            continue;
        }
        approvers.sort_by(|a, b| loads[a.0].cmp(&loads[b.0]).then(a.0.cmp(&b.0)));

        let mut sum = rat_int(0);
        let mut mask = 0u64;
        let mut alt_best: Option<(VoterGroup, Rational)> = None;
        for (size, voter) in approvers.iter().enumerate() {
            sum += &loads[voter.0];
            mask |= 1 << voter.0;
            let value = (rat_int(1) + &sum) / rat_int(size as i64 + 1);
            let group = VoterGroup(mask);
            let replace = match &alt_best {
                None => true,
                Some((incumbent_group, incumbent)) => match value.cmp(incumbent) {
                    Ordering::Less => true,
                    Ordering::Equal => group.cmp_lex(incumbent_group) == Ordering::Less,
                    Ordering::Greater => false,
                },
            };
            if replace {
                alt_best = Some((group, value));
            }
        }

        let (group, value) = alt_best.expect("alternative has approvers");
        let replace = match &best {
            None => true,
            Some((incumbent_group, incumbent)) => match value.cmp(incumbent) {
                Ordering::Less => true,
                Ordering::Equal => group.cmp_lex(incumbent_group) == Ordering::Less,
                Ordering::Greater => false,
            },
        };
        if replace {
            best = Some((group, value));
        }
    }
    best.expect("complete approvals guarantee a cohesive group")
}

#[derive(Clone, Debug)]
pub struct PhragmenMachine {
    loads: Vec<Rational>,
}

impl PhragmenMachine {
    pub fn new(n: usize) -> PhragmenMachine {
        PhragmenMachine {
            loads: vec![rat_int(0); n],
        }
    }

    pub fn loads(&self) -> &[Rational] {
        &self.loads
    }

    /// Elects from the minimal-load group and sets each member's load to the
    /// group's average potential load. Non-members are untouched.
    pub fn step(&mut self, round: &RoundSpec) -> u32 {
        let (group, load) = best_group_fast(&self.loads, round);
        let winner = group_intersection(round, group)
            .first()
            .expect("winning group has a non-empty intersection");
        for voter in group.members() {
            self.loads[voter.0] = load.clone();
        }
        winner
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AlternativeId, VoterId};
    use crate::rational::rat;

    fn round(alts: &[&str], approvals: &[&[&str]]) -> RoundSpec {
        let alternatives: Vec<AlternativeId> =
            alts.iter().map(|a| AlternativeId::new(*a)).collect();
        let approvals = approvals
            .iter()
            .map(|labels| {
                labels.iter().fold(AltSet::EMPTY, |acc, label| {
                    let idx = alternatives
                        .iter()
                        .position(|a| a.as_str() == *label)
                        .unwrap();
                    acc.insert(idx as u32)
                })
            })
            .collect();
        RoundSpec {
            alternatives,
            approvals,
        }
    }

    #[test]
    fn unanimous_round_elects_the_full_group() {
        let loads = vec![rat_int(0), rat_int(0), rat_int(0)];
        let r = round(&["a", "b", "c"], &[&["a"], &["a"], &["a"]]);
        let (group, load) = best_group_oracle(&loads, &r, 16).unwrap();
        assert_eq!(group, VoterGroup(0b111));
        assert_eq!(load, rat(1, 3));
        assert_eq!(best_group_fast(&loads, &r), (group, load));
    }

    #[test]
    fn free_rider_splits_the_load_between_two() {
        let loads = vec![rat_int(0), rat_int(0), rat_int(0)];
        let r = round(&["a", "b", "c"], &[&["a"], &["a"], &["b"]]);
        let (group, load) = best_group_oracle(&loads, &r, 16).unwrap();
        assert_eq!(group, VoterGroup(0b011));
        assert_eq!(load, rat(1, 2));
        assert_eq!(best_group_fast(&loads, &r), (group, load));
    }

    #[test]
    fn single_voter_carries_one_plus_load() {
        let loads = vec![rat(1, 3)];
        let r = round(&["z"], &[&["z"]]);
        let (group, load) = best_group_oracle(&loads, &r, 16).unwrap();
        assert_eq!(group, VoterGroup(0b1));
        assert_eq!(load, rat(4, 3));
    }

    #[test]
    fn oracle_respects_group_cap() {
        let loads = vec![rat_int(0); 17];
        let r = RoundSpec {
            alternatives: vec![AlternativeId::new("a")],
            approvals: vec![AltSet(1); 17],
        };
        assert!(matches!(
            best_group_oracle(&loads, &r, 16),
            Err(CoreError::GroupCapExceeded { n: 17, cap: 16 })
        ));
        // The fast path has no cap.
        let (group, _) = best_group_fast(&loads, &r);
        assert_eq!(group.len(), 17);
    }

    #[test]
    fn paper_example_truthful_then_tie_break() {
        let mut m = PhragmenMachine::new(3);
        let r1 = round(&["a", "b", "c"], &[&["a"], &["a"], &["a"]]);
        let w1 = m.step(&r1);
        assert_eq!(r1.label(w1).as_str(), "a");
        assert_eq!(m.loads(), &[rat(1, 3), rat(1, 3), rat(1, 3)]);

        // Disjoint singletons: three-way tie at 4/3 resolved by voter index.
        let r2 = round(&["a", "b", "c"], &[&["a"], &["b"], &["c"]]);
        let (group, load) = best_group_fast(m.loads(), &r2);
        assert_eq!(group, VoterGroup::singleton(VoterId(0)));
        assert_eq!(load, rat(4, 3));
        let w2 = m.step(&r2);
        assert_eq!(r2.label(w2).as_str(), "a");
        assert_eq!(m.loads(), &[rat(4, 3), rat(1, 3), rat(1, 3)]);
    }

    #[test]
    fn paper_example_manipulated_round() {
        let mut m = PhragmenMachine::new(3);
        let r1 = round(&["a", "b", "c"], &[&["a"], &["a"], &["b"]]);
        let (group, load) = best_group_oracle(m.loads(), &r1, 16).unwrap();
        assert_eq!(group, VoterGroup(0b011));
        assert_eq!(load, rat(1, 2));
        let w1 = m.step(&r1);
        assert_eq!(r1.label(w1).as_str(), "a");
        assert_eq!(m.loads(), &[rat(1, 2), rat(1, 2), rat_int(0)]);

        let r2 = round(&["a", "b", "c"], &[&["a"], &["b"], &["c"]]);
        let w2 = m.step(&r2);
        assert_eq!(r2.label(w2).as_str(), "c");
        assert_eq!(m.loads(), &[rat(1, 2), rat(1, 2), rat_int(1)]);
    }

    #[test]
    fn prefix_scan_handles_load_ties_lexicographically() {
        // Approvers v1 (load 1), v2 (load 0), v3 (load 1): the minimum value
        // 1 is reached by {v2}, {v1,v2}, {v2,v3}, and {v1,v2,v3}; the
        // lexicographically first is {v1,v2}.
        let loads = vec![rat_int(1), rat_int(0), rat_int(1)];
        let r = round(&["z"], &[&["z"], &["z"], &["z"]]);
        let (group, value) = best_group_fast(&loads, &r);
        assert_eq!(value, rat_int(1));
        assert_eq!(group, VoterGroup(0b011));
        assert_eq!(best_group_oracle(&loads, &r, 16).unwrap(), (group, value));
    }
}
