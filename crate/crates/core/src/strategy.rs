//! Empirical game-theoretic checkers. Each check enumerates a complete
//! deviation space for one instance and either holds on that instance or
//! returns a replayable witness.
//!
//! Deviations always declare a non-empty approval subset per round, matching
//! the model's complete-approvals assumption. Manipulated satisfaction is
//! always measured against the voter's truthful approvals.

use crate::error::CoreError;
use crate::model::{AltSet, Instance, OutcomeSequence, VoterId};
use crate::rules::{run_prefix, RuleKind};

/// Enumeration budgets. Exceeding one is an error, never silent sampling.
#[derive(Clone, Copy, Debug)]
pub struct SearchCaps {
    /// Largest voter count for exhaustive group enumeration.
    pub groups: usize,
    /// Largest full-horizon deviation space per voter.
    pub strategies: u64,
}

impl Default for SearchCaps {
    fn default() -> Self {
        SearchCaps {
            groups: crate::model::DEFAULT_GROUP_CAP,
            strategies: 1_000_000,
        }
    }
}

/// A rule as the checkers see it: something that can evaluate any prefix of
/// any instance. Implemented by [`RuleKind`]; tests add deliberately broken
/// rules to prove the checkers catch violations.
pub trait RuleEval {
    fn eval_prefix(&self, instance: &Instance, upto: usize) -> Result<OutcomeSequence, CoreError>;

    fn eval(&self, instance: &Instance) -> Result<OutcomeSequence, CoreError> {
        self.eval_prefix(instance, instance.round_count())
    }
}

impl RuleEval for RuleKind {
    fn eval_prefix(&self, instance: &Instance, upto: usize) -> Result<OutcomeSequence, CoreError> {
        run_prefix(self, instance, upto)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Property {
    Monotonicity,
    Oiia,
    OiiaAddition,
    Osp,
    Sp,
}

impl Property {
    pub fn name(&self) -> &'static str {
        match self {
            Property::Monotonicity => "monotonicity",
            Property::Oiia => "oiia",
            Property::OiiaAddition => "oiia-addition",
            Property::Osp => "osp",
            Property::Sp => "sp",
        }
    }

    pub fn parse_name(name: &str) -> Option<Property> {
        [
            Property::Monotonicity,
            Property::Oiia,
            Property::OiiaAddition,
            Property::Osp,
            Property::Sp,
        ]
        .into_iter()
        .find(|p| p.name() == name)
    }
}

/// Witness for the single-edit checks: one voter changed one alternative in
/// one round and the round's winner moved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EditWitness {
    pub round: usize,
    pub voter: VoterId,
    /// The alternative added or removed, as an index into the round's list.
    pub alternative: u32,
    pub original_winner: Option<u32>,
    pub new_winner: Option<u32>,
}

/// Witness for the strategy searches: a full deviation tuple and the
/// satisfaction it buys, measured against truthful approvals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManipulationFinding {
    pub voter: VoterId,
    /// Declared approvals per round; covers rounds `0..=round` for an online
    /// finding and the whole horizon otherwise.
    pub deviation: Vec<AltSet>,
    /// `Some(t)`: satisfaction gained in round `t` alone (an online
    /// violation); `None`: gained across the horizon.
    pub round: Option<usize>,
    pub truthful_sat: usize,
    pub manipulated_sat: usize,
    pub truthful_outcomes: OutcomeSequence,
    pub manipulated_outcomes: OutcomeSequence,
}

#[derive(Clone, Debug)]
pub enum PropertyVerdict {
    /// The property holds on this instance; `candidates` deviations were
    /// enumerated (the searches are exhaustive, never sampled).
    Holds { property: Property, candidates: u64 },
    ViolatedEdit {
        property: Property,
        witness: EditWitness,
    },
    ViolatedStrategy {
        property: Property,
        witness: Box<ManipulationFinding>,
    },
}

impl PropertyVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, PropertyVerdict::Holds { .. })
    }

    pub fn property(&self) -> Property {
        match self {
            PropertyVerdict::Holds { property, .. }
            | PropertyVerdict::ViolatedEdit { property, .. }
            | PropertyVerdict::ViolatedStrategy { property, .. } => *property,
        }
    }
}

/// Adding the current winner to any voter's ballot must not move that
/// round's winner.
pub fn check_monotonicity<R: RuleEval>(
    rule: &R,
    instance: &Instance,
) -> Result<PropertyVerdict, CoreError> {
    let truthful = rule.eval(instance)?;
    let mut candidates = 0u64;
    for t in 0..instance.round_count() {
        let Some(winner) = truthful.winner(t) else {
            continue;
        };
        for voter in instance.voters() {
            let ballot = instance.round(t)?.approval_set(voter);
            if ballot.contains(winner) {
                continue; // adding it changes nothing
            }
            candidates += 1;
            let edited = instance.with_approvals(t, voter, ballot.insert(winner));
            let outcome = rule.eval_prefix(&edited, t + 1)?;
            if outcome.winner(t) != Some(winner) {
                return Ok(PropertyVerdict::ViolatedEdit {
                    property: Property::Monotonicity,
                    witness: EditWitness {
                        round: t,
                        voter,
                        alternative: winner,
                        original_winner: Some(winner),
                        new_winner: outcome.winner(t),
                    },
                });
            }
        }
    }
    Ok(PropertyVerdict::Holds {
        property: Property::Monotonicity,
        candidates,
    })
}

/// Removing a non-winning alternative from any ballot must not move that
/// round's winner. Removals that would empty a ballot are outside the model
/// and skipped.
pub fn check_oiia<R: RuleEval>(
    rule: &R,
    instance: &Instance,
) -> Result<PropertyVerdict, CoreError> {
    let truthful = rule.eval(instance)?;
    let mut candidates = 0u64;
    for t in 0..instance.round_count() {
        let winner = truthful.winner(t);
        for voter in instance.voters() {
            let ballot = instance.round(t)?.approval_set(voter);
            if ballot.len() == 1 {
                continue;
            }
            for removed in ballot.iter().collect::<Vec<_>>() {
                if Some(removed) == winner {
                    continue;
                }
                candidates += 1;
                let edited = instance.with_approvals(t, voter, ballot.remove(removed));
                let outcome = rule.eval_prefix(&edited, t + 1)?;
                if outcome.winner(t) != winner {
                    return Ok(PropertyVerdict::ViolatedEdit {
                        property: Property::Oiia,
                        witness: EditWitness {
                            round: t,
                            voter,
                            alternative: removed,
                            original_winner: winner,
                            new_winner: outcome.winner(t),
                        },
                    });
                }
            }
        }
    }
    Ok(PropertyVerdict::Holds {
        property: Property::Oiia,
        candidates,
    })
}

/// Adding any alternative to any ballot may only move that round's winner to
/// the added alternative.
pub fn check_oiia_addition<R: RuleEval>(
    rule: &R,
    instance: &Instance,
) -> Result<PropertyVerdict, CoreError> {
    let truthful = rule.eval(instance)?;
    let mut candidates = 0u64;
    for t in 0..instance.round_count() {
        let winner = truthful.winner(t);
        for voter in instance.voters() {
            let round = instance.round(t)?;
            let ballot = round.approval_set(voter);
            for added in 0..round.alternative_count() as u32 {
                if ballot.contains(added) {
                    continue;
                }
                candidates += 1;
                let edited = instance.with_approvals(t, voter, ballot.insert(added));
                let outcome = rule.eval_prefix(&edited, t + 1)?;
                let moved = outcome.winner(t);
                if moved != winner && moved != Some(added) {
                    return Ok(PropertyVerdict::ViolatedEdit {
                        property: Property::OiiaAddition,
                        witness: EditWitness {
                            round: t,
                            voter,
                            alternative: added,
                            original_winner: winner,
                            new_winner: moved,
                        },
                    });
                }
            }
        }
    }
    Ok(PropertyVerdict::Holds {
        property: Property::OiiaAddition,
        candidates,
    })
}

/// The number of full-horizon approval tuples available to one voter.
pub fn strategy_space_size(instance: &Instance, upto: usize) -> u128 {
    instance.rounds()[..upto]
        .iter()
        .map(|r| (1u128 << r.alternative_count()) - 1)
        .product()
}

fn ensure_strategy_cap(instance: &Instance, caps: &SearchCaps) -> Result<(), CoreError> {
    let size = strategy_space_size(instance, instance.round_count());
    if size > caps.strategies as u128 {
        return Err(CoreError::StrategyCapExceeded {
            size,
            cap: caps.strategies,
        });
    }
    Ok(())
}

/// Iterates every tuple of non-empty per-round approval subsets, in odometer
/// order: round 0 is the most significant digit and subsets are ordered by
/// their bitmask value over the round's alternative indices.
pub struct ApprovalTuples {
    limits: Vec<u64>,
    current: Vec<u64>,
    exhausted: bool,
}

impl ApprovalTuples {
    pub fn new(instance: &Instance, upto: usize) -> ApprovalTuples {
        let limits: Vec<u64> = instance.rounds()[..upto]
            .iter()
            .map(|r| r.full_set().0)
            .collect();
        ApprovalTuples {
            current: vec![1; limits.len()],
            exhausted: limits.is_empty(),
            limits,
        }
    }
}

impl Iterator for ApprovalTuples {
    type Item = Vec<AltSet>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.exhausted {
            return None;
        }
        let item: Vec<AltSet> = self.current.iter().map(|&m| AltSet(m)).collect();
        // Odometer increment, last round fastest.
        let mut pos = self.current.len();
        loop {
            if pos == 0 {
                self.exhausted = true;
                break;
            }
            pos -= 1;
            if self.current[pos] < self.limits[pos] {
                self.current[pos] += 1;
                for later in pos + 1..self.current.len() {
                    self.current[later] = 1;
                }
                break;
            }
        }
        Some(item)
    }
}

/// Runs the instance with one voter's approvals replaced over the whole
/// horizon and reports both satisfactions (always measured against the
/// truthful approvals) and both outcome sequences.
pub fn replay_deviation<R: RuleEval>(
    rule: &R,
    instance: &Instance,
    voter: VoterId,
    deviation: &[AltSet],
) -> Result<ManipulationFinding, CoreError> {
    let truthful_outcomes = rule.eval(instance)?;
    let deviated = instance.with_voter_approvals(voter, deviation);
    let manipulated_outcomes = rule.eval(&deviated)?;
    Ok(ManipulationFinding {
        voter,
        deviation: deviation.to_vec(),
        round: None,
        truthful_sat: instance.voter_satisfaction(voter, &truthful_outcomes)?,
        manipulated_sat: instance.voter_satisfaction(voter, &manipulated_outcomes)?,
        truthful_outcomes,
        manipulated_outcomes,
    })
}

/// Online strategyproofness: fixing all previous rounds at their truthful
/// declarations, no voter can mis-declare the current round so as to win it
/// when truthful play loses it. Rounds a voter already wins are skipped:
/// per-round satisfaction is 0 or 1, so no deviation can improve them.
pub fn check_osp<R: RuleEval>(
    rule: &R,
    instance: &Instance,
    caps: &SearchCaps,
) -> Result<PropertyVerdict, CoreError> {
    ensure_strategy_cap(instance, caps)?;
    let truthful = rule.eval(instance)?;
    let mut candidates = 0u64;
    for voter in instance.voters() {
        for t in 0..instance.round_count() {
            let ballot = instance.round(t)?.approval_set(voter);
            let satisfied = matches!(truthful.winner(t), Some(w) if ballot.contains(w));
            if satisfied {
                continue;
            }
            for mask in 1..=instance.round(t)?.full_set().0 {
                let declared = AltSet(mask);
                if declared == ballot {
                    continue;
                }
                candidates += 1;
                let deviated = instance.with_approvals(t, voter, declared);
                let outcome = rule.eval_prefix(&deviated, t + 1)?;
                let gained = matches!(outcome.winner(t), Some(w) if ballot.contains(w));
                if gained {
                    let mut deviation: Vec<AltSet> = (0..=t)
                        .map(|tau| instance.rounds()[tau].approval_set(voter))
                        .collect();
                    deviation[t] = declared;
                    return Ok(PropertyVerdict::ViolatedStrategy {
                        property: Property::Osp,
                        witness: Box::new(ManipulationFinding {
                            voter,
                            deviation,
                            round: Some(t),
                            truthful_sat: 0,
                            manipulated_sat: 1,
                            truthful_outcomes: truthful.truncated(t + 1),
                            manipulated_outcomes: outcome,
                        }),
                    });
                }
            }
        }
    }
    Ok(PropertyVerdict::Holds {
        property: Property::Osp,
        candidates,
    })
}

/// Full strategyproofness: exhaustive best-response search over every
/// full-horizon deviation of every voter (or one voter, when `voter`
/// restricts the search). Findings come in canonical order: voter index
/// first, then tuple enumeration order.
pub fn find_sp_violation<R: RuleEval>(
    rule: &R,
    instance: &Instance,
    voter: Option<VoterId>,
    caps: &SearchCaps,
) -> Result<PropertyVerdict, CoreError> {
    ensure_strategy_cap(instance, caps)?;
    let truthful = rule.eval(instance)?;
    let horizon = instance.round_count();
    let mut candidates = 0u64;
    for searched in instance.voters() {
        if voter.is_some_and(|v| v != searched) {
            continue;
        }
        let truthful_sat = instance.voter_satisfaction(searched, &truthful)?;
        let truthful_tuple: Vec<AltSet> = (0..horizon)
            .map(|t| instance.rounds()[t].approval_set(searched))
            .collect();
        for tuple in ApprovalTuples::new(instance, horizon) {
            if tuple == truthful_tuple {
                continue;
            }
            candidates += 1;
            let deviated = instance.with_voter_approvals(searched, &tuple);
            let outcome = rule.eval(&deviated)?;
            let manipulated_sat = instance.voter_satisfaction(searched, &outcome)?;
            if manipulated_sat > truthful_sat {
                return Ok(PropertyVerdict::ViolatedStrategy {
                    property: Property::Sp,
                    witness: Box::new(ManipulationFinding {
                        voter: searched,
                        deviation: tuple,
                        round: None,
                        truthful_sat,
                        manipulated_sat,
                        truthful_outcomes: truthful,
                        manipulated_outcomes: outcome,
                    }),
                });
            }
        }
    }
    Ok(PropertyVerdict::Holds {
        property: Property::Sp,
        candidates,
    })
}

/// Outcome of running the property checks over a batch of instances and
/// cross-checking the implications that must hold between them: OIIA forces
/// OSP, and OSP forces monotonicity.
#[derive(Clone, Debug, Default)]
pub struct ImplicationSummary {
    pub instances_checked: usize,
    pub oiia_holds: usize,
    pub osp_holds: usize,
    pub monotone_holds: usize,
    /// Indices of instances where OIIA held but OSP was violated.
    pub oiia_without_osp: Vec<usize>,
    /// Indices of instances where OSP held but monotonicity was violated.
    pub osp_without_monotonicity: Vec<usize>,
}

impl ImplicationSummary {
    pub fn consistent(&self) -> bool {
        self.oiia_without_osp.is_empty() && self.osp_without_monotonicity.is_empty()
    }
}

pub fn verify_implications<R: RuleEval>(
    rule: &R,
    instances: &[Instance],
    caps: &SearchCaps,
) -> Result<ImplicationSummary, CoreError> {
    let mut summary = ImplicationSummary::default();
    for (index, instance) in instances.iter().enumerate() {
        let oiia = check_oiia(rule, instance)?.holds();
        let osp = check_osp(rule, instance, caps)?.holds();
        let monotone = check_monotonicity(rule, instance)?.holds();
        summary.instances_checked += 1;
        summary.oiia_holds += oiia as usize;
        summary.osp_holds += osp as usize;
        summary.monotone_holds += monotone as usize;
        if oiia && !osp {
            summary.oiia_without_osp.push(index);
        }
        if osp && !monotone {
            summary.osp_without_monotonicity.push(index);
        }
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AlternativeId, RoundSpec};
    use crate::rules::run;

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

    fn greedyjr_fixture() -> Instance {
        let alts = ["c1", "c3", "c2", "c4"];
        Instance::new(
            5,
            vec![
                round(&alts, &[&["c1"], &["c1"], &["c1"], &["c2"], &["c3"]]),
                round(&alts, &[&["c1"], &["c1"], &["c2"], &["c2"], &["c3"]]),
            ],
        )
        .unwrap()
    }

    fn mes_fixture() -> Instance {
        let shared = round(&["c1", "c2", "c3"], &[&["c1"], &["c1"], &["c1"]]);
        let split = round(&["c1", "c2", "c3"], &[&["c1"], &["c2"], &["c3"]]);
        Instance::new(3, vec![shared.clone(), shared.clone(), shared, split]).unwrap()
    }

    fn phragmen_fixture() -> Instance {
        Instance::new(
            3,
            vec![
                round(&["a", "b", "c"], &[&["a"], &["a"], &["a"]]),
                round(&["a", "b", "c"], &[&["a"], &["b"], &["c"]]),
            ],
        )
        .unwrap()
    }

    /// Winner = least-approved alternative. Deliberately broken: adding the
    /// winner to a ballot pushes the win elsewhere.
    struct LeastApproved;

    impl RuleEval for LeastApproved {
        fn eval_prefix(
            &self,
            instance: &Instance,
            upto: usize,
        ) -> Result<OutcomeSequence, CoreError> {
            let winners = instance.rounds()[..upto]
                .iter()
                .map(|round| {
                    let count = |alt: u32| {
                        round.approvals.iter().filter(|s| s.contains(alt)).count()
                    };
                    (0..round.alternative_count() as u32)
                        .min_by_key(|&alt| count(alt))
                        .map(Some)
                        .unwrap()
                })
                .collect();
            Ok(OutcomeSequence::new(winners))
        }
    }

    #[test]
    fn tuple_enumeration_counts_and_order() {
        let inst = greedyjr_fixture();
        let tuples: Vec<Vec<AltSet>> = ApprovalTuples::new(&inst, 2).collect();
        assert_eq!(tuples.len() as u128, strategy_space_size(&inst, 2));
        assert_eq!(tuples.len(), 225); // (2^4 - 1)^2
        assert_eq!(tuples[0], vec![AltSet(1), AltSet(1)]);
        assert_eq!(tuples[1], vec![AltSet(1), AltSet(2)]); // last round fastest
        assert_eq!(tuples[224], vec![AltSet(15), AltSet(15)]);
    }

    #[test]
    fn av_holds_everything_on_the_fixture() {
        let inst = greedyjr_fixture();
        let caps = SearchCaps::default();
        assert!(check_monotonicity(&RuleKind::Av, &inst).unwrap().holds());
        assert!(check_oiia(&RuleKind::Av, &inst).unwrap().holds());
        assert!(check_oiia_addition(&RuleKind::Av, &inst).unwrap().holds());
        assert!(check_osp(&RuleKind::Av, &inst, &caps).unwrap().holds());
        // SP search is exhaustive: every voter scans 224 non-truthful tuples.
        match find_sp_violation(&RuleKind::Av, &inst, None, &caps).unwrap() {
            PropertyVerdict::Holds { candidates, .. } => assert_eq!(candidates, 5 * 224),
            other => panic!("AV should be strategyproof here, got {other:?}"),
        }
    }

    #[test]
    fn least_approved_rule_is_not_monotone() {
        let inst = Instance::new(
            2,
            vec![round(&["x", "y"], &[&["x"], &["y"]])],
        )
        .unwrap();
        let verdict = check_monotonicity(&LeastApproved, &inst).unwrap();
        match verdict {
            PropertyVerdict::ViolatedEdit { witness, .. } => {
                // Replay the edit: the winner must really move.
                let round = inst.round(witness.round).unwrap();
                let ballot = round.approval_set(witness.voter);
                let edited = inst.with_approvals(
                    witness.round,
                    witness.voter,
                    ballot.insert(witness.alternative),
                );
                let replayed = LeastApproved.eval(&edited).unwrap();
                assert_eq!(replayed.winner(witness.round), witness.new_winner);
                assert_ne!(witness.new_winner, witness.original_winner);
            }
            other => panic!("expected a monotonicity violation, got {other:?}"),
        }
    }

    #[test]
    fn least_approved_rule_is_not_osp() {
        let inst = Instance::new(
            2,
            vec![round(&["x", "y"], &[&["x"], &["y"]])],
        )
        .unwrap();
        let verdict = check_osp(&LeastApproved, &inst, &SearchCaps::default()).unwrap();
        match verdict {
            PropertyVerdict::ViolatedStrategy { witness, .. } => {
                assert_eq!(witness.round, Some(0));
                assert_eq!(witness.manipulated_sat, 1);
                assert_eq!(witness.truthful_sat, 0);
            }
            other => panic!("expected an online violation, got {other:?}"),
        }
    }

    #[test]
    fn irrelevant_dictator_breaks_oiia_but_not_osp() {
        // Dictator declares the full three-alternative set; the outcome is c,
        // yet dropping a non-winning alternative moves it.
        let inst = Instance::new(
            2,
            vec![round(&["a", "b", "c"], &[&["a", "b", "c"], &["a"]])],
        )
        .unwrap();
        let rule = RuleKind::IrrelevantDictator;
        assert!(!check_oiia(&rule, &inst).unwrap().holds());

        // The specific edit: {a,b,c} minus b elects a instead of c.
        let full = inst.round(0).unwrap().approval_set(VoterId(0));
        let edited = inst.with_approvals(0, VoterId(0), full.remove(1));
        let out = run(&rule, &edited).unwrap();
        assert_eq!(out.winner(0), Some(0));

        // Still online strategyproof: the dictator always gets an approved
        // alternative and nobody else has influence.
        assert!(check_osp(&rule, &inst, &SearchCaps::default()).unwrap().holds());
        assert!(check_monotonicity(&rule, &inst).unwrap().holds());
    }

    #[test]
    fn irrelevant_dictator_breaks_the_addition_lemma() {
        // {a,c} elects a; adding b elects c, not the added b.
        let inst = Instance::new(
            2,
            vec![round(&["a", "b", "c"], &[&["a", "c"], &["a"]])],
        )
        .unwrap();
        let verdict = check_oiia_addition(&RuleKind::IrrelevantDictator, &inst).unwrap();
        match verdict {
            PropertyVerdict::ViolatedEdit { witness, .. } => {
                assert_eq!(witness.voter, VoterId(0));
                assert_eq!(witness.alternative, 1);
                assert_eq!(witness.original_winner, Some(0));
                assert_eq!(witness.new_winner, Some(2));
            }
            other => panic!("expected an addition-lemma violation, got {other:?}"),
        }
    }

    #[test]
    fn wams_satisfy_the_addition_lemma_on_the_fixture() {
        let inst = greedyjr_fixture();
        for kind in RuleKind::wam_catalog() {
            assert!(check_oiia_addition(&kind, &inst).unwrap().holds());
        }
    }

    #[test]
    fn paper_rules_are_osp_on_their_own_fixtures() {
        let caps = SearchCaps::default();
        assert!(check_osp(&RuleKind::GreedyJr, &greedyjr_fixture(), &caps)
            .unwrap()
            .holds());
        assert!(check_osp(&RuleKind::mes(), &mes_fixture(), &caps)
            .unwrap()
            .holds());
        assert!(
            check_osp(&RuleKind::PerpetualPhragmen, &phragmen_fixture(), &caps)
                .unwrap()
                .holds()
        );
    }

    #[test]
    fn single_voter_instances_are_trivially_osp() {
        let inst = Instance::new(1, vec![round(&["x", "y"], &[&["y"]])]).unwrap();
        let caps = SearchCaps::default();
        for kind in [
            RuleKind::Av,
            RuleKind::GreedyJr,
            RuleKind::mes(),
            RuleKind::PerpetualPhragmen,
            RuleKind::tsd(),
            RuleKind::IrrelevantDictator,
        ] {
            assert!(check_osp(&kind, &inst, &caps).unwrap().holds());
            assert!(find_sp_violation(&kind, &inst, None, &caps).unwrap().holds());
        }
    }

    #[test]
    fn greedyjr_manipulation_found_for_v3() {
        let inst = greedyjr_fixture();
        let verdict =
            find_sp_violation(&RuleKind::GreedyJr, &inst, Some(VoterId(2)), &SearchCaps::default())
                .unwrap();
        match verdict {
            PropertyVerdict::ViolatedStrategy { witness, .. } => {
                assert_eq!(witness.voter, VoterId(2));
                assert_eq!(witness.truthful_sat, 1);
                assert_eq!(witness.manipulated_sat, 2);
                // First improving tuple in enumeration order: declare {c3}
                // (index 1) then {c2} (index 2).
                assert_eq!(witness.deviation, vec![AltSet(0b0010), AltSet(0b0100)]);
            }
            other => panic!("expected a manipulation, got {other:?}"),
        }
    }

    #[test]
    fn greedyjr_unrestricted_search_finds_v1_first() {
        let inst = greedyjr_fixture();
        let verdict =
            find_sp_violation(&RuleKind::GreedyJr, &inst, None, &SearchCaps::default()).unwrap();
        match verdict {
            PropertyVerdict::ViolatedStrategy { witness, .. } => {
                assert_eq!(witness.voter, VoterId(0));
                assert_eq!(witness.truthful_sat, 1);
                assert_eq!(witness.manipulated_sat, 2);
            }
            other => panic!("expected a manipulation, got {other:?}"),
        }
    }

    #[test]
    fn mes_manipulation_matches_the_free_riding_strategy() {
        let inst = mes_fixture();
        let verdict =
            find_sp_violation(&RuleKind::mes(), &inst, Some(VoterId(2)), &SearchCaps::default())
                .unwrap();
        match verdict {
            PropertyVerdict::ViolatedStrategy { witness, .. } => {
                assert_eq!(witness.voter, VoterId(2));
                assert_eq!(witness.truthful_sat, 3);
                assert_eq!(witness.manipulated_sat, 4);
                // ({c1}, {c2}, {c2}, {c3})
                assert_eq!(
                    witness.deviation,
                    vec![AltSet(0b001), AltSet(0b010), AltSet(0b010), AltSet(0b100)]
                );
                assert_eq!(
                    witness.manipulated_outcomes.winners(),
                    &[Some(0), Some(0), Some(0), Some(2)]
                );
            }
            other => panic!("expected a manipulation, got {other:?}"),
        }
    }

    #[test]
    fn phragmen_manipulation_is_round_one_free_riding() {
        let inst = phragmen_fixture();
        let verdict = find_sp_violation(
            &RuleKind::PerpetualPhragmen,
            &inst,
            Some(VoterId(2)),
            &SearchCaps::default(),
        )
        .unwrap();
        match verdict {
            PropertyVerdict::ViolatedStrategy { witness, .. } => {
                assert_eq!(witness.truthful_sat, 1);
                assert_eq!(witness.manipulated_sat, 2);
                // Declare {b} in round 1, stay truthful ({c}) in round 2.
                assert_eq!(witness.deviation, vec![AltSet(0b010), AltSet(0b100)]);
            }
            other => panic!("expected a manipulation, got {other:?}"),
        }
    }

    #[test]
    fn findings_replay_bit_exactly() {
        let inst = mes_fixture();
        let caps = SearchCaps::default();
        let verdict =
            find_sp_violation(&RuleKind::mes(), &inst, Some(VoterId(2)), &caps).unwrap();
        let PropertyVerdict::ViolatedStrategy { witness, .. } = verdict else {
            panic!("expected a manipulation");
        };
        let replayed =
            replay_deviation(&RuleKind::mes(), &inst, witness.voter, &witness.deviation).unwrap();
        assert_eq!(replayed.truthful_sat, witness.truthful_sat);
        assert_eq!(replayed.manipulated_sat, witness.manipulated_sat);
        assert_eq!(replayed.truthful_outcomes, witness.truthful_outcomes);
        assert_eq!(replayed.manipulated_outcomes, witness.manipulated_outcomes);
    }

    #[test]
    fn osp_verdict_matches_an_independent_scan() {
        // Brute-force re-verification of the HOLDS verdict: replay every
        // single-round deviation by hand and confirm none gains the round.
        let inst = mes_fixture();
        let caps = SearchCaps::default();
        assert!(check_osp(&RuleKind::mes(), &inst, &caps).unwrap().holds());
        let truthful = run(&RuleKind::mes(), &inst).unwrap();
        for voter in inst.voters() {
            for t in 0..inst.round_count() {
                let round = inst.round(t).unwrap();
                let ballot = round.approval_set(voter);
                let truthful_sat =
                    matches!(truthful.winner(t), Some(w) if ballot.contains(w)) as usize;
                for mask in 1..round.full_set().0 + 1 {
                    if AltSet(mask) == ballot {
                        continue;
                    }
                    let edited = inst.with_approvals(t, voter, AltSet(mask));
                    let out = run_prefix(&RuleKind::mes(), &edited, t + 1).unwrap();
                    let gained =
                        matches!(out.winner(t), Some(w) if ballot.contains(w)) as usize;
                    assert!(
                        gained <= truthful_sat,
                        "round-only deviation gained for {voter} at t={t}"
                    );
                }
            }
        }
    }

    #[test]
    fn strategy_cap_is_enforced() {
        let inst = mes_fixture();
        let caps = SearchCaps {
            groups: 16,
            strategies: 10,
        };
        assert!(matches!(
            find_sp_violation(&RuleKind::mes(), &inst, None, &caps),
            Err(CoreError::StrategyCapExceeded { size: 2401, cap: 10 })
        ));
        assert!(matches!(
            check_osp(&RuleKind::mes(), &inst, &caps),
            Err(CoreError::StrategyCapExceeded { .. })
        ));
    }

    #[test]
    fn implications_hold_on_the_fixture_batch() {
        let batch = [greedyjr_fixture(), mes_fixture(), phragmen_fixture()];
        let caps = SearchCaps::default();
        for kind in [
            RuleKind::Av,
            RuleKind::GreedyJr,
            RuleKind::mes(),
            RuleKind::PerpetualPhragmen,
            RuleKind::tsd(),
            RuleKind::IrrelevantDictator,
        ] {
            let summary = verify_implications(&kind, &batch, &caps).unwrap();
            assert!(summary.consistent(), "{} inconsistent", kind.name());
            assert_eq!(summary.instances_checked, 3);
        }
        // Empty batches pass vacuously.
        let empty = verify_implications(&RuleKind::Av, &[], &caps).unwrap();
        assert!(empty.consistent());
        assert_eq!(empty.instances_checked, 0);
    }
}
