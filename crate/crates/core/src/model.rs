//! Instance data model shared by every rule and audit: voters, rounds,
//! approval sets, outcome sequences, and cohesive-group enumeration.
//!
//! Approval sets and voter groups are bitmasks. The order of a round's
//! alternative list is the tie-break order: in any tie the alternative with
//! the lowest index wins. Voters tie-break by index, groups by their sorted
//! member sequences.

use std::cmp::Ordering;
use std::fmt;

use crate::error::CoreError;

/// Groups are enumerated exhaustively (2^n - 1 subsets); refuse beyond this
/// many voters unless the caller raises the cap explicitly.
pub const DEFAULT_GROUP_CAP: usize = 16;

/// Hard ceiling imposed by the bitmask representation.
pub const MAX_VOTERS: usize = 64;
pub const MAX_ALTERNATIVES: usize = 64;

/// A voter, identified by 0-based index. File labels are 1-based (`v1`..`vn`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VoterId(pub usize);

impl VoterId {
    pub fn label(&self) -> String {
        format!("v{}", self.0 + 1)
    }

    /// Parses a 1-based `v3` style label into a 0-based id.
    pub fn from_label(label: &str) -> Option<VoterId> {
        let digits = label.strip_prefix('v')?;
        let index: usize = digits.parse().ok()?;
        if index == 0 {
            return None;
        }
        Some(VoterId(index - 1))
    }
}

impl fmt::Display for VoterId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// An alternative label, unique within a round.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AlternativeId(pub String);

impl AlternativeId {
    pub fn new(label: impl Into<String>) -> Self {
        AlternativeId(label.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for AlternativeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A subset of one round's alternatives, by index into the round's list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AltSet(pub u64);

impl AltSet {
    pub const EMPTY: AltSet = AltSet(0);

    pub fn singleton(index: u32) -> AltSet {
        AltSet(1 << index)
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(&self, index: u32) -> bool {
        self.0 >> index & 1 == 1
    }

    pub fn insert(&self, index: u32) -> AltSet {
        AltSet(self.0 | 1 << index)
    }

    pub fn remove(&self, index: u32) -> AltSet {
        AltSet(self.0 & !(1 << index))
    }

    pub fn union(&self, other: AltSet) -> AltSet {
        AltSet(self.0 | other.0)
    }

    pub fn intersection(&self, other: AltSet) -> AltSet {
        AltSet(self.0 & other.0)
    }

    pub fn is_subset_of(&self, other: AltSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Lowest-index member: the tie-break-first alternative of the set.
    pub fn first(&self) -> Option<u32> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros())
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        let mask = self.0;
        (0..64).filter(move |i| mask >> i & 1 == 1)
    }
}

/// A non-empty set of voters, as a bitmask of voter indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct VoterGroup(pub u64);

impl VoterGroup {
    pub fn singleton(voter: VoterId) -> VoterGroup {
        VoterGroup(1 << voter.0)
    }

    pub fn from_members(members: &[usize]) -> VoterGroup {
        VoterGroup(members.iter().fold(0, |mask, &v| mask | 1 << v))
    }

    pub fn all(n: usize) -> VoterGroup {
        debug_assert!(n >= 1 && n <= MAX_VOTERS);
        if n == MAX_VOTERS {
            VoterGroup(u64::MAX)
        } else {
            VoterGroup((1 << n) - 1)
        }
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(&self, voter: VoterId) -> bool {
        self.0 >> voter.0 & 1 == 1
    }

    pub fn is_subset_of(&self, other: VoterGroup) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn members(&self) -> Vec<VoterId> {
        (0..64)
            .filter(|i| self.0 >> i & 1 == 1)
            .map(VoterId)
            .collect()
    }

    /// Orders groups by their sorted member-index sequences, compared
    /// lexicographically: `{v1} < {v1,v2} < {v1,v3} < {v2}`. Below the lowest
    /// differing index the members agree; the group holding that index wins
    /// unless the other group is exhausted there (a proper prefix).
    pub fn cmp_lex(&self, other: &VoterGroup) -> Ordering {
        let diff = self.0 ^ other.0;
        if diff == 0 {
            return Ordering::Equal;
        }
        let lowest = diff.trailing_zeros();
        let has_above = |mask: u64| lowest < 63 && mask >> (lowest + 1) != 0;
        if self.0 >> lowest & 1 == 1 {
            if has_above(other.0) {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        } else if has_above(self.0) {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }
}

impl fmt::Display for VoterGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.members().iter().map(|v| v.label()).collect();
        write!(f, "{{{}}}", labels.join(","))
    }
}

/// Visits every non-empty subset of `[0, n)` in lexicographic order of the
/// sorted member sequences: {0}, {0,1}, {0,1,2}, ..., {0,2}, ..., {1}, ...
pub fn for_each_group_lex(n: usize, mut visit: impl FnMut(VoterGroup)) {
    fn descend(mask: u64, next: usize, n: usize, visit: &mut impl FnMut(VoterGroup)) {
        for i in next..n {
            let extended = mask | 1 << i;
            visit(VoterGroup(extended));
            descend(extended, i + 1, n, visit);
        }
    }
    descend(0, 0, n, &mut visit);
}

/// One round: an ordered alternative list (the order is the tie-break
/// priority) and one approval set per voter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundSpec {
    pub alternatives: Vec<AlternativeId>,
    pub approvals: Vec<AltSet>,
}

impl RoundSpec {
    pub fn alternative_count(&self) -> usize {
        self.alternatives.len()
    }

    pub fn approval_set(&self, voter: VoterId) -> AltSet {
        self.approvals[voter.0]
    }

    /// All alternatives of the round as a mask.
    pub fn full_set(&self) -> AltSet {
        if self.alternatives.len() == MAX_ALTERNATIVES {
            AltSet(u64::MAX)
        } else {
            AltSet((1u64 << self.alternatives.len()) - 1)
        }
    }

    pub fn index_of(&self, label: &str) -> Option<u32> {
        self.alternatives
            .iter()
            .position(|a| a.as_str() == label)
            .map(|i| i as u32)
    }

    pub fn label(&self, index: u32) -> &AlternativeId {
        &self.alternatives[index as usize]
    }

    /// Voters approving the given alternative, lowest index first.
    pub fn approvers(&self, alt: u32) -> Vec<VoterId> {
        self.approvals
            .iter()
            .enumerate()
            .filter(|(_, set)| set.contains(alt))
            .map(|(i, _)| VoterId(i))
            .collect()
    }
}

/// A complete voting instance: `n` voters, `T` rounds, full approval data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    n: usize,
    rounds: Vec<RoundSpec>,
}

impl Instance {
    /// Builds an instance, checking the structural invariants: at least one
    /// voter and round, every approval row present, every approval set a
    /// non-empty subset of the round's alternatives.
    pub fn new(n: usize, rounds: Vec<RoundSpec>) -> Result<Instance, CoreError> {
        if n == 0 || n > MAX_VOTERS {
            return Err(CoreError::Internal(format!(
                "voter count {n} outside supported range 1..={MAX_VOTERS}"
            )));
        }
        if rounds.is_empty() {
            return Err(CoreError::Internal("instance has no rounds".into()));
        }
        for (t, round) in rounds.iter().enumerate() {
            if round.alternatives.is_empty() || round.alternatives.len() > MAX_ALTERNATIVES {
                return Err(CoreError::Internal(format!(
                    "round {t} has {} alternatives, expected 1..={MAX_ALTERNATIVES}",
                    round.alternatives.len()
                )));
            }
            if round.approvals.len() != n {
                return Err(CoreError::Internal(format!(
                    "round {t} has {} approval rows for {n} voters",
                    round.approvals.len()
                )));
            }
            let full = round.full_set();
            for (v, set) in round.approvals.iter().enumerate() {
                if set.is_empty() {
                    return Err(CoreError::Internal(format!(
                        "voter v{} has empty approvals in round {t}",
                        v + 1
                    )));
                }
                if !set.is_subset_of(full) {
                    return Err(CoreError::Internal(format!(
                        "voter v{} approves outside round {t}'s alternatives",
                        v + 1
                    )));
                }
            }
        }
        Ok(Instance { n, rounds })
    }

    pub fn voter_count(&self) -> usize {
        self.n
    }

    pub fn round_count(&self) -> usize {
        self.rounds.len()
    }

    pub fn round(&self, t: usize) -> Result<&RoundSpec, CoreError> {
        self.rounds.get(t).ok_or(CoreError::RoundOutOfRange {
            round: t,
            rounds: self.rounds.len(),
        })
    }

    pub fn rounds(&self) -> &[RoundSpec] {
        &self.rounds
    }

    pub fn voters(&self) -> impl Iterator<Item = VoterId> {
        (0..self.n).map(VoterId)
    }

    /// Drops all rounds from `t` on.
    pub fn truncated(&self, t: usize) -> Instance {
        Instance {
            n: self.n,
            rounds: self.rounds[..t].to_vec(),
        }
    }

    /// Returns a copy with one voter's approvals in one round replaced.
    /// The replacement must be a non-empty subset of the round's alternatives.
    pub fn with_approvals(&self, t: usize, voter: VoterId, set: AltSet) -> Instance {
        debug_assert!(!set.is_empty());
        debug_assert!(set.is_subset_of(self.rounds[t].full_set()));
        let mut copy = self.clone();
        copy.rounds[t].approvals[voter.0] = set;
        copy
    }

    /// Returns a copy with one voter's approvals replaced in every round.
    pub fn with_voter_approvals(&self, voter: VoterId, sets: &[AltSet]) -> Instance {
        debug_assert_eq!(sets.len(), self.rounds.len());
        self.with_voter_prefix(voter, sets)
    }

    /// Returns a copy with one voter's approvals replaced in the first
    /// `sets.len()` rounds; later rounds keep the declared approvals.
    pub fn with_voter_prefix(&self, voter: VoterId, sets: &[AltSet]) -> Instance {
        debug_assert!(sets.len() <= self.rounds.len());
        let mut copy = self.clone();
        for (round, &set) in copy.rounds.iter_mut().zip(sets) {
            debug_assert!(!set.is_empty() && set.is_subset_of(round.full_set()));
            round.approvals[voter.0] = set;
        }
        copy
    }

    fn check_group(&self, group: VoterGroup) -> Result<(), CoreError> {
        if group.is_empty() {
            return Err(CoreError::EmptyGroup);
        }
        if !group.is_subset_of(VoterGroup::all(self.n)) {
            let stray = group
                .members()
                .into_iter()
                .find(|v| v.0 >= self.n)
                .map(|v| v.0)
                .unwrap_or(self.n);
            return Err(CoreError::VoterOutOfRange(stray));
        }
        Ok(())
    }

    /// Union of the group's approvals in round `t`.
    pub fn approval_union(&self, group: VoterGroup, t: usize) -> Result<AltSet, CoreError> {
        self.check_group(group)?;
        let round = self.round(t)?;
        Ok(group
            .members()
            .iter()
            .fold(AltSet::EMPTY, |acc, v| acc.union(round.approvals[v.0])))
    }

    /// Intersection of the group's approvals in round `t`.
    pub fn approval_intersection(&self, group: VoterGroup, t: usize) -> Result<AltSet, CoreError> {
        self.check_group(group)?;
        let round = self.round(t)?;
        Ok(group
            .members()
            .iter()
            .fold(round.full_set(), |acc, v| {
                acc.intersection(round.approvals[v.0])
            }))
    }

    /// 1 if the round's winner is approved by some group member, else 0.
    /// Rounds without a winner contribute 0.
    pub fn satisfaction_at(
        &self,
        group: VoterGroup,
        outcomes: &OutcomeSequence,
        t: usize,
    ) -> Result<usize, CoreError> {
        let union = self.approval_union(group, t)?;
        match outcomes.winner(t) {
            Some(w) if union.contains(w) => Ok(1),
            _ => Ok(0),
        }
    }

    /// Number of rounds whose winner is approved by some group member.
    pub fn satisfaction(
        &self,
        group: VoterGroup,
        outcomes: &OutcomeSequence,
    ) -> Result<usize, CoreError> {
        self.check_group(group)?;
        debug_assert_eq!(outcomes.len(), self.round_count());
        let mut total = 0;
        for t in 0..self.round_count() {
            total += self.satisfaction_at(group, outcomes, t)?;
        }
        Ok(total)
    }

    pub fn voter_satisfaction(
        &self,
        voter: VoterId,
        outcomes: &OutcomeSequence,
    ) -> Result<usize, CoreError> {
        self.satisfaction(VoterGroup::singleton(voter), outcomes)
    }

    /// The maximal cohesion level of the group: the number of rounds in which
    /// its approval intersection is non-empty, with the witnessing rounds.
    pub fn cohesion_level(&self, group: VoterGroup) -> Result<CohesionRecord, CoreError> {
        self.check_group(group)?;
        let mut witness_rounds = Vec::new();
        for t in 0..self.round_count() {
            if !self.approval_intersection(group, t)?.is_empty() {
                witness_rounds.push(t);
            }
        }
        Ok(CohesionRecord {
            group,
            level: witness_rounds.len(),
            witness_rounds,
        })
    }

    /// All non-empty groups with cohesion level at least `min_level`, in
    /// lexicographic group order. Errors if `n` exceeds the enumeration cap.
    pub fn enumerate_cohesive_groups(
        &self,
        min_level: usize,
        cap: usize,
    ) -> Result<Vec<CohesionRecord>, CoreError> {
        if self.n > cap {
            return Err(CoreError::GroupCapExceeded { n: self.n, cap });
        }
        let mut records = Vec::new();
        let mut error = None;
        for_each_group_lex(self.n, |group| {
            if error.is_some() {
                return;
            }
            match self.cohesion_level(group) {
                Ok(record) if record.level >= min_level => records.push(record),
                Ok(_) => {}
                Err(e) => error = Some(e),
            }
        });
        match error {
            Some(e) => Err(e),
            None => Ok(records),
        }
    }
}

/// A group together with its maximal cohesion level and witness rounds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohesionRecord {
    pub group: VoterGroup,
    pub level: usize,
    pub witness_rounds: Vec<usize>,
}

/// Per-round winners. `None` marks a round decided without a winner; once a
/// `None` appears the sequence stays absent (rules that terminate do so for
/// good).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutcomeSequence {
    winners: Vec<Option<u32>>,
}

impl OutcomeSequence {
    pub fn new(winners: Vec<Option<u32>>) -> OutcomeSequence {
        debug_assert!(
            winners
                .iter()
                .skip_while(|w| w.is_some())
                .all(|w| w.is_none()),
            "absent winners must be a suffix"
        );
        OutcomeSequence { winners }
    }

    pub fn len(&self) -> usize {
        self.winners.len()
    }

    pub fn is_empty(&self) -> bool {
        self.winners.is_empty()
    }

    pub fn winner(&self, t: usize) -> Option<u32> {
        self.winners.get(t).copied().flatten()
    }

    pub fn winners(&self) -> &[Option<u32>] {
        &self.winners
    }

    pub fn truncated(&self, t: usize) -> OutcomeSequence {
        OutcomeSequence {
            winners: self.winners[..t].to_vec(),
        }
    }

    /// Winner labels resolved against the instance, `None` where absent.
    pub fn labels<'a>(&self, instance: &'a Instance) -> Vec<Option<&'a AlternativeId>> {
        self.winners
            .iter()
            .enumerate()
            .map(|(t, w)| w.map(|idx| instance.rounds()[t].label(idx)))
            .collect()
    }
}
