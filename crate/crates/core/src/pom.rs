//! Price of manipulability and asymptotic proportionality: how far group
//! satisfaction can fall when one voter best-responds, and how close the
//! round-robin dictatorship gets to proportional justified representation as
//! rounds accumulate.


use crate::audit::{bound, Axiom};
use crate::error::CoreError;
use crate::model::{
    for_each_group_lex, AltSet, AlternativeId, Instance, RoundSpec, VoterGroup, VoterId,
};
use crate::rational::{rat_int, Rational};
use crate::rules::{run, RuleKind};
use crate::strategy::{find_sp_violation, PropertyVerdict, RuleEval, SearchCaps};

/// Guaranteed post-manipulation satisfaction of a group that contains the
/// manipulator: `q*|G| - q + 1` with `q = floor(level / n)`. The remaining
/// members stay cohesive and are owed `floor(level*(|G|-1)/n) >= q*|G| - q`;
/// the manipulator's own gain contributes the final unit.
pub fn pjr_floor(group_size: usize, level: usize, n: usize) -> usize {
    debug_assert!(group_size >= 2, "the manipulator leaves a smaller group");
    let q = level / n;
    q * group_size - q + 1
}

/// One truthfully-cohesive group evaluated against the outcome of a single
/// manipulated run. Satisfaction is measured against truthful approvals.
#[derive(Clone, Debug)]
pub struct PomRow {
    pub group: VoterGroup,
    pub level: usize,
    pub jr_bound: usize,
    pub pjr_bound: usize,
    pub manipulated_sat: usize,
    pub contains_manipulator: bool,
    /// Satisfaction kept the JR floor of 1.
    pub jr_ok: bool,
    /// The PJR floor this group must keep: `pjr_floor` when it contains the
    /// manipulator, its full truthful bound otherwise (it stays cohesive).
    pub pjr_floor: usize,
    pub pjr_ok: bool,
}

/// The effect of one voter's first improving deviation on every
/// truthfully-cohesive group with a positive bound.
#[derive(Clone, Debug)]
pub struct PomReport {
    pub manipulator: VoterId,
    pub deviation: Vec<AltSet>,
    pub truthful_sat: usize,
    pub manipulated_sat: usize,
    pub rows: Vec<PomRow>,
    pub all_jr_ok: bool,
    pub all_pjr_ok: bool,
    /// Smallest manipulated-satisfaction / truthful-PJR-bound over the rows.
    pub min_ratio: Option<Rational>,
}

/// For each voter holding at least one strictly improving full-horizon
/// deviation, replays that voter's first such deviation and grades every
/// truthfully-cohesive group against the floors. Voters without improving
/// deviations contribute no report.
pub fn pom_report<R: RuleEval>(
    rule: &R,
    instance: &Instance,
    caps: &SearchCaps,
) -> Result<Vec<PomReport>, CoreError> {
    let n = instance.voter_count();
    if n > caps.groups {
        return Err(CoreError::GroupCapExceeded { n, cap: caps.groups });
    }
    let mut reports = Vec::new();
    for voter in instance.voters() {
        let verdict = find_sp_violation(rule, instance, Some(voter), caps)?;
        let PropertyVerdict::ViolatedStrategy { witness, .. } = verdict else {
            continue;
        };

        let mut rows = Vec::new();
        let mut error = None;
        let mut min_ratio: Option<Rational> = None;
        for_each_group_lex(n, |group| {
            if error.is_some() {
                return;
            }
            let mut build = || -> Result<(), CoreError> {
                let record = instance.cohesion_level(group)?;
                let pjr_bound = bound(Axiom::Pjr, group.len(), record.level, n);
                if pjr_bound == 0 {
                    return Ok(());
                }
                let manipulated_sat =
                    instance.satisfaction(group, &witness.manipulated_outcomes)?;
                let contains = group.contains(voter);
                let floor = if contains && group.len() >= 2 {
                    pjr_floor(group.len(), record.level, n)
                } else if contains {
                    1 // singleton manipulator: its own gain keeps it satisfied
                } else {
                    pjr_bound
                };
                let ratio = rat_int(manipulated_sat as i64) / rat_int(pjr_bound as i64);
                if min_ratio.as_ref().is_none_or(|m| ratio < *m) {
                    min_ratio = Some(ratio);
                }
                rows.push(PomRow {
                    group,
                    level: record.level,
                    jr_bound: 1,
                    pjr_bound,
                    manipulated_sat,
                    contains_manipulator: contains,
                    jr_ok: manipulated_sat >= 1,
                    pjr_floor: floor,
                    pjr_ok: manipulated_sat >= floor,
                });
                Ok(())
            };
            if let Err(e) = build() {
                error = Some(e);
            }
        });
        if let Some(e) = error {
            return Err(e);
        }

        reports.push(PomReport {
            manipulator: voter,
            truthful_sat: witness.truthful_sat,
            manipulated_sat: witness.manipulated_sat,
            deviation: witness.deviation,
            all_jr_ok: rows.iter().all(|r| r.jr_ok),
            all_pjr_ok: rows.iter().all(|r| r.pjr_ok),
            min_ratio,
            rows,
        });
    }
    Ok(reports)
}

/// One horizon of the constructed worst-case family. The ratio compares the
/// worst group's satisfaction to its `(q+1)*|G|` entitlement ceiling, the
/// largest value the proportional bound can take at cycle count q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergencePoint {
    pub q: usize,
    pub t: usize,
    pub ratio: Rational,
}

/// Builds the adversarial family for the round-robin dictatorship: a block
/// of `group_size` voters shares one alternative in every round while the
/// remaining voters (who dictate first) approve outside it.
pub fn convergence_instance(n: usize, group_size: usize, q: usize) -> Instance {
    let rounds = (0..q * n)
        .map(|_| {
            let alternatives = vec![AlternativeId::new("c1"), AlternativeId::new("c2")];
            let approvals = (0..n)
                .map(|v| {
                    if v < n - group_size {
                        AltSet(0b01)
                    } else {
                        AltSet(0b10)
                    }
                })
                .collect();
            RoundSpec {
                alternatives,
                approvals,
            }
        })
        .collect();
    Instance::new(n, rounds).expect("family construction is valid")
}

/// Measures, for `q = 1..=q_max` with horizon `T = q*n`, the minimum over
/// cohesive groups of satisfaction / ((q+1)*|G|) under the round-robin
/// dictatorship on the constructed family. The block group pins the minimum
/// at exactly q/(q+1).
pub fn tsd_convergence(
    n: usize,
    group_fraction: &Rational,
    q_max: usize,
    caps: &SearchCaps,
) -> Result<Vec<ConvergencePoint>, CoreError> {
    if n < 2 || q_max < 1 {
        return Err(CoreError::Internal(
            "convergence family needs n >= 2 and q_max >= 1".into(),
        ));
    }
    if n > caps.groups {
        return Err(CoreError::GroupCapExceeded { n, cap: caps.groups });
    }
    let scaled = group_fraction * rat_int(n as i64);
    let group_size = (scaled.to_integer().try_into().unwrap_or(1usize)).clamp(1, n - 1);

    let mut points = Vec::with_capacity(q_max);
    for q in 1..=q_max {
        let instance = convergence_instance(n, group_size, q);
        let outcomes = run(&RuleKind::tsd(), &instance)?;
        let ceiling_scale = rat_int((q + 1) as i64);
        let mut worst: Option<Rational> = None;
        let mut error = None;
        for_each_group_lex(n, |group| {
            if error.is_some() {
                return;
            }
            let mut measure = || -> Result<(), CoreError> {
                if instance.cohesion_level(group)?.level == 0 {
                    return Ok(());
                }
                let sat = instance.satisfaction(group, &outcomes)?;
                let ratio = rat_int(sat as i64)
                    / (&ceiling_scale * rat_int(group.len() as i64));
                if worst.as_ref().is_none_or(|w| ratio < *w) {
                    worst = Some(ratio);
                }
                Ok(())
            };
            if let Err(e) = measure() {
                error = Some(e);
            }
        });
        if let Some(e) = error {
            return Err(e);
        }
        points.push(ConvergencePoint {
            q,
            t: q * n,
            ratio: worst.expect("singletons are always cohesive"),
        });
    }
    Ok(points)
}

/// Batch check of the individual PJR floor: with `T = q*n + r`, every voter
/// is a 1/n-fraction group cohesive in all rounds and so is owed `q`.
#[derive(Clone, Debug)]
pub struct FloorSummary {
    pub instances_checked: usize,
    /// (instance index, voter, satisfaction, floor) for every voter that
    /// fell short; empty when the rule honors the floor.
    pub violations: Vec<(usize, VoterId, usize, usize)>,
    /// Minimum over instances and groups of satisfaction / ((q+1)*|G|).
    pub worst_ratio: Option<Rational>,
}

pub fn pjr_individual_floor_check<R: RuleEval>(
    rule: &R,
    instances: &[Instance],
    caps: &SearchCaps,
) -> Result<FloorSummary, CoreError> {
    let mut summary = FloorSummary {
        instances_checked: 0,
        violations: Vec::new(),
        worst_ratio: None,
    };
    for (index, instance) in instances.iter().enumerate() {
        let n = instance.voter_count();
        if n > caps.groups {
            return Err(CoreError::GroupCapExceeded { n, cap: caps.groups });
        }
        let q = instance.round_count() / n;
        let outcomes = rule.eval(instance)?;
        for voter in instance.voters() {
            let sat = instance.voter_satisfaction(voter, &outcomes)?;
            if sat < q {
                summary.violations.push((index, voter, sat, q));
            }
        }
        let ceiling_scale = rat_int((q + 1) as i64);
        let mut error = None;
        for_each_group_lex(n, |group| {
            if error.is_some() {
                return;
            }
            let mut measure = || -> Result<(), CoreError> {
                if instance.cohesion_level(group)?.level == 0 {
                    return Ok(());
                }
                let sat = instance.satisfaction(group, &outcomes)?;
                let ratio =
                    rat_int(sat as i64) / (&ceiling_scale * rat_int(group.len() as i64));
                if summary.worst_ratio.as_ref().is_none_or(|w| ratio < *w) {
                    summary.worst_ratio = Some(ratio);
                }
                Ok(())
            };
            if let Err(e) = measure() {
                error = Some(e);
            }
        });
        if let Some(e) = error {
            return Err(e);
        }
        summary.instances_checked += 1;
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn pjr_floor_formula() {
        // One full cycle of cohesion: a trio keeps 3 - 1 + 1 = 3.
        assert_eq!(pjr_floor(3, 4, 4), 3);
        // Below one cycle the floor collapses to the JR unit.
        assert_eq!(pjr_floor(5, 3, 4), 1);
    }

    #[test]
    fn pjr_floor_never_exceeds_the_survivors_guarantee() {
        // Exhaustive small-parameter check: the remaining group's own PJR
        // bound plus the manipulator's unit always covers the floor.
        for n in 1..=8usize {
            for level in 0..=4 * n {
                for group_size in 2..=n {
                    let q = level / n;
                    let survivors = level * (group_size - 1) / n;
                    assert!(
                        survivors + 1 >= q * group_size - q + 1,
                        "n={n} level={level} g={group_size}"
                    );
                }
            }
        }
    }

    #[test]
    fn convergence_ratio_is_exactly_q_over_q_plus_one() {
        let caps = SearchCaps::default();
        let points = tsd_convergence(6, &rat(1, 2), 4, &caps).unwrap();
        assert_eq!(points.len(), 4);
        for point in &points {
            let q = point.q as i64;
            assert_eq!(point.t, point.q * 6);
            assert_eq!(point.ratio, rat(q, q + 1), "q = {q}");
        }
        // Non-decreasing in q.
        for pair in points.windows(2) {
            assert!(pair[0].ratio <= pair[1].ratio);
        }
    }

    #[test]
    fn convergence_rejects_degenerate_parameters() {
        let caps = SearchCaps::default();
        assert!(tsd_convergence(1, &rat(1, 2), 3, &caps).is_err());
        assert!(tsd_convergence(4, &rat(1, 2), 0, &caps).is_err());
    }

    #[test]
    fn unanimous_group_attains_ratio_one_against_its_own_bound() {
        // When every voter shares one alternative in all T = q*n rounds, the
        // dictatorship satisfies the full group every round: satisfaction T
        // against the actual proportional bound floor(T*n/n) = T.
        for q in 1..=3usize {
            let n = 3;
            let rounds = (0..q * n)
                .map(|_| RoundSpec {
                    alternatives: vec![AlternativeId::new("z")],
                    approvals: vec![AltSet(1); n],
                })
                .collect();
            let instance = Instance::new(n, rounds).unwrap();
            let outcomes = run(&RuleKind::tsd(), &instance).unwrap();
            let group = VoterGroup::all(n);
            let sat = instance.satisfaction(group, &outcomes).unwrap();
            let level = instance.cohesion_level(group).unwrap().level;
            assert_eq!(sat, q * n);
            assert_eq!(bound(Axiom::Pjr, n, level, n), q * n);
        }
    }

    #[test]
    fn tsd_honors_the_individual_cycle_floor() {
        let caps = SearchCaps::default();
        let instances: Vec<Instance> = (1..=3)
            .map(|q| convergence_instance(4, 2, q))
            .collect();
        let summary =
            pjr_individual_floor_check(&RuleKind::tsd(), &instances, &caps).unwrap();
        assert_eq!(summary.instances_checked, 3);
        assert!(summary.violations.is_empty());
        // The worst ratio across the batch is the q = 1 block group's 1/2.
        assert_eq!(summary.worst_ratio, Some(rat(1, 2)));
    }

    #[test]
    fn no_improving_deviation_means_no_reports() {
        // One round, two voters split 1-1: under approval voting no
        // deviation moves the tie-break, so nobody can gain.
        let instance = convergence_instance(2, 1, 1).truncated(1);
        let reports =
            pom_report(&RuleKind::Av, &instance, &SearchCaps::default()).unwrap();
        assert!(reports.is_empty());
    }
}
