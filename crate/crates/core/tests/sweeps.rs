//! Randomized sweeps backing the rule-level claims that are not part of the
//! acceptance suite: audit lattice consistency, the individual satisfaction
//! floor, and the group floors on the bundled free-riding example.

use tempvote::audit::implication_matrix;
use tempvote::fixtures;
use tempvote::generate::{generate_batch, generate_random};
use tempvote::model::{VoterGroup, DEFAULT_GROUP_CAP};
use tempvote::pom::{pjr_individual_floor_check, pom_report};
use tempvote::rational::rat;
use tempvote::rules::RuleKind;
use tempvote::strategy::SearchCaps;
use tempvote::run;

#[test]
fn audit_lattice_is_consistent_on_random_runs() {
    // implication_matrix errors out if the observed flags ever break
    // EJR => PJR => JR or strong => weak.
    for seed in 0..100u64 {
        let n = 1 + (seed % 4) as usize;
        let t = 1 + ((seed / 4) % 4) as usize;
        let instance = generate_random(n, t, 3, seed);
        for kind in [RuleKind::PerpetualPhragmen, RuleKind::mes(), RuleKind::tsd()] {
            let outcomes = run(&kind, &instance).unwrap();
            let matrix = implication_matrix(&instance, &outcomes, DEFAULT_GROUP_CAP)
                .expect("lattice violations are impossible");
            // The strong chain restated on the flags.
            use tempvote::audit::Axiom::*;
            assert!(!matrix.passed(Ejr) || matrix.passed(Pjr));
            assert!(!matrix.passed(Pjr) || matrix.passed(Jr));
        }
    }
}

#[test]
fn individual_floor_holds_for_the_load_balancer() {
    // Three full cycles: every voter is owed at least 3 rounds.
    let caps = SearchCaps::default();
    let instances = generate_batch(3, 9, 3, (0, 49));
    let summary =
        pjr_individual_floor_check(&RuleKind::PerpetualPhragmen, &instances, &caps).unwrap();
    assert_eq!(summary.instances_checked, 50);
    assert!(
        summary.violations.is_empty(),
        "voters below the cycle floor: {:?}",
        summary.violations
    );
    // q = 3, largest group size 3: the benchmark ratio never drops below
    // q / ((q+1) * |G|) = 3/12.
    assert!(summary.worst_ratio.unwrap() >= rat(3, 12));
}

#[test]
fn free_riding_fixture_keeps_the_block_satisfied() {
    let loaded = fixtures::load("phragmen_nonSP").unwrap().unwrap();
    let reports = pom_report(
        &RuleKind::PerpetualPhragmen,
        &loaded.instance,
        &SearchCaps::default(),
    )
    .unwrap();
    let v3_report = reports
        .iter()
        .find(|r| r.manipulator == tempvote::VoterId(2))
        .expect("the free rider has an improving deviation");
    // The full group shares the round-1 alternative: level 1, owed 1, and it
    // stays satisfied after the manipulation.
    let full = VoterGroup::from_members(&[0, 1, 2]);
    let row = v3_report
        .rows
        .iter()
        .find(|r| r.group == full)
        .expect("row for the full group");
    assert_eq!(row.level, 1);
    assert_eq!(row.pjr_bound, 1);
    assert!(row.manipulated_sat >= 1);
    assert!(row.jr_ok);
}
