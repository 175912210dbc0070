//! JSON report documents. Field order is declaration order and every value
//! is pure data, so a command with fixed inputs emits identical bytes on
//! every run.

use serde::Serialize;

use tempvote::audit::AuditReport;
use tempvote::fileio::InstanceFile;
use tempvote::model::{Instance, OutcomeSequence, VoterGroup};
use tempvote::pom::{ConvergencePoint, PomReport};
use tempvote::rational::format_rational;
use tempvote::strategy::{EditWitness, ManipulationFinding, PropertyVerdict};

pub fn winner_labels(instance: &Instance, outcomes: &OutcomeSequence) -> Vec<Option<String>> {
    outcomes
        .labels(instance)
        .iter()
        .map(|w| w.map(|a| a.to_string()))
        .collect()
}

pub fn group_labels(group: VoterGroup) -> Vec<String> {
    group.members().iter().map(|v| v.label()).collect()
}

#[derive(Serialize)]
pub struct CapsReport {
    pub groups: usize,
    pub strategies: u64,
}

#[derive(Serialize)]
pub struct SweepParams {
    pub seeds: String,
    pub n: usize,
    pub t: usize,
    pub max_alts: usize,
}

#[derive(Serialize)]
pub struct RunReport {
    pub command: &'static str,
    pub rule: String,
    pub instance: String,
    pub winners: Vec<Option<String>>,
    /// Per-voter satisfaction in index order (v1 first).
    pub satisfaction: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deviation: Option<DeviationReport>,
}

#[derive(Serialize)]
pub struct DeviationReport {
    pub voter: String,
    pub approvals: Vec<Vec<String>>,
    pub winners: Vec<Option<String>>,
    pub truthful_satisfaction: usize,
    pub deviated_satisfaction: usize,
}

#[derive(Serialize)]
pub struct AuditRowReport {
    pub group: Vec<String>,
    pub level: usize,
    pub bound: usize,
    pub achieved: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    pub pass: bool,
}

#[derive(Serialize)]
pub struct AuditFileReport {
    pub command: &'static str,
    pub axiom: String,
    pub rule: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepParams>,
    pub caps: CapsReport,
    pub instances_checked: usize,
    pub pass: bool,
    /// Single-instance mode: every audited row. Sweep mode: failing rows
    /// only, tagged by seed.
    pub rows: Vec<AuditRowReport>,
    pub failures: Vec<SweepFailure>,
}

#[derive(Serialize)]
pub struct SweepFailure {
    pub seed: u64,
    pub rows: Vec<AuditRowReport>,
}

pub fn audit_rows(report: &AuditReport) -> Vec<AuditRowReport> {
    report
        .rows
        .iter()
        .map(|row| AuditRowReport {
            group: group_labels(row.group),
            level: row.level,
            bound: row.bound,
            achieved: row.achieved,
            witness: row.witness.map(|v| v.label()),
            pass: row.pass,
        })
        .collect()
}

#[derive(Serialize)]
pub struct EditWitnessReport {
    pub round: usize,
    pub voter: String,
    pub alternative: String,
    pub original_winner: Option<String>,
    pub new_winner: Option<String>,
    /// The edited instance; replaying `run` on it reproduces `new_winner`.
    pub instance: InstanceFile,
}

#[derive(Serialize)]
pub struct FindingReport {
    pub voter: String,
    pub deviation: Vec<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub round: Option<usize>,
    pub truthful_satisfaction: usize,
    pub manipulated_satisfaction: usize,
    pub truthful_winners: Vec<Option<String>>,
    pub manipulated_winners: Vec<Option<String>>,
    /// The instance plus deviation block; replayable with `run`.
    pub witness: InstanceFile,
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WitnessReport {
    Edit(EditWitnessReport),
    Strategy(FindingReport),
}

#[derive(Serialize)]
pub struct CheckReport {
    pub command: &'static str,
    pub property: String,
    pub rule: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepParams>,
    pub caps: CapsReport,
    pub instances_checked: usize,
    pub candidates_checked: u64,
    pub verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violated_seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessReport>,
}

#[derive(Serialize)]
pub struct ManipulateReport {
    pub command: &'static str,
    pub rule: String,
    pub instance: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub voter: Option<String>,
    pub caps: CapsReport,
    pub strategy_space: u64,
    pub verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub finding: Option<FindingReport>,
}

#[derive(Serialize)]
pub struct PomRowReport {
    pub group: Vec<String>,
    pub level: usize,
    pub pjr_bound: usize,
    pub manipulated_satisfaction: usize,
    pub contains_manipulator: bool,
    pub jr_ok: bool,
    pub pjr_floor: usize,
    pub pjr_ok: bool,
}

#[derive(Serialize)]
pub struct PomVoterReport {
    pub manipulator: String,
    pub deviation: Vec<Vec<String>>,
    pub truthful_satisfaction: usize,
    pub manipulated_satisfaction: usize,
    pub all_jr_ok: bool,
    pub all_pjr_ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_ratio: Option<String>,
    pub rows: Vec<PomRowReport>,
}

#[derive(Serialize)]
pub struct PomFileReport {
    pub command: &'static str,
    pub rule: String,
    pub instance: String,
    pub caps: CapsReport,
    pub reports: Vec<PomVoterReport>,
    pub all_jr_ok: bool,
    pub all_pjr_ok: bool,
}

pub fn pom_voter_report(instance: &Instance, report: &PomReport) -> PomVoterReport {
    PomVoterReport {
        manipulator: report.manipulator.label(),
        deviation: deviation_labels(instance, &report.deviation),
        truthful_satisfaction: report.truthful_sat,
        manipulated_satisfaction: report.manipulated_sat,
        all_jr_ok: report.all_jr_ok,
        all_pjr_ok: report.all_pjr_ok,
        min_ratio: report.min_ratio.as_ref().map(format_rational),
        rows: report
            .rows
            .iter()
            .map(|row| PomRowReport {
                group: group_labels(row.group),
                level: row.level,
                pjr_bound: row.pjr_bound,
                manipulated_satisfaction: row.manipulated_sat,
                contains_manipulator: row.contains_manipulator,
                jr_ok: row.jr_ok,
                pjr_floor: row.pjr_floor,
                pjr_ok: row.pjr_ok,
            })
            .collect(),
    }
}

pub fn deviation_labels(
    instance: &Instance,
    sets: &[tempvote::model::AltSet],
) -> Vec<Vec<String>> {
    sets.iter()
        .enumerate()
        .map(|(t, set)| {
            let round = instance.round(t).expect("deviation rounds exist");
            set.iter().map(|i| round.label(i).to_string()).collect()
        })
        .collect()
}

pub fn convergence_csv(n: usize, points: &[ConvergencePoint]) -> String {
    let mut csv = String::from("n,t,q,ratio_num,ratio_den\n");
    for point in points {
        csv.push_str(&format!(
            "{n},{},{},{},{}\n",
            point.t,
            point.q,
            point.ratio.numer(),
            point.ratio.denom()
        ));
    }
    csv
}

/// Renders a library verdict into report parts: (verdict word, witness).
pub fn witness_report(
    instance: &Instance,
    rule: &tempvote::RuleKind,
    verdict: &PropertyVerdict,
) -> (&'static str, Option<WitnessReport>) {
    match verdict {
        PropertyVerdict::Holds { .. } => ("holds", None),
        PropertyVerdict::ViolatedEdit { witness, .. } => {
            ("violated", Some(edit_witness_report(instance, rule, witness)))
        }
        PropertyVerdict::ViolatedStrategy { witness, .. } => (
            "violated",
            Some(WitnessReport::Strategy(finding_report(
                instance, rule, witness,
            ))),
        ),
    }
}

fn edit_witness_report(
    instance: &Instance,
    rule: &tempvote::RuleKind,
    witness: &EditWitness,
) -> WitnessReport {
    let round = instance.round(witness.round).expect("witness round exists");
    let label = |w: Option<u32>| w.map(|i| round.label(i).to_string());
    let ballot = round.approval_set(witness.voter);
    let edited_set = if ballot.contains(witness.alternative) {
        ballot.remove(witness.alternative)
    } else {
        ballot.insert(witness.alternative)
    };
    let edited = instance.with_approvals(witness.round, witness.voter, edited_set);
    WitnessReport::Edit(EditWitnessReport {
        round: witness.round + 1,
        voter: witness.voter.label(),
        alternative: round.label(witness.alternative).to_string(),
        original_winner: label(witness.original_winner),
        new_winner: label(witness.new_winner),
        instance: tempvote::fileio::instance_to_file(&edited, Some(rule), None),
    })
}

pub fn finding_report(
    instance: &Instance,
    rule: &tempvote::RuleKind,
    finding: &ManipulationFinding,
) -> FindingReport {
    let deviation = tempvote::fileio::Deviation {
        voter: finding.voter,
        approvals: finding.deviation.clone(),
    };
    // Online findings deviate a prefix; pad with truthful approvals so the
    // witness document always covers the whole horizon.
    let full: Vec<tempvote::model::AltSet> = (0..instance.round_count())
        .map(|t| {
            finding
                .deviation
                .get(t)
                .copied()
                .unwrap_or_else(|| instance.rounds()[t].approval_set(finding.voter))
        })
        .collect();
    let witness_deviation = tempvote::fileio::Deviation {
        voter: finding.voter,
        approvals: full,
    };
    FindingReport {
        voter: finding.voter.label(),
        deviation: deviation_labels(instance, &deviation.approvals),
        round: finding.round.map(|t| t + 1),
        truthful_satisfaction: finding.truthful_sat,
        manipulated_satisfaction: finding.manipulated_sat,
        truthful_winners: winner_labels(instance, &finding.truthful_outcomes),
        manipulated_winners: winner_labels(instance, &finding.manipulated_outcomes),
        witness: tempvote::fileio::instance_to_file(instance, Some(rule), Some(&witness_deviation)),
    }
}
