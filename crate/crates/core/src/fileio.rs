//! The JSON instance document: voter count, horizon, per-round alternative
//! lists (their order is the tie-break priority) and approval lists, plus an
//! optional rule block and an optional single-voter deviation block. Voters
//! are labeled 1-based (`v1`..`vn`) in files and 0-based in memory.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    AltSet, AlternativeId, Instance, RoundSpec, VoterId, MAX_ALTERNATIVES, MAX_VOTERS,
};
use crate::rational::{format_rational, parse_rational};
use crate::rules::{AffineMap, ChoiceRule, RuleKind, TsdSpec, WamSpec};

/// Diagnostics carry 1-based round and voter numbers, matching file labels.
#[derive(Debug, Error)]
pub enum FileError {
    #[error("malformed instance document: {0}")]
    Syntax(#[from] serde_json::Error),

    #[error("instance needs at least one voter")]
    NoVoters,

    #[error("instance supports at most {max} voters, found {n}")]
    TooManyVoters { n: usize, max: usize },

    #[error("instance needs at least one round")]
    NoRounds,

    #[error("declared {declared} rounds but listed {actual}")]
    RoundCountMismatch { declared: usize, actual: usize },

    #[error("round {round}: no alternatives")]
    NoAlternatives { round: usize },

    #[error("round {round}: at most {max} alternatives are supported")]
    TooManyAlternatives { round: usize, max: usize },

    #[error("round {round}: duplicate alternative '{label}'")]
    DuplicateAlternative { round: usize, label: String },

    #[error("round {round}: empty alternative label")]
    EmptyAlternativeLabel { round: usize },

    #[error("round {round}: expected {expected} approval lists, found {actual}")]
    ApprovalRowsMismatch {
        round: usize,
        expected: usize,
        actual: usize,
    },

    #[error("round {round}: voter v{voter} has an empty approval set")]
    EmptyApprovals { round: usize, voter: usize },

    #[error("round {round}: voter v{voter} approves unknown alternative '{label}'")]
    UnknownApproval {
        round: usize,
        voter: usize,
        label: String,
    },

    #[error("deviation: bad voter label '{0}' (expected v1..vn)")]
    BadVoterLabel(String),

    #[error("deviation: voter v{voter} out of range for {n} voters")]
    DeviationVoterRange { voter: usize, n: usize },

    #[error("deviation: expected {expected} rounds of approvals, found {actual}")]
    DeviationLength { expected: usize, actual: usize },

    #[error("deviation round {round}: empty approval set")]
    DeviationEmpty { round: usize },

    #[error("deviation round {round}: unknown alternative '{label}'")]
    DeviationUnknown { round: usize, label: String },

    #[error("rule: bad rational '{0}'")]
    BadRational(String),

    #[error("rule: bad permutation entry {entry} (expected 1..={n})")]
    BadPermutationEntry { entry: usize, n: usize },

    #[error("rule: bad choice '{0}' (expected \"first\" or \"last\")")]
    BadChoice(String),

    #[error("rule: {0}")]
    BadRule(String),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub n: usize,
    pub t: usize,
    pub rounds: Vec<RoundFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<RuleFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deviation: Option<DeviationFile>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct RoundFile {
    pub alternatives: Vec<String>,
    pub approvals: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct DeviationFile {
    /// 1-based voter label, e.g. `"v3"`.
    pub voter: String,
    pub approvals: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct AffineMapFile {
    pub scale: String,
    pub offset: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RuleFile {
    Av,
    Greedyjr,
    WamUnitGain,
    WamResetGrow,
    Wam {
        winner_update: AffineMapFile,
        loser_update: AffineMapFile,
        initial_weight: String,
    },
    Mes {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        horizon: Option<usize>,
    },
    Phragmen,
    Tsd {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        permutation: Option<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        choice: Option<String>,
    },
    IrrelevantDictator,
}

/// A parsed and validated document.
#[derive(Clone, Debug)]
pub struct LoadedInstance {
    pub instance: Instance,
    pub rule: Option<RuleKind>,
    pub deviation: Option<Deviation>,
}

/// A single voter's replacement approvals for every round.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Deviation {
    pub voter: VoterId,
    pub approvals: Vec<AltSet>,
}

fn parse_map(file: &AffineMapFile) -> Result<AffineMap, FileError> {
    let scale =
        parse_rational(&file.scale).ok_or_else(|| FileError::BadRational(file.scale.clone()))?;
    let offset =
        parse_rational(&file.offset).ok_or_else(|| FileError::BadRational(file.offset.clone()))?;
    Ok(AffineMap { scale, offset })
}

fn rule_from_file(file: &RuleFile, n: usize) -> Result<RuleKind, FileError> {
    match file {
        RuleFile::Av => Ok(RuleKind::Av),
        RuleFile::Greedyjr => Ok(RuleKind::GreedyJr),
        RuleFile::WamUnitGain => Ok(RuleKind::WamUnitGain),
        RuleFile::WamResetGrow => Ok(RuleKind::WamResetGrow),
        RuleFile::Wam {
            winner_update,
            loser_update,
            initial_weight,
        } => {
            let spec = WamSpec {
                winner_update: parse_map(winner_update)?,
                loser_update: parse_map(loser_update)?,
                initial_weight: parse_rational(initial_weight)
                    .ok_or_else(|| FileError::BadRational(initial_weight.clone()))?,
            };
            spec.validate().map_err(|e| FileError::BadRule(e.to_string()))?;
            Ok(RuleKind::Wam(spec))
        }
        RuleFile::Mes { horizon } => Ok(RuleKind::Mes { horizon: *horizon }),
        RuleFile::Phragmen => Ok(RuleKind::PerpetualPhragmen),
        RuleFile::Tsd {
            permutation,
            choice,
        } => {
            let permutation = permutation
                .as_ref()
                .map(|entries| {
                    entries
                        .iter()
                        .map(|&entry| {
                            if entry == 0 || entry > n {
                                Err(FileError::BadPermutationEntry { entry, n })
                            } else {
                                Ok(entry - 1)
                            }
                        })
                        .collect::<Result<Vec<usize>, FileError>>()
                })
                .transpose()?;
            let choice = match choice.as_deref() {
                None | Some("first") => ChoiceRule::First,
                Some("last") => ChoiceRule::Last,
                Some(other) => return Err(FileError::BadChoice(other.to_string())),
            };
            let spec = TsdSpec {
                permutation,
                choice,
            };
            spec.validate(n).map_err(|e| FileError::BadRule(e.to_string()))?;
            Ok(RuleKind::Tsd(spec))
        }
        RuleFile::IrrelevantDictator => Ok(RuleKind::IrrelevantDictator),
    }
}

fn rule_to_file(kind: &RuleKind) -> RuleFile {
    match kind {
        RuleKind::Av => RuleFile::Av,
        RuleKind::GreedyJr => RuleFile::Greedyjr,
        RuleKind::WamUnitGain => RuleFile::WamUnitGain,
        RuleKind::WamResetGrow => RuleFile::WamResetGrow,
        RuleKind::Wam(spec) => RuleFile::Wam {
            winner_update: AffineMapFile {
                scale: format_rational(&spec.winner_update.scale),
                offset: format_rational(&spec.winner_update.offset),
            },
            loser_update: AffineMapFile {
                scale: format_rational(&spec.loser_update.scale),
                offset: format_rational(&spec.loser_update.offset),
            },
            initial_weight: format_rational(&spec.initial_weight),
        },
        RuleKind::Mes { horizon } => RuleFile::Mes { horizon: *horizon },
        RuleKind::PerpetualPhragmen => RuleFile::Phragmen,
        RuleKind::Tsd(spec) => RuleFile::Tsd {
            permutation: spec
                .permutation
                .as_ref()
                .map(|p| p.iter().map(|v| v + 1).collect()),
            choice: match spec.choice {
                ChoiceRule::First => None,
                ChoiceRule::Last => Some("last".to_string()),
            },
        },
        RuleKind::IrrelevantDictator => RuleFile::IrrelevantDictator,
    }
}

fn labels_to_set(
    labels: &[String],
    round: &RoundSpec,
    on_unknown: impl Fn(&str) -> FileError,
) -> Result<AltSet, FileError> {
    let mut set = AltSet::EMPTY;
    for label in labels {
        let index = round
            .index_of(label)
            .ok_or_else(|| on_unknown(label))?;
        set = set.insert(index);
    }
    Ok(set)
}

/// Validates the document shape and builds the in-memory instance.
pub fn instance_from_file(file: &InstanceFile) -> Result<LoadedInstance, FileError> {
    if file.n == 0 {
        return Err(FileError::NoVoters);
    }
    if file.n > MAX_VOTERS {
        return Err(FileError::TooManyVoters {
            n: file.n,
            max: MAX_VOTERS,
        });
    }
    if file.rounds.is_empty() {
        return Err(FileError::NoRounds);
    }
    if file.t != file.rounds.len() {
        return Err(FileError::RoundCountMismatch {
            declared: file.t,
            actual: file.rounds.len(),
        });
    }

    let mut rounds = Vec::with_capacity(file.rounds.len());
    for (index, round_file) in file.rounds.iter().enumerate() {
        let round_no = index + 1;
        if round_file.alternatives.is_empty() {
            return Err(FileError::NoAlternatives { round: round_no });
        }
        if round_file.alternatives.len() > MAX_ALTERNATIVES {
            return Err(FileError::TooManyAlternatives {
                round: round_no,
                max: MAX_ALTERNATIVES,
            });
        }
        let mut alternatives = Vec::with_capacity(round_file.alternatives.len());
        for label in &round_file.alternatives {
            if label.is_empty() {
                return Err(FileError::EmptyAlternativeLabel { round: round_no });
            }
            if alternatives.iter().any(|a: &AlternativeId| a.as_str() == label) {
                return Err(FileError::DuplicateAlternative {
                    round: round_no,
                    label: label.clone(),
                });
            }
            alternatives.push(AlternativeId::new(label.clone()));
        }
        if round_file.approvals.len() != file.n {
            return Err(FileError::ApprovalRowsMismatch {
                round: round_no,
                expected: file.n,
                actual: round_file.approvals.len(),
            });
        }
        let round = RoundSpec {
            alternatives,
            approvals: Vec::new(),
        };
        let mut approvals = Vec::with_capacity(file.n);
        for (voter, labels) in round_file.approvals.iter().enumerate() {
            let set = labels_to_set(labels, &round, |label| FileError::UnknownApproval {
                round: round_no,
                voter: voter + 1,
                label: label.to_string(),
            })?;
            if set.is_empty() {
                return Err(FileError::EmptyApprovals {
                    round: round_no,
                    voter: voter + 1,
                });
            }
            approvals.push(set);
        }
        rounds.push(RoundSpec {
            approvals,
            ..round
        });
    }

    let instance = Instance::new(file.n, rounds)
        .expect("validation above covers the structural invariants");

    let rule = file
        .rule
        .as_ref()
        .map(|r| rule_from_file(r, file.n))
        .transpose()?;

    let deviation = file
        .deviation
        .as_ref()
        .map(|d| {
            let voter = VoterId::from_label(&d.voter)
                .ok_or_else(|| FileError::BadVoterLabel(d.voter.clone()))?;
            if voter.0 >= file.n {
                return Err(FileError::DeviationVoterRange {
                    voter: voter.0 + 1,
                    n: file.n,
                });
            }
            if d.approvals.len() != instance.round_count() {
                return Err(FileError::DeviationLength {
                    expected: instance.round_count(),
                    actual: d.approvals.len(),
                });
            }
            let mut approvals = Vec::with_capacity(d.approvals.len());
            for (index, labels) in d.approvals.iter().enumerate() {
                let round_no = index + 1;
                let set = labels_to_set(
                    labels,
                    instance.round(index).expect("round exists"),
                    |label| FileError::DeviationUnknown {
                        round: round_no,
                        label: label.to_string(),
                    },
                )?;
                if set.is_empty() {
                    return Err(FileError::DeviationEmpty { round: round_no });
                }
                approvals.push(set);
            }
            Ok(Deviation { voter, approvals })
        })
        .transpose()?;

    Ok(LoadedInstance {
        instance,
        rule,
        deviation,
    })
}

/// Parses a JSON document. Unknown fields are rejected.
pub fn parse_instance(text: &str) -> Result<LoadedInstance, FileError> {
    let file: InstanceFile = serde_json::from_str(text)?;
    instance_from_file(&file)
}

fn set_to_labels(set: AltSet, round: &RoundSpec) -> Vec<String> {
    set.iter().map(|i| round.label(i).0.clone()).collect()
}

/// Rebuilds the document from an in-memory instance.
pub fn instance_to_file(
    instance: &Instance,
    rule: Option<&RuleKind>,
    deviation: Option<&Deviation>,
) -> InstanceFile {
    InstanceFile {
        n: instance.voter_count(),
        t: instance.round_count(),
        rounds: instance
            .rounds()
            .iter()
            .map(|round| RoundFile {
                alternatives: round.alternatives.iter().map(|a| a.0.clone()).collect(),
                approvals: round
                    .approvals
                    .iter()
                    .map(|&set| set_to_labels(set, round))
                    .collect(),
            })
            .collect(),
        rule: rule.map(rule_to_file),
        deviation: deviation.map(|d| DeviationFile {
            voter: d.voter.label(),
            approvals: d
                .approvals
                .iter()
                .zip(instance.rounds())
                .map(|(&set, round)| set_to_labels(set, round))
                .collect(),
        }),
    }
}

/// Canonical serialization: pretty JSON with a trailing newline. Canonical
/// documents round-trip byte-identically through parse + serialize.
pub fn serialize_instance(
    instance: &Instance,
    rule: Option<&RuleKind>,
    deviation: Option<&Deviation>,
) -> String {
    let file = instance_to_file(instance, rule, deviation);
    let mut text = serde_json::to_string_pretty(&file).expect("instance files serialize");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn fixture_shapes_parse_as_expected() {
        let loaded = parse_instance(fixtures::find("greedyjr_nonSP").unwrap().json).unwrap();
        assert_eq!(loaded.instance.voter_count(), 5);
        assert_eq!(loaded.instance.round_count(), 2);
        let labels: Vec<&str> = loaded.instance.round(0).unwrap().alternatives
            .iter()
            .map(|a| a.as_str())
            .collect();
        assert_eq!(labels, ["c1", "c3", "c2", "c4"]);
        assert_eq!(loaded.rule, Some(RuleKind::GreedyJr));
        let deviation = loaded.deviation.unwrap();
        assert_eq!(deviation.voter, VoterId(2));

        let loaded = parse_instance(fixtures::find("mes_nonSP").unwrap().json).unwrap();
        assert_eq!(loaded.instance.voter_count(), 3);
        assert_eq!(loaded.instance.round_count(), 4);
    }

    #[test]
    fn diagnostics_name_the_location() {
        let text = r#"{"n":2,"t":1,"rounds":[{"alternatives":["a","b"],"approvals":[["a"],[]]}]}"#;
        let err = parse_instance(text).unwrap_err();
        assert!(matches!(err, FileError::EmptyApprovals { round: 1, voter: 2 }));
        assert_eq!(err.to_string(), "round 1: voter v2 has an empty approval set");

        let text = r#"{"n":1,"t":1,"rounds":[{"alternatives":["a"],"approvals":[["z"]]}]}"#;
        assert!(matches!(
            parse_instance(text).unwrap_err(),
            FileError::UnknownApproval { round: 1, voter: 1, .. }
        ));

        let text = r#"{"n":1,"t":2,"rounds":[{"alternatives":["a"],"approvals":[["a"]]}]}"#;
        assert!(matches!(
            parse_instance(text).unwrap_err(),
            FileError::RoundCountMismatch { declared: 2, actual: 1 }
        ));

        let text = r#"{"n":2,"t":1,"rounds":[{"alternatives":["a"],"approvals":[["a"]]}]}"#;
        assert!(matches!(
            parse_instance(text).unwrap_err(),
            FileError::ApprovalRowsMismatch { round: 1, expected: 2, actual: 1 }
        ));

        let text = r#"{"n":1,"t":1,"rounds":[{"alternatives":["a","a"],"approvals":[["a"]]}]}"#;
        assert!(matches!(
            parse_instance(text).unwrap_err(),
            FileError::DuplicateAlternative { round: 1, .. }
        ));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = r#"{"n":1,"t":1,"rounds":[{"alternatives":["a"],"approvals":[["a"]]}],"extra":1}"#;
        assert!(matches!(parse_instance(text), Err(FileError::Syntax(_))));
    }

    #[test]
    fn deviation_validation() {
        let base = r#"{"n":2,"t":1,"rounds":[{"alternatives":["a","b"],"approvals":[["a"],["b"]]}],"deviation":DEV}"#;
        let cases = [
            (r#"{"voter":"x1","approvals":[["a"]]}"#, "bad voter label"),
            (r#"{"voter":"v3","approvals":[["a"]]}"#, "voter out of range"),
            (r#"{"voter":"v1","approvals":[["a"],["a"]]}"#, "length mismatch"),
            (r#"{"voter":"v1","approvals":[[]]}"#, "empty deviation round"),
            (r#"{"voter":"v1","approvals":[["z"]]}"#, "unknown alternative"),
        ];
        for (dev, what) in cases {
            let text = base.replace("DEV", dev);
            assert!(parse_instance(&text).is_err(), "{what} accepted");
        }
        let ok = base.replace("DEV", r#"{"voter":"v2","approvals":[["a","b"]]}"#);
        let loaded = parse_instance(&ok).unwrap();
        assert_eq!(
            loaded.deviation,
            Some(Deviation {
                voter: VoterId(1),
                approvals: vec![AltSet(0b11)],
            })
        );
    }

    #[test]
    fn canonical_serialization_round_trips_byte_identically() {
        for fixture in fixtures::FIXTURES {
            let first = parse_instance(fixture.json).unwrap();
            let canonical = serialize_instance(
                &first.instance,
                first.rule.as_ref(),
                first.deviation.as_ref(),
            );
            let second = parse_instance(&canonical).unwrap();
            let again = serialize_instance(
                &second.instance,
                second.rule.as_ref(),
                second.deviation.as_ref(),
            );
            assert_eq!(canonical, again, "{} does not round-trip", fixture.name);
        }
    }

    #[test]
    fn rule_blocks_round_trip() {
        let text = r#"{
            "n": 3, "t": 1,
            "rounds": [{"alternatives": ["a"], "approvals": [["a"], ["a"], ["a"]]}],
            "rule": {"kind": "tsd", "permutation": [3, 1, 2], "choice": "last"}
        }"#;
        let loaded = parse_instance(text).unwrap();
        let RuleKind::Tsd(spec) = loaded.rule.clone().unwrap() else {
            panic!("expected a dictatorship rule");
        };
        assert_eq!(spec.permutation, Some(vec![2, 0, 1]));
        assert_eq!(spec.choice, ChoiceRule::Last);
        let round_tripped = instance_to_file(
            &loaded.instance,
            loaded.rule.as_ref(),
            None,
        );
        assert_eq!(
            round_tripped.rule,
            Some(RuleFile::Tsd {
                permutation: Some(vec![3, 1, 2]),
                choice: Some("last".to_string()),
            })
        );

        let text = r#"{
            "n": 1, "t": 1,
            "rounds": [{"alternatives": ["a"], "approvals": [["a"]]}],
            "rule": {"kind": "wam",
                     "winner_update": {"scale": "0", "offset": "0"},
                     "loser_update": {"scale": "1", "offset": "1/2"},
                     "initial_weight": "1"}
        }"#;
        let loaded = parse_instance(text).unwrap();
        assert!(matches!(loaded.rule, Some(RuleKind::Wam(_))));

        // An invalid catalog entry is rejected at parse time.
        let text = text.replace("\"offset\": \"1/2\"", "\"offset\": \"-1/2\"");
        assert!(matches!(parse_instance(&text), Err(FileError::BadRule(_))));
    }
}
