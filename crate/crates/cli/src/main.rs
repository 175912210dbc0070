//! Command-line driver: run rules, audit proportionality, check
//! game-theoretic properties, search for manipulations, and generate seeded
//! instances.
//!
//! Exit codes: 0 when the property holds or the audit passes, 2 when a
//! violation was found (the report carries a replayable witness), 1 for
//! usage or parse errors.

mod report;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use report::*;
use tempvote::audit::{audit, Axiom};
use tempvote::fileio::{parse_instance, serialize_instance, Deviation, LoadedInstance};
use tempvote::fixtures;
use tempvote::generate::generate_random;
use tempvote::model::{Instance, VoterId};
use tempvote::pom::{pom_report, tsd_convergence};
use tempvote::rational::{format_rational, parse_rational};
use tempvote::rules::RuleKind;
use tempvote::strategy::{
    check_monotonicity, check_oiia, check_oiia_addition, check_osp, find_sp_violation, Property,
    PropertyVerdict, SearchCaps,
};
use tempvote::run;

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_VIOLATION: u8 = 2;

#[derive(Parser)]
#[command(
    name = "tempvote",
    about = "Online temporal approval voting: rules, audits, and manipulation search",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CapArgs {
    /// Largest voter count for exhaustive group enumeration.
    #[arg(long = "cap-groups", default_value_t = 16)]
    cap_groups: usize,
    /// Largest per-voter deviation space for strategy searches.
    #[arg(long = "cap-strategies", default_value_t = 1_000_000)]
    cap_strategies: u64,
}

impl CapArgs {
    fn caps(&self) -> SearchCaps {
        SearchCaps {
            groups: self.cap_groups,
            strategies: self.cap_strategies,
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    /// Inclusive seed range `a..b` for generated instances.
    #[arg(long)]
    seeds: Option<String>,
    /// Voters per generated instance.
    #[arg(long, default_value_t = 4)]
    n: usize,
    /// Rounds per generated instance.
    #[arg(long, default_value_t = 4)]
    t: usize,
    /// Upper bound on alternatives per round.
    #[arg(long = "max-alts", default_value_t = 3)]
    max_alts: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Run a rule over an instance; reports winners and satisfaction, and
    /// replays the instance's deviation block when present.
    Run {
        #[arg(long)]
        rule: Option<String>,
        /// Path to an instance document, or a bundled fixture name.
        #[arg(long)]
        instance: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Audit a proportionality axiom against a rule's outcomes.
    Audit {
        #[arg(long)]
        axiom: String,
        #[arg(long)]
        rule: Option<String>,
        #[arg(long)]
        instance: Option<String>,
        #[command(flatten)]
        sweep: SweepArgs,
        #[command(flatten)]
        caps: CapArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a game-theoretic property on one instance or a seed sweep.
    Check {
        /// monotonicity | oiia | oiia-addition | osp | sp
        #[arg(long)]
        property: String,
        #[arg(long)]
        rule: Option<String>,
        #[arg(long)]
        instance: Option<String>,
        #[command(flatten)]
        sweep: SweepArgs,
        #[command(flatten)]
        caps: CapArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustively search for a strictly improving deviation.
    Manipulate {
        #[arg(long)]
        rule: Option<String>,
        #[arg(long)]
        instance: String,
        /// Restrict the search to one voter (label, e.g. `v3`).
        #[arg(long)]
        voter: Option<String>,
        #[command(flatten)]
        caps: CapArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Grade every truthfully-cohesive group after each voter's best
    /// improving deviation.
    Pom {
        #[arg(long)]
        rule: Option<String>,
        #[arg(long)]
        instance: String,
        #[command(flatten)]
        caps: CapArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convergence series of the round-robin dictatorship, as CSV.
    Converge {
        #[arg(long, default_value_t = 6)]
        n: usize,
        /// Cohesive-block size as a fraction of n.
        #[arg(long, default_value = "1/2")]
        fraction: String,
        #[arg(long = "q-max", default_value_t = 10)]
        q_max: usize,
        #[command(flatten)]
        caps: CapArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a seeded random instance document.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        t: usize,
        #[arg(long = "max-alts", default_value_t = 3)]
        max_alts: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List bundled fixtures or extract one to a file.
    Fixtures {
        /// Fixture to extract; omit to list all.
        name: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap help/version are not usage errors.
            use clap::error::ErrorKind;
            let _ = err.print();
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::from(EXIT_OK),
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn dispatch(command: Command) -> Result<u8> {
    match command {
        Command::Run {
            rule,
            instance,
            out,
        } => cmd_run(rule.as_deref(), &instance, out),
        Command::Audit {
            axiom,
            rule,
            instance,
            sweep,
            caps,
            out,
        } => cmd_audit(&axiom, rule.as_deref(), instance.as_deref(), &sweep, &caps, out),
        Command::Check {
            property,
            rule,
            instance,
            sweep,
            caps,
            out,
        } => cmd_check(
            &property,
            rule.as_deref(),
            instance.as_deref(),
            &sweep,
            &caps,
            out,
        ),
        Command::Manipulate {
            rule,
            instance,
            voter,
            caps,
            out,
        } => cmd_manipulate(rule.as_deref(), &instance, voter.as_deref(), &caps, out),
        Command::Pom {
            rule,
            instance,
            caps,
            out,
        } => cmd_pom(rule.as_deref(), &instance, &caps, out),
        Command::Converge {
            n,
            fraction,
            q_max,
            caps,
            out,
        } => cmd_converge(n, &fraction, q_max, &caps, out),
        Command::Gen {
            n,
            t,
            max_alts,
            seed,
            out,
        } => cmd_gen(n, t, max_alts, seed, out),
        Command::Fixtures { name, out } => cmd_fixtures(name.as_deref(), out),
    }
}

/// Resolves `--instance` as a file path first, then as a fixture name.
fn load_instance(spec: &str) -> Result<LoadedInstance> {
    let text = if std::path::Path::new(spec).is_file() {
        fs::read_to_string(spec).with_context(|| format!("reading {spec}"))?
    } else if let Some(fixture) = fixtures::find(spec) {
        fixture.json.to_string()
    } else {
        bail!("no instance file or bundled fixture named '{spec}'");
    };
    parse_instance(&text).map_err(|e| anyhow!("{spec}: {e}"))
}

/// `--rule` wins over the instance file's rule block.
fn resolve_rule(flag: Option<&str>, loaded: &LoadedInstance) -> Result<RuleKind> {
    match flag {
        Some(name) => {
            RuleKind::parse_name(name).ok_or_else(|| anyhow!("unknown rule '{name}'"))
        }
        None => loaded
            .rule
            .clone()
            .ok_or_else(|| anyhow!("no rule: pass --rule or add a rule block to the instance")),
    }
}

fn parse_seed_range(text: &str) -> Result<(u64, u64)> {
    let (lo, hi) = text
        .split_once("..")
        .ok_or_else(|| anyhow!("bad seed range '{text}', expected a..b (inclusive)"))?;
    let lo: u64 = lo.parse().with_context(|| format!("bad seed '{lo}'"))?;
    let hi: u64 = hi.parse().with_context(|| format!("bad seed '{hi}'"))?;
    if hi < lo {
        bail!("empty seed range '{text}'");
    }
    Ok((lo, hi))
}

fn write_report<T: serde::Serialize>(out: Option<&PathBuf>, report: &T) -> Result<()> {
    if let Some(path) = out {
        let mut text = serde_json::to_string_pretty(report)?;
        text.push('\n');
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn cmd_run(rule_flag: Option<&str>, instance_spec: &str, out: Option<PathBuf>) -> Result<u8> {
    let loaded = load_instance(instance_spec)?;
    let rule = resolve_rule(rule_flag, &loaded)?;
    let outcomes = run(&rule, &loaded.instance)?;
    let winners = winner_labels(&loaded.instance, &outcomes);
    for (t, winner) in winners.iter().enumerate() {
        println!(
            "round {}: {}",
            t + 1,
            winner.as_deref().unwrap_or("(no winner)")
        );
    }
    let satisfaction: Vec<usize> = loaded
        .instance
        .voters()
        .map(|v| loaded.instance.voter_satisfaction(v, &outcomes))
        .collect::<Result<_, _>>()?;
    let sat_line: Vec<String> = satisfaction
        .iter()
        .enumerate()
        .map(|(i, s)| format!("{}={s}", VoterId(i).label()))
        .collect();
    println!("satisfaction: {}", sat_line.join(" "));

    let deviation = match &loaded.deviation {
        Some(Deviation { voter, approvals }) => {
            let deviated = loaded.instance.with_voter_approvals(*voter, approvals);
            let deviated_out = run(&rule, &deviated)?;
            let deviated_winners = winner_labels(&loaded.instance, &deviated_out);
            let truthful_sat = loaded.instance.voter_satisfaction(*voter, &outcomes)?;
            let deviated_sat = loaded.instance.voter_satisfaction(*voter, &deviated_out)?;
            println!(
                "deviation {}: winners {} / satisfaction {} (truthful {})",
                voter.label(),
                deviated_winners
                    .iter()
                    .map(|w| w.as_deref().unwrap_or("(no winner)").to_string())
                    .collect::<Vec<_>>()
                    .join(", "),
                deviated_sat,
                truthful_sat
            );
            Some(DeviationReport {
                voter: voter.label(),
                approvals: deviation_labels(&loaded.instance, approvals),
                winners: deviated_winners,
                truthful_satisfaction: truthful_sat,
                deviated_satisfaction: deviated_sat,
            })
        }
        None => None,
    };

    let report = RunReport {
        command: "run",
        rule: rule.name().to_string(),
        instance: instance_spec.to_string(),
        winners,
        satisfaction,
        deviation,
    };
    write_report(out.as_ref(), &report)?;
    Ok(EXIT_OK)
}

fn cmd_audit(
    axiom_name: &str,
    rule_flag: Option<&str>,
    instance_spec: Option<&str>,
    sweep: &SweepArgs,
    cap_args: &CapArgs,
    out: Option<PathBuf>,
) -> Result<u8> {
    let axiom =
        Axiom::parse_name(axiom_name).ok_or_else(|| anyhow!("unknown axiom '{axiom_name}'"))?;
    let caps = cap_args.caps();

    let (pass, report) = match (instance_spec, &sweep.seeds) {
        (Some(spec), None) => {
            let loaded = load_instance(spec)?;
            let rule = resolve_rule(rule_flag, &loaded)?;
            let outcomes = run(&rule, &loaded.instance)?;
            let audit_report = audit(axiom, &loaded.instance, &outcomes, caps.groups)?;
            println!(
                "audit {axiom_name} on {spec}: {} ({} groups checked, {} rows)",
                if audit_report.pass { "PASS" } else { "FAIL" },
                audit_report.groups_checked,
                audit_report.rows.len()
            );
            for row in audit_report.rows.iter().filter(|r| !r.pass) {
                println!(
                    "  group {{{}}} level {} owed {} achieved {}",
                    group_labels(row.group).join(","),
                    row.level,
                    row.bound,
                    row.achieved
                );
            }
            let pass = audit_report.pass;
            let report = AuditFileReport {
                command: "audit",
                axiom: axiom_name.to_string(),
                rule: rule.name().to_string(),
                instance: Some(spec.to_string()),
                sweep: None,
                caps: CapsReport {
                    groups: caps.groups,
                    strategies: caps.strategies,
                },
                instances_checked: 1,
                pass,
                rows: audit_rows(&audit_report),
                failures: Vec::new(),
            };
            (pass, report)
        }
        (None, Some(seed_text)) => {
            let rule_name =
                rule_flag.ok_or_else(|| anyhow!("sweeps need --rule"))?;
            let rule = RuleKind::parse_name(rule_name)
                .ok_or_else(|| anyhow!("unknown rule '{rule_name}'"))?;
            let (lo, hi) = parse_seed_range(seed_text)?;
            let mut failures = Vec::new();
            let mut checked = 0usize;
            for seed in lo..=hi {
                let instance = generate_random(sweep.n, sweep.t, sweep.max_alts, seed);
                let outcomes = run(&rule, &instance)?;
                let audit_report = audit(axiom, &instance, &outcomes, caps.groups)?;
                checked += 1;
                if !audit_report.pass {
                    failures.push(SweepFailure {
                        seed,
                        rows: audit_rows(&audit_report)
                            .into_iter()
                            .filter(|r| !r.pass)
                            .collect(),
                    });
                }
            }
            let pass = failures.is_empty();
            println!(
                "audit {axiom_name} ({rule_name}) over seeds {seed_text}: {} ({checked} instances, {} failures)",
                if pass { "PASS" } else { "FAIL" },
                failures.len()
            );
            let report = AuditFileReport {
                command: "audit",
                axiom: axiom_name.to_string(),
                rule: rule.name().to_string(),
                instance: None,
                sweep: Some(SweepParams {
                    seeds: seed_text.clone(),
                    n: sweep.n,
                    t: sweep.t,
                    max_alts: sweep.max_alts,
                }),
                caps: CapsReport {
                    groups: caps.groups,
                    strategies: caps.strategies,
                },
                instances_checked: checked,
                pass,
                rows: Vec::new(),
                failures,
            };
            (pass, report)
        }
        _ => bail!("pass exactly one of --instance or --seeds"),
    };

    write_report(out.as_ref(), &report)?;
    Ok(if pass { EXIT_OK } else { EXIT_VIOLATION })
}

fn check_property(
    property: Property,
    rule: &RuleKind,
    instance: &Instance,
    caps: &SearchCaps,
) -> Result<PropertyVerdict> {
    Ok(match property {
        Property::Monotonicity => check_monotonicity(rule, instance)?,
        Property::Oiia => check_oiia(rule, instance)?,
        Property::OiiaAddition => check_oiia_addition(rule, instance)?,
        Property::Osp => check_osp(rule, instance, caps)?,
        Property::Sp => find_sp_violation(rule, instance, None, caps)?,
    })
}

fn cmd_check(
    property_name: &str,
    rule_flag: Option<&str>,
    instance_spec: Option<&str>,
    sweep: &SweepArgs,
    cap_args: &CapArgs,
    out: Option<PathBuf>,
) -> Result<u8> {
    let property = Property::parse_name(property_name)
        .ok_or_else(|| anyhow!("unknown property '{property_name}'"))?;
    let caps = cap_args.caps();

    let mut instances_checked = 0usize;
    let mut candidates_checked = 0u64;
    let mut violation: Option<(Option<u64>, Instance, PropertyVerdict)> = None;
    let mut sweep_report = None;

    let rule_used = match (instance_spec, &sweep.seeds) {
        (Some(spec), None) => {
            let loaded = load_instance(spec)?;
            let rule = resolve_rule(rule_flag, &loaded)?;
            let verdict = check_property(property, &rule, &loaded.instance, &caps)?;
            instances_checked = 1;
            if let PropertyVerdict::Holds { candidates, .. } = &verdict {
                candidates_checked = *candidates;
            } else {
                violation = Some((None, loaded.instance.clone(), verdict));
            }
            rule
        }
        (None, Some(seed_text)) => {
            let rule_name = rule_flag.ok_or_else(|| anyhow!("sweeps need --rule"))?;
            let rule = RuleKind::parse_name(rule_name)
                .ok_or_else(|| anyhow!("unknown rule '{rule_name}'"))?;
            let (lo, hi) = parse_seed_range(seed_text)?;
            for seed in lo..=hi {
                let instance = generate_random(sweep.n, sweep.t, sweep.max_alts, seed);
                let verdict = check_property(property, &rule, &instance, &caps)?;
                instances_checked += 1;
                match &verdict {
                    PropertyVerdict::Holds { candidates, .. } => {
                        candidates_checked += candidates
                    }
                    _ => {
                        violation = Some((Some(seed), instance, verdict));
                        break;
                    }
                }
            }
            sweep_report = Some(SweepParams {
                seeds: seed_text.clone(),
                n: sweep.n,
                t: sweep.t,
                max_alts: sweep.max_alts,
            });
            rule
        }
        _ => bail!("pass exactly one of --instance or --seeds"),
    };

    let rule = rule_used;
    let (verdict_word, violated_seed, witness) = match &violation {
        None => ("holds", None, None),
        Some((seed, instance, verdict)) => {
            let (word, witness) = witness_report(instance, &rule, verdict);
            (word, *seed, witness)
        }
    };
    println!(
        "check {property_name} ({}) on {} instance(s): {}",
        rule.name(),
        instances_checked,
        verdict_word.to_uppercase()
    );

    let report = CheckReport {
        command: "check",
        property: property_name.to_string(),
        rule: rule.name().to_string(),
        instance: instance_spec.map(|s| s.to_string()),
        sweep: sweep_report,
        caps: CapsReport {
            groups: caps.groups,
            strategies: caps.strategies,
        },
        instances_checked,
        candidates_checked,
        verdict: verdict_word,
        violated_seed,
        witness,
    };
    write_report(out.as_ref(), &report)?;
    Ok(if violation.is_none() {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    })
}

fn cmd_manipulate(
    rule_flag: Option<&str>,
    instance_spec: &str,
    voter_flag: Option<&str>,
    cap_args: &CapArgs,
    out: Option<PathBuf>,
) -> Result<u8> {
    let loaded = load_instance(instance_spec)?;
    let rule = resolve_rule(rule_flag, &loaded)?;
    let caps = cap_args.caps();
    let voter = voter_flag
        .map(|label| {
            VoterId::from_label(label)
                .filter(|v| v.0 < loaded.instance.voter_count())
                .ok_or_else(|| anyhow!("bad voter label '{label}'"))
        })
        .transpose()?;

    let verdict = find_sp_violation(&rule, &loaded.instance, voter, &caps)?;
    let space = tempvote::strategy::strategy_space_size(
        &loaded.instance,
        loaded.instance.round_count(),
    ) as u64;

    let (word, finding) = match &verdict {
        PropertyVerdict::Holds { .. } => {
            println!("manipulate {instance_spec}: no improving deviation (exhaustive)");
            ("holds", None)
        }
        PropertyVerdict::ViolatedStrategy { witness, .. } => {
            println!(
                "manipulate {instance_spec}: {} gains {} > {}",
                witness.voter.label(),
                witness.manipulated_sat,
                witness.truthful_sat
            );
            (
                "violated",
                Some(finding_report(&loaded.instance, &rule, witness)),
            )
        }
        PropertyVerdict::ViolatedEdit { .. } => unreachable!("SP search yields strategy findings"),
    };

    let report = ManipulateReport {
        command: "manipulate",
        rule: rule.name().to_string(),
        instance: instance_spec.to_string(),
        voter: voter.map(|v| v.label()),
        caps: CapsReport {
            groups: caps.groups,
            strategies: caps.strategies,
        },
        strategy_space: space,
        verdict: word,
        finding,
    };
    write_report(out.as_ref(), &report)?;
    Ok(if verdict.holds() {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    })
}

fn cmd_pom(
    rule_flag: Option<&str>,
    instance_spec: &str,
    cap_args: &CapArgs,
    out: Option<PathBuf>,
) -> Result<u8> {
    let loaded = load_instance(instance_spec)?;
    let rule = resolve_rule(rule_flag, &loaded)?;
    let caps = cap_args.caps();
    let reports = pom_report(&rule, &loaded.instance, &caps)?;
    let all_jr_ok = reports.iter().all(|r| r.all_jr_ok);
    let all_pjr_ok = reports.iter().all(|r| r.all_pjr_ok);
    println!(
        "pom {instance_spec}: {} manipulator(s); JR floors {}; PJR floors {}",
        reports.len(),
        if all_jr_ok { "kept" } else { "BROKEN" },
        if all_pjr_ok { "kept" } else { "BROKEN" },
    );
    let report = PomFileReport {
        command: "pom",
        rule: rule.name().to_string(),
        instance: instance_spec.to_string(),
        caps: CapsReport {
            groups: caps.groups,
            strategies: caps.strategies,
        },
        reports: reports
            .iter()
            .map(|r| pom_voter_report(&loaded.instance, r))
            .collect(),
        all_jr_ok,
        all_pjr_ok,
    };
    write_report(out.as_ref(), &report)?;
    Ok(if all_jr_ok && all_pjr_ok {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    })
}

fn cmd_converge(
    n: usize,
    fraction_text: &str,
    q_max: usize,
    cap_args: &CapArgs,
    out: Option<PathBuf>,
) -> Result<u8> {
    let fraction = parse_rational(fraction_text)
        .ok_or_else(|| anyhow!("bad fraction '{fraction_text}'"))?;
    let points = tsd_convergence(n, &fraction, q_max, &cap_args.caps())?;
    let csv = convergence_csv(n, &points);
    match &out {
        Some(path) => {
            fs::write(path, &csv).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{csv}"),
    }
    if out.is_some() {
        for point in &points {
            println!(
                "q={} t={} worst ratio {}",
                point.q,
                point.t,
                format_rational(&point.ratio)
            );
        }
    }
    Ok(EXIT_OK)
}

fn cmd_gen(n: usize, t: usize, max_alts: usize, seed: u64, out: Option<PathBuf>) -> Result<u8> {
    if n == 0 || t == 0 || max_alts == 0 {
        bail!("gen needs n, t, and max-alts at least 1");
    }
    let instance = generate_random(n, t, max_alts, seed);
    let text = serialize_instance(&instance, None, None);
    match &out {
        Some(path) => {
            fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
            println!("wrote {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(EXIT_OK)
}

fn cmd_fixtures(name: Option<&str>, out: Option<PathBuf>) -> Result<u8> {
    match name {
        None => {
            for fixture in fixtures::FIXTURES {
                println!("{:<18} {}", fixture.name, fixture.description);
            }
            Ok(EXIT_OK)
        }
        Some(name) => {
            let fixture =
                fixtures::find(name).ok_or_else(|| anyhow!("no fixture named '{name}'"))?;
            match &out {
                Some(path) => {
                    fs::write(path, fixture.json)
                        .with_context(|| format!("writing {}", path.display()))?;
                    println!("wrote {}", path.display());
                }
                None => print!("{}", fixture.json),
            }
            Ok(EXIT_OK)
        }
    }
}
