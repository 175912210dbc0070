//! Bundled example instances. Each replays a table from the literature on
//! these rules exactly: winners, budgets, and loads as exact rationals, with
//! the analyzed deviation carried in the file's deviation block.

use crate::fileio::{parse_instance, FileError, LoadedInstance};

#[derive(Clone, Copy, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub description: &'static str,
    pub json: &'static str,
}

pub const FIXTURES: &[Fixture] = &[
    Fixture {
        name: "greedyjr_nonSP",
        description: "GreedyJR free-riding: v3 hides its round-1 approval and gains a round (sat 2 > 1)",
        json: include_str!("../fixtures/greedyjr_nonSP.json"),
    },
    Fixture {
        name: "mes_nonSP",
        description: "Equal-shares free-riding: v3 saves its budget for the last round (sat 4 > 3)",
        json: include_str!("../fixtures/mes_nonSP.json"),
    },
    Fixture {
        name: "mes_termination",
        description: "Two voters split one purchase, then neither can afford a singleton: the run ends without a winner",
        json: include_str!("../fixtures/mes_termination.json"),
    },
    Fixture {
        name: "phragmen_nonSP",
        description: "Load-balancing free-riding: v3 dodges the round-1 load and wins round 2 (sat 2 > 1)",
        json: include_str!("../fixtures/phragmen_nonSP.json"),
    },
    Fixture {
        name: "tsd_nonwJR",
        description: "Round-robin dictators ignore a cohesive two-thirds block: weak JR fails (bound 1, achieved 0)",
        json: include_str!("../fixtures/tsd_nonwJR.json"),
    },
];

pub fn find(name: &str) -> Option<&'static Fixture> {
    FIXTURES.iter().find(|f| f.name == name)
}

pub fn load(name: &str) -> Option<Result<LoadedInstance, FileError>> {
    find(name).map(|f| parse_instance(f.json))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_fixtures_parse_and_carry_rules() {
        for fixture in FIXTURES {
            let loaded = parse_instance(fixture.json)
                .unwrap_or_else(|e| panic!("{}: {e}", fixture.name));
            assert!(loaded.rule.is_some(), "{} has no rule", fixture.name);
        }
    }

    #[test]
    fn lookup_by_name() {
        assert!(find("mes_nonSP").is_some());
        assert!(find("unknown").is_none());
        assert!(load("tsd_nonwJR").unwrap().is_ok());
    }
}
