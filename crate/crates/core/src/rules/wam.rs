//! Weighted approval methods: pick the alternative with maximal summed voter
//! weight, then shrink the weights of the winner's supporters and grow (or
//! keep) everyone else's.


use crate::error::CoreError;
use crate::model::RoundSpec;
use crate::rational::{one, rat_int, zero, Rational};

/// `x -> scale * x + offset`. Every update in the catalog is affine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineMap {
    pub scale: Rational,
    pub offset: Rational,
}

impl AffineMap {
    pub fn identity() -> AffineMap {
        AffineMap {
            scale: one(),
            offset: zero(),
        }
    }

    pub fn constant(value: Rational) -> AffineMap {
        AffineMap {
            scale: zero(),
            offset: value,
        }
    }

    pub fn shift(offset: Rational) -> AffineMap {
        AffineMap {
            scale: one(),
            offset,
        }
    }

    pub fn apply(&self, x: &Rational) -> Rational {
        &self.scale * x + &self.offset
    }
}

/// A weighted approval method: initial voter weight plus the two post-round
/// updates. `winner_update` must never raise a weight and `loser_update` must
/// never lower one, checked over sampled reachable weights at construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WamSpec {
    pub winner_update: AffineMap,
    pub loser_update: AffineMap,
    pub initial_weight: Rational,
}

impl WamSpec {
    /// Plain approval voting: weights stay at 1 forever.
    pub fn av() -> WamSpec {
        WamSpec {
            winner_update: AffineMap::identity(),
            loser_update: AffineMap::identity(),
            initial_weight: one(),
        }
    }

    /// Satisfied voters are zeroed out and never recover.
    pub fn greedy_jr() -> WamSpec {
        WamSpec {
            winner_update: AffineMap::constant(zero()),
            loser_update: AffineMap::identity(),
            initial_weight: one(),
        }
    }

    /// Satisfied voters lose one unit of weight, unsatisfied voters gain one.
    pub fn unit_gain() -> WamSpec {
        WamSpec {
            winner_update: AffineMap::shift(rat_int(-1)),
            loser_update: AffineMap::shift(rat_int(1)),
            initial_weight: one(),
        }
    }

    /// Satisfied voters reset to zero, unsatisfied voters gain one.
    pub fn reset_grow() -> WamSpec {
        WamSpec {
            winner_update: AffineMap::constant(zero()),
            loser_update: AffineMap::shift(rat_int(1)),
            initial_weight: one(),
        }
    }

    /// Samples the weights reachable from the initial weight by repeated
    /// updates and checks the catalog contract on every sample.
    pub fn validate(&self) -> Result<(), CoreError> {
        const DEPTH: usize = 32;
        const SAMPLE_CAP: usize = 512;

        let mut reachable = vec![self.initial_weight.clone()];
        let mut frontier = reachable.clone();
        for _ in 0..DEPTH {
            let mut next = Vec::new();
            for x in &frontier {
                for y in [self.winner_update.apply(x), self.loser_update.apply(x)] {
                    if !reachable.contains(&y) {
                        reachable.push(y.clone());
                        next.push(y);
                    }
                }
            }
            if next.is_empty() || reachable.len() > SAMPLE_CAP {
                break;
            }
            frontier = next;
        }

        for x in &reachable {
            if self.winner_update.apply(x) > *x {
                return Err(CoreError::InvalidWeightUpdate(format!(
                    "winner update raises weight {x}"
                )));
            }
            if self.loser_update.apply(x) < *x {
                return Err(CoreError::InvalidWeightUpdate(format!(
                    "loser update lowers weight {x}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct WamMachine {
    spec: WamSpec,
    weights: Vec<Rational>,
}

impl WamMachine {
    pub fn new(spec: WamSpec, n: usize) -> Result<WamMachine, CoreError> {
        spec.validate()?;
        let weights = vec![spec.initial_weight.clone(); n];
        Ok(WamMachine { spec, weights })
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    /// Sum of `max(0, weight)` over the alternative's approvers.
    pub fn score(&self, round: &RoundSpec, alt: u32) -> Rational {
        let mut total = zero();
        for (voter, set) in round.approvals.iter().enumerate() {
            if set.contains(alt) && self.weights[voter] > zero() {
                total += &self.weights[voter];
            }
        }
        total
    }

    /// Score looked up by label, for callers outside the round loop.
    pub fn score_of(&self, round: &RoundSpec, label: &str, t: usize) -> Result<Rational, CoreError> {
        let alt = round
            .index_of(label)
            .ok_or_else(|| CoreError::UnknownAlternative {
                round: t,
                label: label.to_string(),
            })?;
        Ok(self.score(round, alt))
    }

    /// Picks the tie-break-first maximal-score alternative and applies the
    /// weight updates: winner's approvers get `winner_update`, everyone else
    /// `loser_update`.
    pub fn step(&mut self, round: &RoundSpec) -> u32 {
        let mut winner = 0u32;
        let mut best = self.score(round, 0);
        for alt in 1..round.alternative_count() as u32 {
            let score = self.score(round, alt);
            if score > best {
                best = score;
                winner = alt;
            }
        }
        for (voter, set) in round.approvals.iter().enumerate() {
            let update = if set.contains(winner) {
                &self.spec.winner_update
            } else {
                &self.spec.loser_update
            };
            self.weights[voter] = update.apply(&self.weights[voter]);
        }
        winner
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AltSet, AlternativeId};
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
    fn av_score_counts_unit_weights() {
        let m = WamMachine::new(WamSpec::av(), 5).unwrap();
        let r = round(
            &["c1", "c2"],
            &[&["c1"], &["c1"], &["c1"], &["c2"], &["c2"]],
        );
        assert_eq!(m.score_of(&r, "c1", 0).unwrap(), rat_int(3));
        assert!(matches!(
            m.score_of(&r, "c9", 0),
            Err(CoreError::UnknownAlternative { .. })
        ));
    }

    #[test]
    fn negative_weights_are_clamped_to_zero() {
        let mut m = WamMachine::new(WamSpec::unit_gain(), 1).unwrap();
        let r = round(&["c1"], &[&["c1"]]);
        // Weight walks 1 -> 0 -> -1 as the lone voter keeps winning.
        m.step(&r);
        m.step(&r);
        assert_eq!(m.weights()[0], rat_int(-1));
        assert_eq!(m.score(&r, 0), zero());
        // The clamped score still elects the only alternative.
        assert_eq!(m.step(&r), 0);
    }

    #[test]
    fn greedy_jr_paper_table_round_by_round() {
        // Alternative order (c1, c3, c2, c4) realizes the round-2 tie-break.
        let alts = ["c1", "c3", "c2", "c4"];
        let r1 = round(&alts, &[&["c1"], &["c1"], &["c1"], &["c2"], &["c3"]]);
        let r2 = round(&alts, &[&["c1"], &["c1"], &["c2"], &["c2"], &["c3"]]);

        let mut m = WamMachine::new(WamSpec::greedy_jr(), 5).unwrap();
        let w1 = m.step(&r1);
        assert_eq!(r1.label(w1).as_str(), "c1");
        let expected: Vec<Rational> = [0, 0, 0, 1, 1].iter().map(|&k| rat_int(k)).collect();
        assert_eq!(m.weights(), &expected[..]);

        // Round 2 scores: c1 is zeroed out, c2 and c3 tie at 1.
        assert_eq!(m.score_of(&r2, "c1", 1).unwrap(), zero());
        assert_eq!(m.score_of(&r2, "c2", 1).unwrap(), one());
        assert_eq!(m.score_of(&r2, "c3", 1).unwrap(), one());
        let w2 = m.step(&r2);
        assert_eq!(r2.label(w2).as_str(), "c3");
    }

    #[test]
    fn single_voter_single_alternative() {
        for spec in [
            WamSpec::av(),
            WamSpec::greedy_jr(),
            WamSpec::unit_gain(),
            WamSpec::reset_grow(),
        ] {
            let mut m = WamMachine::new(spec, 1).unwrap();
            let r = round(&["only"], &[&["only"]]);
            assert_eq!(m.step(&r), 0);
        }
    }

    #[test]
    fn invalid_updates_rejected() {
        let bad_winner = WamSpec {
            winner_update: AffineMap::shift(one()),
            loser_update: AffineMap::identity(),
            initial_weight: one(),
        };
        assert!(matches!(
            bad_winner.validate(),
            Err(CoreError::InvalidWeightUpdate(_))
        ));

        let bad_loser = WamSpec {
            winner_update: AffineMap::identity(),
            loser_update: AffineMap::shift(rat(-1, 2)),
            initial_weight: one(),
        };
        assert!(bad_loser.validate().is_err());

        // Zeroing is fine from weight 1 but not from a negative start.
        assert!(WamSpec::greedy_jr().validate().is_ok());
        let bad_start = WamSpec {
            winner_update: AffineMap::constant(zero()),
            loser_update: AffineMap::identity(),
            initial_weight: rat_int(-1),
        };
        assert!(bad_start.validate().is_err());
    }
}
