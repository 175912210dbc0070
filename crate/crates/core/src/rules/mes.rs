//! Method of Equal Shares: a semi-online budget mechanism. Every voter
//! starts with budget 1, every round costs exactly `n/T`, and an alternative
//! is affordable when its approvers can jointly cover the price with each
//! contribution capped at a uniform share. If nothing is affordable the run
//! terminates: all remaining rounds are decided without a winner.

use num::Zero;

use crate::model::RoundSpec;
use crate::rational::{rat_int, Rational};

/// The least uniform share `s` such that `sum(min(b_i, s)) >= price`, or
/// `None` when the pooled budgets cannot cover the price at all.
///
/// Water-filling: with budgets sorted ascending, let the `j` smallest be
/// exhausted and the remaining `k - j` pay `s` each; the first segment whose
/// boundary conditions hold gives the answer.
pub fn minimal_share(budgets: &[Rational], price: &Rational) -> Option<Rational> {
    if budgets.is_empty() {
        return None;
    }
    let total: Rational = budgets.iter().sum();
    if total < *price {
        return None;
    }
    let mut sorted = budgets.to_vec();
    sorted.sort();
    let k = sorted.len();
    let mut exhausted = Rational::zero();
    for j in 0..k {
        let payers = rat_int((k - j) as i64);
        let share = (price - &exhausted) / payers;
        if share <= sorted[j] {
            return Some(share);
        }
        exhausted += &sorted[j];
    }
    unreachable!("total >= price guarantees some segment admits the share")
}

#[derive(Clone, Debug)]
pub struct MesMachine {
    price: Rational,
    budgets: Vec<Rational>,
    horizon: usize,
    rounds_seen: usize,
    terminated: bool,
}

impl MesMachine {
    /// Needs the full horizon up front: the price is `n / horizon`.
    pub fn new(n: usize, horizon: usize) -> MesMachine {
        MesMachine {
            price: crate::rational::rat(n as i64, horizon as i64),
            budgets: vec![rat_int(1); n],
            horizon,
            rounds_seen: 0,
            terminated: false,
        }
    }

    pub fn price(&self) -> &Rational {
        &self.price
    }

    pub fn budgets(&self) -> &[Rational] {
        &self.budgets
    }

    pub fn is_terminated(&self) -> bool {
        self.terminated
    }

    /// Elects the affordable alternative with the smallest share (ties to the
    /// tie-break-first alternative) and charges its approvers. Returns `None`
    /// forever once no alternative is affordable.
    pub fn step(&mut self, round: &RoundSpec) -> Option<u32> {
        debug_assert!(
            self.rounds_seen < self.horizon,
            "stepped past the declared horizon"
        );
        self.rounds_seen += 1;
        if self.terminated {
            return None;
        }

        let mut best: Option<(Rational, u32)> = None;
        for alt in 0..round.alternative_count() as u32 {
            let budgets: Vec<Rational> = round
                .approvals
                .iter()
                .enumerate()
                .filter(|(_, set)| set.contains(alt))
                .map(|(voter, _)| self.budgets[voter].clone())
                .collect();
            if let Some(share) = minimal_share(&budgets, &self.price) {
                match &best {
                    Some((incumbent, _)) if *incumbent <= share => {}
                    _ => best = Some((share, alt)),
                }
            }
        }

        match best {
            None => {
                self.terminated = true;
                None
            }
            Some((share, winner)) => {
                for (voter, set) in round.approvals.iter().enumerate() {
                    if set.contains(winner) {
                        let payment = self.budgets[voter].clone().min(share.clone());
                        self.budgets[voter] -= payment;
                    }
                }
                Some(winner)
            }
        }
    }
}
