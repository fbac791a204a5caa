use serde::{Deserialize, Serialize};

use super::interval::{wilson_95, RateEstimate};
use crate::protocol::{ThrowRecord, Verdict};
use crate::qutrit::{BasisLabel, Coin, StateLabel};

/// Counts over a run. Kept throws satisfy `n_heads + n_tails + n_failures = n_throws`;
/// lost throws are counted separately and excluded from every other rate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStats {
    pub n_throws: u64,
    pub n_heads: u64,
    pub n_tails: u64,
    pub n_failures: u64,
    pub n_lost: u64,
    pub n_alice_wins: u64,
    pub n_bob_wins: u64,
    /// Kept throws where Bob's bet named the revealed coin.
    pub n_bet_matches: u64,
    /// VERIFY counts per claimed state (A11..A22), by outcome slot in the
    /// claim's basis.
    pub verify_counts: [[u64; 3]; 4],
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateSummary {
    pub heads: RateEstimate,
    pub tails: RateEstimate,
    pub failures: RateEstimate,
    pub loss: RateEstimate,
    pub alice_win: RateEstimate,
    pub bet_win: RateEstimate,
}

impl RunStats {
    pub fn from_records<'a>(records: impl IntoIterator<Item = &'a ThrowRecord>) -> Self {
        let mut stats = RunStats::default();
        for r in records {
            stats.record(r);
        }
        stats
    }

    pub fn record(&mut self, r: &ThrowRecord) {
        match r.verdict {
            Verdict::Lost => {
                self.n_lost += 1;
                return;
            }
            Verdict::Success(Coin::Heads) => self.n_heads += 1,
            Verdict::Success(Coin::Tails) => self.n_tails += 1,
            Verdict::Failure => self.n_failures += 1,
        }
        self.n_throws += 1;
        self.n_alice_wins += u64::from(r.alice_wins());
        self.n_bob_wins += u64::from(r.bob_wins());
        self.n_bet_matches += u64::from(r.bet_matches_claim() == Some(true));
        if let (Some(claim), Some(outcome)) = (r.claim, r.outcome) {
            self.verify_counts[claim.index()][outcome.slot()] += 1;
        }
    }

    /// Counts are additive, so shards merge in any order.
    pub fn merge(&mut self, other: &RunStats) {
        self.n_throws += other.n_throws;
        self.n_heads += other.n_heads;
        self.n_tails += other.n_tails;
        self.n_failures += other.n_failures;
        self.n_lost += other.n_lost;
        self.n_alice_wins += other.n_alice_wins;
        self.n_bob_wins += other.n_bob_wins;
        self.n_bet_matches += other.n_bet_matches;
        for (mine, theirs) in self.verify_counts.iter_mut().zip(other.verify_counts) {
            for (m, t) in mine.iter_mut().zip(theirs) {
                *m += t;
            }
        }
    }

    /// Kept plus lost throws.
    pub fn attempts(&self) -> u64 {
        self.n_throws + self.n_lost
    }

    pub fn failure_rate(&self) -> RateEstimate {
        wilson_95(self.n_failures, self.n_throws)
    }

    pub fn heads_rate(&self) -> RateEstimate {
        wilson_95(self.n_heads, self.n_throws)
    }

    pub fn tails_rate(&self) -> RateEstimate {
        wilson_95(self.n_tails, self.n_throws)
    }

    pub fn loss_rate(&self) -> RateEstimate {
        wilson_95(self.n_lost, self.attempts())
    }

    pub fn alice_win_rate(&self) -> RateEstimate {
        wilson_95(self.n_alice_wins, self.n_throws)
    }

    pub fn bet_win_rate(&self) -> RateEstimate {
        wilson_95(self.n_bet_matches, self.n_throws)
    }

    /// Failures under claims of `basis`, split by outcome slot.
    pub fn failure_outcomes(&self, basis: BasisLabel) -> [u64; 3] {
        let mut out = [0; 3];
        for claim in StateLabel::ALL.into_iter().filter(|c| c.basis() == basis) {
            let matching = claim.matching_outcome().slot();
            for (slot, count) in self.verify_counts[claim.index()].iter().enumerate() {
                if slot != matching {
                    out[slot] += count;
                }
            }
        }
        out
    }

    /// Share of failures under `basis` claims that clicked the out-of-plane
    /// projector (B13 or B23).
    pub fn out_of_plane_share(&self, basis: BasisLabel) -> RateEstimate {
        let f = self.failure_outcomes(basis);
        wilson_95(f[2], f.iter().sum())
    }

    pub fn summary(&self) -> RateSummary {
        RateSummary {
            heads: self.heads_rate(),
            tails: self.tails_rate(),
            failures: self.failure_rate(),
            loss: self.loss_rate(),
            alice_win: self.alice_win_rate(),
            bet_win: self.bet_win_rate(),
        }
    }
}
