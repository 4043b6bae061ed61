//! The corrupted-context interaction protocol over a labelled dataset.
//!
//! Each round the environment emits the next instance in cyclic order. With
//! probability `p_corrupt` its context is replaced by independent uniform draws
//! over each feature's observed range. The agent picks an arm and is paid 1
//! iff the arm equals the hidden label.

use crate::dataio::Dataset;
use crate::error::{Error, Result};
use crate::numerics::{check_dim, RngStream};

/// Replaces whole contexts by per-feature uniform noise with probability `p_corrupt`.
#[derive(Debug, Clone)]
pub struct CorruptionProcess {
    p_corrupt: f64,
    ranges: Vec<(f64, f64)>,
    rng: RngStream,
}

impl CorruptionProcess {
    pub fn new(p_corrupt: f64, ranges: Vec<(f64, f64)>, rng: RngStream) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_corrupt) {
            return Err(Error::InvalidParameter(format!("p_corrupt must lie in [0, 1], got {p_corrupt}")));
        }
        if let Some((j, _)) = ranges.iter().enumerate().find(|(_, (lo, hi))| !(lo <= hi)) {
            return Err(Error::InvalidParameter(format!("feature {j} has min > max")));
        }
        Ok(Self { p_corrupt, ranges, rng })
    }

    pub fn p_corrupt(&self) -> f64 {
        self.p_corrupt
    }

    pub fn dim(&self) -> usize {
        self.ranges.len()
    }

    pub fn ranges(&self) -> &[(f64, f64)] {
        &self.ranges
    }

    /// Writes the presented context into `out` and reports whether it was corrupted.
    /// One uniform decides corruption every round, so the mask stream does not
    /// depend on the data.
    pub fn corrupt_into(&mut self, c: &[f64], out: &mut Vec<f64>) -> Result<bool> {
        check_dim(self.dim(), c.len())?;
        out.clear();
        let corrupted = self.rng.uniform() < self.p_corrupt;
        if corrupted {
            for &(lo, hi) in &self.ranges {
                out.push(lo + (hi - lo) * self.rng.uniform());
            }
        } else {
            out.extend_from_slice(c);
        }
        Ok(corrupted)
    }

    pub fn corrupt(&mut self, c: &[f64]) -> Result<(Vec<f64>, bool)> {
        let mut out = Vec::with_capacity(c.len());
        let flag = self.corrupt_into(c, &mut out)?;
        Ok((out, flag))
    }
}

/// One emitted round. Only the round index and the (possibly corrupted)
/// context are visible; the label and corruption flag stay with the environment.
#[derive(Debug, Clone, PartialEq)]
pub struct BanditRound {
    t: u64,
    context: Vec<f64>,
}

impl BanditRound {
    /// 1-based round index.
    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn context(&self) -> &[f64] {
        &self.context
    }

    pub fn into_context(self) -> Vec<f64> {
        self.context
    }
}

/// What the environment reveals after an arm is scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Feedback {
    pub reward: u8,
    pub true_label: usize,
    pub was_corrupted: bool,
    pub instance: usize,
}

/// Cumulative-regret bookkeeping against the always-correct oracle.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RegretLedger {
    cumulative_reward: u64,
    cumulative_optimal: u64,
    rewards: Vec<u8>,
}

impl RegretLedger {
    pub fn record(&mut self, reward: u8, optimal: u8) {
        self.cumulative_reward += u64::from(reward);
        self.cumulative_optimal += u64::from(optimal);
        self.rewards.push(reward);
    }

    pub fn cumulative_reward(&self) -> u64 {
        self.cumulative_reward
    }

    pub fn cumulative_optimal(&self) -> u64 {
        self.cumulative_optimal
    }

    pub fn regret(&self) -> u64 {
        self.cumulative_optimal - self.cumulative_reward
    }

    pub fn rounds(&self) -> usize {
        self.rewards.len()
    }

    pub fn rewards(&self) -> &[u8] {
        &self.rewards
    }
}

#[derive(Debug, Clone, Copy)]
struct Pending {
    instance: usize,
    true_label: usize,
    was_corrupted: bool,
}

/// Strictly sequential protocol: [`next_round`](Self::next_round), then one
/// [`step`](Self::step).
#[derive(Debug)]
pub struct Environment<'a> {
    dataset: &'a Dataset,
    corruption: CorruptionProcess,
    cursor: usize,
    t: u64,
    pending: Option<Pending>,
    ledger: RegretLedger,
}

impl<'a> Environment<'a> {
    /// Corruption ranges are the observed per-feature ranges of `dataset`.
    pub fn new(dataset: &'a Dataset, p_corrupt: f64, rng: RngStream) -> Result<Self> {
        let corruption = CorruptionProcess::new(p_corrupt, dataset.feature_ranges(), rng)?;
        Ok(Self::with_corruption(dataset, corruption))
    }

    pub fn with_corruption(dataset: &'a Dataset, corruption: CorruptionProcess) -> Self {
        Self {
            dataset,
            corruption,
            cursor: 0,
            t: 0,
            pending: None,
            ledger: RegretLedger::default(),
        }
    }

    pub fn dataset(&self) -> &Dataset {
        self.dataset
    }

    pub fn n_arms(&self) -> usize {
        self.dataset.k()
    }

    pub fn dim(&self) -> usize {
        self.dataset.d()
    }

    pub fn ledger(&self) -> &RegretLedger {
        &self.ledger
    }

    /// Rounds scored so far.
    pub fn rounds(&self) -> u64 {
        self.t
    }

    /// Emits the instance at the cursor and advances it cyclically.
    pub fn next_round(&mut self) -> Result<BanditRound> {
        if self.pending.is_some() {
            return Err(Error::ProtocolViolation("previous round has not been scored"));
        }
        let instance = self.cursor;
        self.cursor = (self.cursor + 1) % self.dataset.n();
        let mut context = Vec::with_capacity(self.dataset.d());
        let was_corrupted = self.corruption.corrupt_into(self.dataset.row(instance), &mut context)?;
        self.pending = Some(Pending {
            instance,
            true_label: self.dataset.label(instance),
            was_corrupted,
        });
        Ok(BanditRound { t: self.t + 1, context })
    }

    /// Scores `arm` against the pending round's label.
    pub fn step(&mut self, arm: usize) -> Result<Feedback> {
        let p = self
            .pending
            .take()
            .ok_or(Error::ProtocolViolation("no round awaiting an action"))?;
        let reward = u8::from(arm == p.true_label);
        self.ledger.record(reward, 1);
        self.t += 1;
        debug_assert_eq!(self.ledger.regret(), self.t - self.ledger.cumulative_reward());
        Ok(Feedback {
            reward,
            true_label: p.true_label,
            was_corrupted: p.was_corrupted,
            instance: p.instance,
        })
    }
}
