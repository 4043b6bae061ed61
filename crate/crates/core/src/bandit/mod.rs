//! Bandit policies behind one [`Policy`] interface.
//!
//! | kind    | policy                                   |
//! |---------|------------------------------------------|
//! | `mab`   | Beta–Bernoulli Thompson Sampling         |
//! | `nsmab` | sliding-window UCB                       |
//! | `cmab`  | linear contextual Thompson Sampling      |
//! | `tscc`  | two-level hybrid of `cmab` and `mab`     |

mod beta;
mod hyper;
mod linear;
mod swucb;
mod tscc;

use std::fmt;
use std::str::FromStr;

pub use beta::{beta_ts_select, BetaArmState, BetaThompson};
pub use hyper::{compute_v, HyperParams};
pub use linear::{cts_scores, cts_select, LinearArmState, LinearThompson, REFRESH_INTERVAL};
pub use swucb::{swucb_index, SlidingWindowState, SlidingWindowUcb};
pub use tscc::{
    choose_policy, combine_scores, tscc_select_arm, tscc_select_policy, tscc_update, Tscc, TsccState,
};

use crate::error::{Error, Result};
use crate::numerics::RngStream;

/// Which of TSCC's two policies made a decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Alpha {
    NonContextual = 0,
    Contextual = 1,
}

/// A chosen arm, plus the meta-policy choice for TSCC.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Decision {
    pub arm: usize,
    pub alpha: Option<Alpha>,
}

impl Decision {
    pub fn arm(arm: usize) -> Self {
        Self { arm, alpha: None }
    }
}

/// A bandit policy: pick an arm for a context, then learn from the reward.
pub trait Policy: Send {
    fn name(&self) -> &'static str;

    fn n_arms(&self) -> usize;

    fn select(&mut self, context: &[f64]) -> Result<Decision>;

    fn update(&mut self, context: &[f64], decision: Decision, reward: u8) -> Result<()>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PolicyKind {
    Mab,
    Nsmab,
    Cmab,
    Tscc,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 4] = [PolicyKind::Mab, PolicyKind::Nsmab, PolicyKind::Cmab, PolicyKind::Tscc];

    pub fn as_str(self) -> &'static str {
        match self {
            PolicyKind::Mab => "mab",
            PolicyKind::Nsmab => "nsmab",
            PolicyKind::Cmab => "cmab",
            PolicyKind::Tscc => "tscc",
        }
    }

    /// Stable tag used to key the policy's random stream.
    pub fn tag(self) -> u64 {
        match self {
            PolicyKind::Mab => 1,
            PolicyKind::Nsmab => 2,
            PolicyKind::Cmab => 3,
            PolicyKind::Tscc => 4,
        }
    }

    /// Builds a fresh policy for `n_arms` arms and `dim`-dimensional contexts.
    pub fn build(self, n_arms: usize, dim: usize, hyper: &HyperParams, rng: RngStream) -> Result<Box<dyn Policy>> {
        hyper.validate()?;
        Ok(match self {
            PolicyKind::Mab => Box::new(BetaThompson::new(n_arms, hyper.s0, hyper.f0, rng)?),
            PolicyKind::Nsmab => Box::new(SlidingWindowUcb::new(n_arms, hyper.window, hyper.xi)?),
            PolicyKind::Cmab => Box::new(LinearThompson::new(n_arms, dim, hyper.v(dim)?, rng)?),
            PolicyKind::Tscc => Box::new(Tscc::new(n_arms, dim, *hyper, rng)?),
        })
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mab" => Ok(PolicyKind::Mab),
            "nsmab" => Ok(PolicyKind::Nsmab),
            "cmab" => Ok(PolicyKind::Cmab),
            "tscc" => Ok(PolicyKind::Tscc),
            other => Err(Error::Config(format!("unknown policy {other:?}"))),
        }
    }
}

/// Index of the first maximum. NaN scores never win; an all-NaN input yields 0.
pub fn argmax_lowest(scores: &[f64]) -> usize {
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for (i, &s) in scores.iter().enumerate() {
        if s > best_score {
            best = i;
            best_score = s;
        }
    }
    best
}

pub(crate) fn check_reward(reward: u8) -> Result<u8> {
    if reward <= 1 {
        Ok(reward)
    } else {
        Err(Error::InvalidReward(reward))
    }
}
