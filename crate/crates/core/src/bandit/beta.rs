//! Beta–Bernoulli Thompson Sampling.

use super::{argmax_lowest, check_reward, Decision, Policy};
use crate::error::{Error, Result};
use crate::numerics::{sample_beta, RngStream};

/// Beta posterior over one Bernoulli arm: `s` successes and `f` failures,
/// both including the prior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaArmState {
    pub s: f64,
    pub f: f64,
    s0: f64,
    f0: f64,
}

impl BetaArmState {
    pub fn new(s0: f64, f0: f64) -> Result<Self> {
        if !(s0 > 0.0 && f0 > 0.0 && s0.is_finite() && f0.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "beta priors must be positive, got ({s0}, {f0})"
            )));
        }
        Ok(Self { s: s0, f: f0, s0, f0 })
    }

    /// A state with explicit counts on top of the given prior.
    pub fn with_counts(s0: f64, f0: f64, successes: u64, failures: u64) -> Result<Self> {
        let mut st = Self::new(s0, f0)?;
        st.s += successes as f64;
        st.f += failures as f64;
        Ok(st)
    }

    pub fn prior(&self) -> (f64, f64) {
        (self.s0, self.f0)
    }

    /// Number of observed rewards folded into this state.
    pub fn pulls(&self) -> u64 {
        (self.s + self.f - self.s0 - self.f0).round() as u64
    }

    pub fn mean(&self) -> f64 {
        self.s / (self.s + self.f)
    }

    pub fn sample(&self, rng: &mut RngStream) -> Result<f64> {
        sample_beta(self.s, self.f, rng)
    }

    /// Cumulative count update: `s += r`, `f += 1 − r`.
    pub fn update(&mut self, reward: u8) -> Result<()> {
        let r = check_reward(reward)?;
        self.s += f64::from(r);
        self.f += f64::from(1 - r);
        Ok(())
    }
}

/// Draws one `θ_k` per arm and returns the lowest-index maximizer.
pub fn beta_ts_select(arms: &[BetaArmState], rng: &mut RngStream) -> Result<usize> {
    if arms.is_empty() {
        return Err(Error::InvalidParameter("at least one arm is required".into()));
    }
    let thetas = arms.iter().map(|a| a.sample(rng)).collect::<Result<Vec<_>>>()?;
    Ok(argmax_lowest(&thetas))
}

/// Context-free Thompson Sampling over Beta posteriors (the MAB baseline).
#[derive(Debug, Clone)]
pub struct BetaThompson {
    arms: Vec<BetaArmState>,
    rng: RngStream,
}

impl BetaThompson {
    pub fn new(n_arms: usize, s0: f64, f0: f64, rng: RngStream) -> Result<Self> {
        if n_arms == 0 {
            return Err(Error::InvalidParameter("at least one arm is required".into()));
        }
        Ok(Self {
            arms: vec![BetaArmState::new(s0, f0)?; n_arms],
            rng,
        })
    }

    pub fn arms(&self) -> &[BetaArmState] {
        &self.arms
    }
}

impl Policy for BetaThompson {
    fn name(&self) -> &'static str {
        "mab"
    }

    fn n_arms(&self) -> usize {
        self.arms.len()
    }

    fn select(&mut self, _context: &[f64]) -> Result<Decision> {
        Ok(Decision::arm(beta_ts_select(&self.arms, &mut self.rng)?))
    }

    fn update(&mut self, _context: &[f64], decision: Decision, reward: u8) -> Result<()> {
        let arm = self
            .arms
            .get_mut(decision.arm)
            .ok_or_else(|| Error::InvalidParameter(format!("arm {} out of range", decision.arm)))?;
        arm.update(reward)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn update_examples() {
        let mut a = BetaArmState::new(1.0, 1.0).unwrap();
        a.update(1).unwrap();
        assert_eq!((a.s, a.f), (2.0, 1.0));

        let mut b = BetaArmState::with_counts(1.0, 1.0, 2, 4).unwrap();
        assert_eq!((b.s, b.f), (3.0, 5.0));
        b.update(0).unwrap();
        assert_eq!((b.s, b.f), (3.0, 6.0));

        let mut c = BetaArmState::new(1.0, 1.0).unwrap();
        for r in [1, 0, 1, 1, 0, 0, 1, 0, 1, 1] {
            c.update(r).unwrap();
        }
        assert_eq!((c.s, c.f), (7.0, 5.0));
        assert_eq!(c.pulls(), 10);
    }

    #[test]
    fn update_rejects_non_binary() {
        let mut a = BetaArmState::new(1.0, 1.0).unwrap();
        assert!(matches!(a.update(2), Err(Error::InvalidReward(2))));
        assert_eq!(a.pulls(), 0);
    }

    #[test]
    fn single_arm_always_chosen() {
        let mut rng = RngStream::new(4);
        let arms = [BetaArmState::new(1.0, 1.0).unwrap()];
        for _ in 0..100 {
            assert_eq!(beta_ts_select(&arms, &mut rng).unwrap(), 0);
        }
    }

    #[test]
    fn dominant_arm_wins() {
        let mut rng = RngStream::new(5);
        let arms = [
            BetaArmState::with_counts(1.0, 1.0, 999, 0).unwrap(),
            BetaArmState::with_counts(1.0, 1.0, 0, 999).unwrap(),
        ];
        let wins = (0..10_000)
            .filter(|_| beta_ts_select(&arms, &mut rng).unwrap() == 0)
            .count();
        assert!(wins as f64 / 10_000.0 > 0.99);
    }

    #[test]
    fn symmetric_priors_are_uniform() {
        let mut rng = RngStream::new(6);
        let arms = vec![BetaArmState::new(1.0, 1.0).unwrap(); 4];
        let mut counts = [0usize; 4];
        let n = 100_000;
        for _ in 0..n {
            counts[beta_ts_select(&arms, &mut rng).unwrap()] += 1;
        }
        for c in counts {
            assert!((c as f64 / n as f64 - 0.25).abs() < 0.02, "{counts:?}");
        }
    }

    #[test]
    fn empty_arm_list_rejected() {
        let mut rng = RngStream::new(1);
        assert!(beta_ts_select(&[], &mut rng).is_err());
    }
}
