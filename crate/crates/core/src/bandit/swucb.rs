//! Sliding-window UCB, the non-stationary (NSMAB) baseline.

use std::collections::VecDeque;

use super::{argmax_lowest, check_reward, Decision, Policy};
use crate::error::{Error, Result};

/// Per-arm ring buffers of the `W` most recent `(round, reward)` pulls.
#[derive(Debug, Clone)]
pub struct SlidingWindowState {
    window: usize,
    xi: f64,
    t: u64,
    buffers: Vec<VecDeque<(u64, u8)>>,
}

/// `mean + sqrt(ξ · ln(min(t, W)) / n)`.
pub fn swucb_index(reward_sum: f64, n: usize, t: u64, window: usize, xi: f64) -> f64 {
    if n == 0 {
        return f64::INFINITY;
    }
    let horizon = t.min(window as u64).max(1) as f64;
    reward_sum / n as f64 + (xi * horizon.ln() / n as f64).sqrt()
}

impl SlidingWindowState {
    pub fn new(n_arms: usize, window: usize, xi: f64) -> Result<Self> {
        if n_arms == 0 {
            return Err(Error::InvalidParameter("at least one arm is required".into()));
        }
        if window == 0 {
            return Err(Error::InvalidParameter("window must be >= 1".into()));
        }
        Ok(Self {
            window,
            xi,
            t: 0,
            buffers: vec![VecDeque::with_capacity(window); n_arms],
        })
    }

    /// The round about to be played (1-based).
    pub fn round(&self) -> u64 {
        self.t + 1
    }

    pub fn window_rewards(&self, arm: usize) -> impl Iterator<Item = u8> + '_ {
        self.buffers[arm].iter().map(|&(_, r)| r)
    }

    pub fn index(&self, arm: usize) -> f64 {
        let buf = &self.buffers[arm];
        let sum: f64 = buf.iter().map(|&(_, r)| f64::from(r)).sum();
        swucb_index(sum, buf.len(), self.round(), self.window, self.xi)
    }

    /// Unpulled arms score `+∞`; ties go to the lowest index.
    pub fn select(&self) -> usize {
        let idx: Vec<f64> = (0..self.buffers.len()).map(|k| self.index(k)).collect();
        argmax_lowest(&idx)
    }

    pub fn update(&mut self, arm: usize, reward: u8) -> Result<()> {
        let r = check_reward(reward)?;
        let round = self.round();
        let buf = self
            .buffers
            .get_mut(arm)
            .ok_or_else(|| Error::InvalidParameter(format!("arm {arm} out of range")))?;
        if buf.len() == self.window {
            buf.pop_front();
        }
        buf.push_back((round, r));
        self.t += 1;
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SlidingWindowUcb {
    state: SlidingWindowState,
}

impl SlidingWindowUcb {
    pub fn new(n_arms: usize, window: usize, xi: f64) -> Result<Self> {
        Ok(Self {
            state: SlidingWindowState::new(n_arms, window, xi)?,
        })
    }

    pub fn state(&self) -> &SlidingWindowState {
        &self.state
    }
}

impl Policy for SlidingWindowUcb {
    fn name(&self) -> &'static str {
        "nsmab"
    }

    fn n_arms(&self) -> usize {
        self.state.buffers.len()
    }

    fn select(&mut self, _context: &[f64]) -> Result<Decision> {
        Ok(Decision::arm(self.state.select()))
    }

    fn update(&mut self, _context: &[f64], decision: Decision, reward: u8) -> Result<()> {
        self.state.update(decision.arm, reward)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_round_picks_arm_zero() {
        let s = SlidingWindowState::new(4, 10, 0.5).unwrap();
        assert_eq!(s.round(), 1);
        assert_eq!(s.select(), 0);
    }

    #[test]
    fn unpulled_arms_are_explored_in_order() {
        let mut s = SlidingWindowState::new(3, 10, 0.5).unwrap();
        for expected in 0..3 {
            let arm = s.select();
            assert_eq!(arm, expected);
            s.update(arm, 1).unwrap();
        }
    }

    #[test]
    fn index_reference_value() {
        let v = swucb_index(3.0, 4, 100, 10, 0.5);
        assert!((v - 1.2865).abs() < 1e-4, "{v}");

        // Same value through the state: pull arm 0 with [1,1,0,1], others pad t to 100.
        let mut s = SlidingWindowState::new(2, 10, 0.5).unwrap();
        for r in [1, 1, 0, 1] {
            s.update(0, r).unwrap();
        }
        for _ in 0..95 {
            s.update(1, 0).unwrap();
        }
        assert_eq!(s.round(), 100);
        assert!((s.index(0) - 1.2865).abs() < 1e-4);
    }

    #[test]
    fn window_caps_buffer() {
        let mut s = SlidingWindowState::new(1, 3, 0.5).unwrap();
        for r in [0, 0, 0, 1, 1, 1] {
            s.update(0, r).unwrap();
        }
        assert_eq!(s.window_rewards(0).collect::<Vec<_>>(), vec![1, 1, 1]);
    }

    #[test]
    fn tracks_the_good_arm() {
        let mut p = SlidingWindowUcb::new(2, 50, 0.5).unwrap();
        let mut recent_good = 0;
        for t in 0..2000 {
            let d = p.select(&[]).unwrap();
            let r = (d.arm == 0) as u8;
            p.update(&[], d, r).unwrap();
            if t >= 1500 && d.arm == 0 {
                recent_good += 1;
            }
        }
        assert!(recent_good as f64 / 500.0 > 0.8);
    }

    #[test]
    fn rejects_bad_reward() {
        let mut s = SlidingWindowState::new(2, 5, 0.5).unwrap();
        assert!(s.update(0, 7).is_err());
        assert_eq!(s.round(), 1);
    }
}
