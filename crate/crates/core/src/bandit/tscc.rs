//! Thompson Sampling with corrupted context (TSCC).
//!
//! Two levels of Thompson Sampling. A Beta meta-bandit over two policies
//! decides each round whether to trust the context (`α = 1`, linear Gaussian
//! posteriors) or to ignore it (`α = 0`, per-arm Beta posteriors). The chosen
//! arm's linear and Beta posteriors are both updated every round, and the
//! meta-bandit credits the reward to whichever policy made the decision.

use super::beta::{beta_ts_select, BetaArmState};
use super::hyper::HyperParams;
use super::linear::{cts_select, LinearArmState};
use super::{argmax_lowest, check_reward, Alpha, Decision, Policy};
use crate::error::{Error, Result};
use crate::numerics::{check_dim, RngStream};

#[derive(Debug, Clone)]
pub struct TsccState {
    linear: Vec<LinearArmState>,
    beta: Vec<BetaArmState>,
    /// Indexed by `Alpha as usize`: `[non-contextual, contextual]`.
    meta: [BetaArmState; 2],
    v: f64,
    hyper: HyperParams,
}

impl TsccState {
    pub fn new(n_arms: usize, dim: usize, hyper: HyperParams) -> Result<Self> {
        hyper.validate()?;
        if n_arms == 0 {
            return Err(Error::InvalidParameter("at least one arm is required".into()));
        }
        let prior = BetaArmState::new(hyper.s0, hyper.f0)?;
        Ok(Self {
            linear: (0..n_arms).map(|_| LinearArmState::new(dim)).collect::<Result<_>>()?,
            beta: vec![prior; n_arms],
            meta: [prior; 2],
            v: hyper.v(dim)?,
            hyper,
        })
    }

    /// Overrides the exploration scale derived from the hyper-parameters.
    pub fn with_v(mut self, v: f64) -> Result<Self> {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::InvalidParameter(format!("v must be finite and >= 0, got {v}")));
        }
        self.v = v;
        Ok(self)
    }

    pub fn n_arms(&self) -> usize {
        self.beta.len()
    }

    pub fn dim(&self) -> usize {
        self.linear[0].dim()
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn hyper(&self) -> &HyperParams {
        &self.hyper
    }

    pub fn linear(&self) -> &[LinearArmState] {
        &self.linear
    }

    pub fn linear_mut(&mut self) -> &mut [LinearArmState] {
        &mut self.linear
    }

    pub fn beta(&self) -> &[BetaArmState] {
        &self.beta
    }

    pub fn beta_mut(&mut self) -> &mut [BetaArmState] {
        &mut self.beta
    }

    pub fn meta(&self, alpha: Alpha) -> &BetaArmState {
        &self.meta[alpha as usize]
    }

    pub fn meta_mut(&mut self, alpha: Alpha) -> &mut BetaArmState {
        &mut self.meta[alpha as usize]
    }

    pub fn meta_states(&self) -> &[BetaArmState; 2] {
        &self.meta
    }

    /// Rounds folded into the state so far.
    pub fn rounds(&self) -> u64 {
        self.meta.iter().map(BetaArmState::pulls).sum()
    }
}

/// `α = 1` when `θ₁ > θ₀`, and also on an exact tie.
pub fn choose_policy(theta_noncontextual: f64, theta_contextual: f64) -> Alpha {
    if theta_contextual >= theta_noncontextual {
        Alpha::Contextual
    } else {
        Alpha::NonContextual
    }
}

/// Samples `θ₀ ~ Beta(meta₀)` then `θ₁ ~ Beta(meta₁)` and picks the policy.
pub fn tscc_select_policy(meta: &[BetaArmState; 2], rng: &mut RngStream) -> Result<Alpha> {
    let theta0 = meta[0].sample(rng)?;
    let theta1 = meta[1].sample(rng)?;
    Ok(choose_policy(theta0, theta1))
}

/// `argmax_k α·cᵀμ̃_k + (1 − α)·θ_k` for already-sampled scores.
pub fn combine_scores(alpha: Alpha, linear_scores: &[f64], thetas: &[f64]) -> usize {
    match alpha {
        Alpha::Contextual => argmax_lowest(linear_scores),
        Alpha::NonContextual => argmax_lowest(thetas),
    }
}

/// Arm choice under the selected policy. Only the active sub-model is sampled,
/// so with `α = 1` this consumes the stream exactly like [`cts_select`], and
/// with `α = 0` exactly like [`beta_ts_select`].
pub fn tscc_select_arm(state: &TsccState, c: &[f64], alpha: Alpha, rng: &mut RngStream) -> Result<usize> {
    check_dim(state.dim(), c.len())?;
    match alpha {
        Alpha::Contextual => cts_select(&state.linear, c, state.v, rng),
        Alpha::NonContextual => beta_ts_select(&state.beta, rng),
    }
}

/// Folds one observed round into the state. Only the chosen arm and the
/// deciding meta-policy change.
pub fn tscc_update(state: &mut TsccState, c: &[f64], arm: usize, alpha: Alpha, reward: u8) -> Result<()> {
    check_reward(reward)?;
    check_dim(state.dim(), c.len())?;
    if arm >= state.n_arms() {
        return Err(Error::InvalidParameter(format!("arm {arm} out of range")));
    }
    state.linear[arm].update(c, reward)?;
    state.beta[arm].update(reward)?;
    state.meta[alpha as usize].update(reward)
}

#[derive(Debug, Clone)]
pub struct Tscc {
    state: TsccState,
    rng: RngStream,
}

impl Tscc {
    pub fn new(n_arms: usize, dim: usize, hyper: HyperParams, rng: RngStream) -> Result<Self> {
        Ok(Self {
            state: TsccState::new(n_arms, dim, hyper)?,
            rng,
        })
    }

    pub fn from_state(state: TsccState, rng: RngStream) -> Self {
        Self { state, rng }
    }

    pub fn state(&self) -> &TsccState {
        &self.state
    }
}

impl Policy for Tscc {
    fn name(&self) -> &'static str {
        "tscc"
    }

    fn n_arms(&self) -> usize {
        self.state.n_arms()
    }

    fn select(&mut self, context: &[f64]) -> Result<Decision> {
        let alpha = tscc_select_policy(&self.state.meta, &mut self.rng)?;
        let arm = tscc_select_arm(&self.state, context, alpha, &mut self.rng)?;
        Ok(Decision { arm, alpha: Some(alpha) })
    }

    fn update(&mut self, context: &[f64], decision: Decision, reward: u8) -> Result<()> {
        let alpha = decision
            .alpha
            .ok_or(Error::ProtocolViolation("TSCC update requires the deciding policy"))?;
        tscc_update(&mut self.state, context, decision.arm, alpha, reward)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fresh(k: usize, d: usize) -> TsccState {
        TsccState::new(k, d, HyperParams::default()).unwrap()
    }

    #[test]
    fn tie_goes_to_contextual() {
        assert_eq!(choose_policy(0.4, 0.4), Alpha::Contextual);
        assert_eq!(choose_policy(0.5, 0.4), Alpha::NonContextual);
        assert_eq!(choose_policy(0.3, 0.4), Alpha::Contextual);
    }

    #[test]
    fn dominant_meta_policy_wins() {
        let mut rng = RngStream::new(8);
        let meta = [
            BetaArmState::with_counts(1.0, 1.0, 0, 999).unwrap(),
            BetaArmState::with_counts(1.0, 1.0, 999, 0).unwrap(),
        ];
        let hits = (0..10_000)
            .filter(|_| tscc_select_policy(&meta, &mut rng).unwrap() == Alpha::Contextual)
            .count();
        assert!(hits as f64 / 10_000.0 > 0.99);
    }

    #[test]
    fn symmetric_meta_is_a_coin_flip() {
        let mut rng = RngStream::new(9);
        let meta = [BetaArmState::new(1.0, 1.0).unwrap(); 2];
        let n = 100_000;
        let hits = (0..n)
            .filter(|_| tscc_select_policy(&meta, &mut rng).unwrap() == Alpha::Contextual)
            .count();
        assert!((hits as f64 / n as f64 - 0.5).abs() < 0.01);
    }

    #[test]
    fn alpha_masks_the_other_term() {
        let linear = [0.3, 0.7];
        let thetas = [0.9, 0.1];
        assert_eq!(combine_scores(Alpha::Contextual, &linear, &thetas), 1);
        assert_eq!(combine_scores(Alpha::NonContextual, &linear, &thetas), 0);

        let mut st = fresh(2, 2).with_v(0.0).unwrap();
        st.linear_mut()[0].set_mu_hat(vec![0.3, 0.0]).unwrap();
        st.linear_mut()[1].set_mu_hat(vec![0.7, 0.0]).unwrap();
        let mut rng = RngStream::new(1);
        assert_eq!(tscc_select_arm(&st, &[1.0, 0.0], Alpha::Contextual, &mut rng).unwrap(), 1);
    }

    #[test]
    fn non_contextual_ignores_context() {
        let st = fresh(5, 3);
        for seed in 0..50 {
            let mut a = RngStream::new(seed);
            let mut b = RngStream::new(seed);
            let x = tscc_select_arm(&st, &[0.1, 0.9, 0.5], Alpha::NonContextual, &mut a).unwrap();
            let y = tscc_select_arm(&st, &[0.7, 0.0, 0.2], Alpha::NonContextual, &mut b).unwrap();
            assert_eq!(x, y);
        }
    }

    #[test]
    fn update_is_local() {
        let mut st = fresh(3, 2);
        tscc_update(&mut st, &[0.5, 1.0], 2, Alpha::Contextual, 1).unwrap();
        for k in 0..2 {
            assert_eq!(st.linear()[k].updates(), 0);
            assert_eq!(st.beta()[k].pulls(), 0);
        }
        assert_eq!(st.linear()[2].g(), &[0.5, 1.0]);
        assert_eq!((st.beta()[2].s, st.beta()[2].f), (2.0, 1.0));
        let m1 = st.meta(Alpha::Contextual);
        let m0 = st.meta(Alpha::NonContextual);
        assert_eq!((m1.s, m1.f), (2.0, 1.0));
        assert_eq!((m0.s, m0.f), (1.0, 1.0));
    }

    #[test]
    fn pull_counts_are_conserved() {
        let mut p = Tscc::new(4, 3, HyperParams::default(), RngStream::new(12)).unwrap();
        let mut ctx_rng = RngStream::new(13);
        for t in 0..100 {
            let c: Vec<f64> = (0..3).map(|_| ctx_rng.uniform()).collect();
            let d = p.select(&c).unwrap();
            p.update(&c, d, (t % 2) as u8).unwrap();
        }
        let st = p.state();
        assert_eq!(st.rounds(), 100);
        assert_eq!(st.beta().iter().map(BetaArmState::pulls).sum::<u64>(), 100);
    }

    #[test]
    fn update_requires_alpha_and_valid_reward() {
        let mut p = Tscc::new(2, 2, HyperParams::default(), RngStream::new(1)).unwrap();
        assert!(p.update(&[0.0, 1.0], Decision::arm(0), 1).is_err());
        let d = Decision { arm: 0, alpha: Some(Alpha::Contextual) };
        assert!(matches!(p.update(&[0.0, 1.0], d, 5), Err(Error::InvalidReward(5))));
        assert!(matches!(p.update(&[0.0], d, 1), Err(Error::DimensionMismatch { .. })));
        assert_eq!(p.state().rounds(), 0);
    }
}
