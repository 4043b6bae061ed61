//! Linear contextual Thompson Sampling (the CMAB baseline and the contextual
//! half of TSCC).
//!
//! Each arm keeps ridge statistics `B = I + Σ c cᵀ` and `g = Σ c r`, plus `B⁻¹`
//! maintained by Sherman–Morrison and rebuilt from a fresh Cholesky
//! factorization of `B` every [`REFRESH_INTERVAL`] updates to bound drift.
//!
//! Selection only needs the scalar `cᵀ μ̃_k`, and for `μ̃_k ~ N(μ̂_k, v² B_k⁻¹)`
//! that is exactly `N(cᵀ μ̂_k, v² cᵀ B_k⁻¹ c)`. Scoring therefore draws one
//! normal per arm and touches only the nonzero coordinates of `c`, which keeps
//! sparse high-dimensional contexts cheap. Full weight vectors are still
//! available through [`LinearArmState::sample_weights`].

use super::{argmax_lowest, check_reward, Decision, Policy};
use crate::error::{Error, Result};
use crate::numerics::{
    check_dim, cholesky, dot, sample_mvn_precision_into, sherman_morrison_in_place, standard_normal,
    CholeskyFactor, RngStream, SpdMatrix,
};

pub const REFRESH_INTERVAL: u64 = 1000;

#[derive(Debug, Clone)]
pub struct LinearArmState {
    b: SpdMatrix,
    b_inv: SpdMatrix,
    g: Vec<f64>,
    mu_hat: Vec<f64>,
    /// False after `set_mu_hat`; the next update recomputes `μ̂ = B⁻¹ g`.
    mu_synced: bool,
    updates: u64,
    scratch: Vec<f64>,
}

impl LinearArmState {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("context dimension must be >= 1".into()));
        }
        Ok(Self {
            b: SpdMatrix::identity(dim),
            b_inv: SpdMatrix::identity(dim),
            g: vec![0.0; dim],
            mu_hat: vec![0.0; dim],
            mu_synced: true,
            updates: 0,
            scratch: vec![0.0; dim],
        })
    }

    pub fn dim(&self) -> usize {
        self.g.len()
    }

    pub fn b(&self) -> &SpdMatrix {
        &self.b
    }

    pub fn b_inv(&self) -> &SpdMatrix {
        &self.b_inv
    }

    pub fn g(&self) -> &[f64] {
        &self.g
    }

    pub fn mu_hat(&self) -> &[f64] {
        &self.mu_hat
    }

    /// Fresh Cholesky factor of `B`. O(d³).
    pub fn factor(&self) -> Result<CholeskyFactor> {
        cholesky(&self.b)
    }

    pub fn updates(&self) -> u64 {
        self.updates
    }

    /// Overrides the posterior mean. Only meant for constructing fixed
    /// scenarios; the next [`update`](Self::update) recomputes it from `B⁻¹ g`.
    pub fn set_mu_hat(&mut self, mu_hat: Vec<f64>) -> Result<()> {
        check_dim(self.dim(), mu_hat.len())?;
        self.mu_hat = mu_hat;
        self.mu_synced = false;
        Ok(())
    }

    /// `cᵀ B⁻¹ c`. `nz` lists the nonzero coordinates of `c`; only the lower
    /// triangle of `B⁻¹` is read.
    pub fn projected_variance(&self, c: &[f64], nz: &[usize]) -> f64 {
        let mut q = 0.0;
        if 4 * nz.len() < c.len() {
            for (a, &i) in nz.iter().enumerate() {
                let row = self.b_inv.row(i);
                let mut s = 0.5 * row[i] * c[i];
                for &j in &nz[..a] {
                    s += row[j] * c[j];
                }
                q += c[i] * s;
            }
        } else {
            for &i in nz {
                let row = self.b_inv.row(i);
                q += c[i] * (0.5 * row[i] * c[i] + dot(&row[..i], &c[..i]));
            }
        }
        (2.0 * q).max(0.0)
    }

    /// Draws `μ̃ ~ N(μ̂, v² B⁻¹)` into `out`. Factorizes `B` on every call.
    pub fn sample_weights_into(&self, v: f64, rng: &mut RngStream, out: &mut [f64]) -> Result<()> {
        sample_mvn_precision_into(&self.mu_hat, v, &self.factor()?, rng, out)
    }

    pub fn sample_weights(&self, v: f64, rng: &mut RngStream) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim()];
        self.sample_weights_into(v, rng, &mut out)?;
        Ok(out)
    }

    /// `B += c cᵀ`, `g += r c`, then refreshes `B⁻¹` and `μ̂`.
    pub fn update(&mut self, c: &[f64], reward: u8) -> Result<()> {
        check_dim(self.dim(), c.len())?;
        let r = check_reward(reward)?;
        if c.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("context contains non-finite values".into()));
        }
        self.b.add_outer(c)?;
        if r == 1 {
            for (gi, ci) in self.g.iter_mut().zip(c) {
                *gi += ci;
            }
        }
        self.updates += 1;
        if self.updates.is_multiple_of(REFRESH_INTERVAL) {
            self.b_inv = cholesky(&self.b)?.inverse();
            self.b_inv.mul_vec_into(&self.g, &mut self.mu_hat);
            self.mu_synced = true;
            return Ok(());
        }
        // With u = B⁻¹c (old) and δ = 1 + cᵀu: μ̂ ← μ̂ + u (r − cᵀμ̂) / δ.
        let residual = f64::from(r) - dot(c, &self.mu_hat);
        let denom = sherman_morrison_in_place(&mut self.b_inv, c, &mut self.scratch)?;
        if self.mu_synced {
            let step = residual / denom;
            for (m, u) in self.mu_hat.iter_mut().zip(&self.scratch) {
                *m += u * step;
            }
        } else {
            self.b_inv.mul_vec_into(&self.g, &mut self.mu_hat);
            self.mu_synced = true;
        }
        Ok(())
    }
}

/// Samples a score for every arm and returns the lowest-index maximizer of `cᵀ μ̃_k`.
pub fn cts_select(arms: &[LinearArmState], c: &[f64], v: f64, rng: &mut RngStream) -> Result<usize> {
    let scores = cts_scores(arms, c, v, rng)?;
    Ok(argmax_lowest(&scores))
}

/// The sampled scores `cᵀ μ̃_k`, one per arm, in arm order. Each arm consumes
/// exactly one standard normal.
pub fn cts_scores(arms: &[LinearArmState], c: &[f64], v: f64, rng: &mut RngStream) -> Result<Vec<f64>> {
    if arms.is_empty() {
        return Err(Error::InvalidParameter("at least one arm is required".into()));
    }
    if !(v >= 0.0 && v.is_finite()) {
        return Err(Error::InvalidParameter(format!("v must be finite and >= 0, got {v}")));
    }
    let nz: Vec<usize> = (0..c.len()).filter(|&i| c[i] != 0.0).collect();
    arms.iter()
        .map(|arm| {
            check_dim(arm.dim(), c.len())?;
            let mean = dot(c, &arm.mu_hat);
            let sd = v * arm.projected_variance(c, &nz).sqrt();
            Ok(mean + sd * standard_normal(rng))
        })
        .collect()
}

/// Contextual Thompson Sampling policy with Gaussian posteriors.
#[derive(Debug, Clone)]
pub struct LinearThompson {
    arms: Vec<LinearArmState>,
    v: f64,
    rng: RngStream,
}

impl LinearThompson {
    pub fn new(n_arms: usize, dim: usize, v: f64, rng: RngStream) -> Result<Self> {
        if n_arms == 0 {
            return Err(Error::InvalidParameter("at least one arm is required".into()));
        }
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::InvalidParameter(format!("v must be finite and >= 0, got {v}")));
        }
        Ok(Self {
            arms: (0..n_arms).map(|_| LinearArmState::new(dim)).collect::<Result<_>>()?,
            v,
            rng,
        })
    }

    pub fn arms(&self) -> &[LinearArmState] {
        &self.arms
    }

    pub fn v(&self) -> f64 {
        self.v
    }
}

impl Policy for LinearThompson {
    fn name(&self) -> &'static str {
        "cmab"
    }

    fn n_arms(&self) -> usize {
        self.arms.len()
    }

    fn select(&mut self, context: &[f64]) -> Result<Decision> {
        Ok(Decision::arm(cts_select(&self.arms, context, self.v, &mut self.rng)?))
    }

    fn update(&mut self, context: &[f64], decision: Decision, reward: u8) -> Result<()> {
        let arm = self
            .arms
            .get_mut(decision.arm)
            .ok_or_else(|| Error::InvalidParameter(format!("arm {} out of range", decision.arm)))?;
        arm.update(context, reward)
    }
}
