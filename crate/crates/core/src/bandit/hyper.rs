use crate::error::{Error, Result};

/// Exploration and prior settings shared by all policies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperParams {
    /// Reward noise scale `R > 0` in the Gaussian exploration width.
    pub r_scale: f64,
    /// `ε ∈ (0, 1]`.
    pub epsilon: f64,
    /// Confidence level `γ ∈ (0, 1]`.
    pub gamma_conf: f64,
    /// Beta prior successes.
    pub s0: f64,
    /// Beta prior failures.
    pub f0: f64,
    /// Sliding-window length (SW-UCB only).
    pub window: usize,
    /// Exploration constant (SW-UCB only).
    pub xi: f64,
}

impl Default for HyperParams {
    fn default() -> Self {
        Self {
            r_scale: 0.25,
            epsilon: 0.5,
            gamma_conf: 0.1,
            s0: 1.0,
            f0: 1.0,
            window: 100,
            xi: 0.5,
        }
    }
}

impl HyperParams {
    pub fn validate(&self) -> Result<()> {
        compute_v(self.r_scale, self.epsilon, self.gamma_conf, 1)?;
        if !(self.s0 > 0.0 && self.s0.is_finite() && self.f0 > 0.0 && self.f0.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "beta priors must be positive, got s0={} f0={}",
                self.s0, self.f0
            )));
        }
        if self.window == 0 {
            return Err(Error::InvalidParameter("window must be >= 1".into()));
        }
        if !(self.xi > 0.0 && self.xi.is_finite()) {
            return Err(Error::InvalidParameter(format!("xi must be > 0, got {}", self.xi)));
        }
        Ok(())
    }

    /// Exploration scale for a `d`-dimensional context.
    pub fn v(&self, d: usize) -> Result<f64> {
        compute_v(self.r_scale, self.epsilon, self.gamma_conf, d)
    }
}

/// Posterior scale of linear Thompson Sampling: `R · sqrt(24/ε · d · ln(1/γ))`.
pub fn compute_v(r_scale: f64, epsilon: f64, gamma_conf: f64, d: usize) -> Result<f64> {
    if !(r_scale > 0.0 && r_scale.is_finite()) {
        return Err(Error::InvalidParameter(format!("R must be > 0, got {r_scale}")));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon must lie in (0, 1], got {epsilon}")));
    }
    if !(gamma_conf > 0.0 && gamma_conf <= 1.0) {
        return Err(Error::InvalidParameter(format!("gamma must lie in (0, 1], got {gamma_conf}")));
    }
    if d == 0 {
        return Err(Error::InvalidParameter("context dimension must be >= 1".into()));
    }
    let v = r_scale * (24.0 / epsilon * d as f64 * (1.0 / gamma_conf).ln()).sqrt();
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn v_vanishes_at_full_confidence() {
        for d in [1, 5, 857] {
            assert_eq!(compute_v(1.0, 1.0, 1.0, d).unwrap(), 0.0);
        }
    }

    #[test]
    fn v_direct_substitution() {
        let v = compute_v(1.0, 1.0, (-1.0f64).exp(), 1).unwrap();
        assert!((v - 24f64.sqrt()).abs() < 1e-12);
        assert!((v - 4.89898).abs() < 1e-5);
    }

    #[test]
    fn v_reference_value() {
        // 0.5 * sqrt(48 * 4 * ln 10) = 10.51296...
        let v = compute_v(0.5, 0.5, 0.1, 4).unwrap();
        assert!((v - 10.513).abs() < 1e-3, "{v}");
    }

    #[test]
    fn v_rejects_out_of_range() {
        assert!(compute_v(0.0, 0.5, 0.5, 1).is_err());
        assert!(compute_v(1.0, 0.0, 0.5, 1).is_err());
        assert!(compute_v(1.0, 1.5, 0.5, 1).is_err());
        assert!(compute_v(1.0, 0.5, 0.0, 1).is_err());
        assert!(compute_v(1.0, 0.5, 1.1, 1).is_err());
    }

    #[test]
    fn defaults_validate() {
        HyperParams::default().validate().unwrap();
        let bad = HyperParams { window: 0, ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
