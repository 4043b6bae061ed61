//! Synthetic problems: a Bernoulli linear bandit with known weights, and a
//! sparse-feature classification generator for the dataset pipeline.

use crate::bandit::Policy;
use crate::dataio::Dataset;
use crate::error::Result;
use crate::numerics::{dot, RngStream};

/// `K` arms with weights `μ_k ∈ [0,1]^d`. Contexts are uniform on `[0,1]^d`
/// scaled by `1/d`, so `μ_kᵀ c ∈ [0, 1]` and rewards are Bernoulli with that mean.
#[derive(Debug, Clone)]
pub struct LinearBandit {
    d: usize,
    weights: Vec<Vec<f64>>,
}

impl LinearBandit {
    pub fn random(d: usize, k: usize, rng: &mut RngStream) -> Self {
        let weights = (0..k).map(|_| (0..d).map(|_| rng.uniform()).collect()).collect();
        Self { d, weights }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn context(&self, rng: &mut RngStream) -> Vec<f64> {
        (0..self.d).map(|_| rng.uniform() / self.d as f64).collect()
    }

    pub fn success_prob(&self, arm: usize, c: &[f64]) -> f64 {
        dot(&self.weights[arm], c).clamp(0.0, 1.0)
    }

    /// Plays `rounds` rounds and returns the cumulative expected regret after each.
    pub fn play(&self, policy: &mut dyn Policy, rounds: usize, rng: &mut RngStream) -> Result<Vec<f64>> {
        let mut regret = 0.0;
        let mut curve = Vec::with_capacity(rounds);
        for _ in 0..rounds {
            let c = self.context(rng);
            let decision = policy.select(&c)?;
            let best = (0..self.k()).map(|a| self.success_prob(a, &c)).fold(f64::MIN, f64::max);
            let p = self.success_prob(decision.arm, &c);
            let reward = u8::from(rng.uniform() < p);
            policy.update(&c, decision, reward)?;
            regret += best - p;
            curve.push(regret);
        }
        Ok(curve)
    }
}

/// Shape of a synthetic sparse classification dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SparseClassSpec {
    pub n: usize,
    pub d: usize,
    pub k: usize,
    /// Features reserved as each class's vocabulary.
    pub signature: usize,
    /// Probability that a signature feature is active in a row of its class.
    pub on_rate: f64,
    /// Probability that any other feature is active.
    pub noise_rate: f64,
}

impl SparseClassSpec {
    /// A document-like layout: sparse binary counts, balanced classes.
    pub fn document_like(n: usize, d: usize, k: usize) -> Self {
        Self {
            n,
            d,
            k,
            signature: (d / (2 * k)).max(1),
            on_rate: 0.15,
            noise_rate: 0.005,
        }
    }
}

/// Sparse binary features where each class activates its own block of
/// features more often. Labels cycle so classes are balanced and interleaved.
pub fn sparse_classification(name: &str, spec: SparseClassSpec, rng: &mut RngStream) -> Result<Dataset> {
    let SparseClassSpec {
        n,
        d,
        k,
        signature,
        on_rate,
        noise_rate,
    } = spec;
    let mut features = vec![0.0; n * d];
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let label = (i * 7 + i / k) % k;
        let block = (label * signature) % d;
        let row = &mut features[i * d..(i + 1) * d];
        for (j, x) in row.iter_mut().enumerate() {
            let in_block = (j + d - block) % d < signature;
            let rate = if in_block { on_rate } else { noise_rate };
            if rng.uniform() < rate {
                *x = 1.0;
            }
        }
        labels.push(label);
    }
    Dataset::new(name, d, features, labels, k)
}
