//! Beta-Bernoulli Thompson Sampling on three fixed arms.
//!
//! Run: `cargo run --example thompson_beta`

use cbcc::bandit::{BetaThompson, Policy};
use cbcc::numerics::RngStream;

fn main() -> cbcc::Result<()> {
    let probs = [0.2, 0.5, 0.65];
    let mut policy = BetaThompson::new(probs.len(), 1.0, 1.0, RngStream::new(1))?;
    let mut env = RngStream::new(2);
    let rounds = 5_000;
    let mut total = 0u32;

    for _ in 0..rounds {
        // Beta-TS ignores the context, so an empty slice is fine.
        let d = policy.select(&[])?;
        let reward = u8::from(env.uniform() < probs[d.arm]);
        total += u32::from(reward);
        policy.update(&[], d, reward)?;
    }

    println!("arm  true p  pulls  posterior mean");
    for (k, arm) in policy.arms().iter().enumerate() {
        println!("{k:>3}  {:>6.2}  {:>5}  {:>14.3}", probs[k], arm.pulls(), arm.mean());
    }
    println!("reward rate {:.3} (best arm {:.2})", f64::from(total) / rounds as f64, probs[2]);
    Ok(())
}
