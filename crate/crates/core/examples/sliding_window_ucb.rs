//! Sliding-window UCB tracking an abrupt change in the best arm.
//!
//! Run: `cargo run --example sliding_window_ucb`

use cbcc::bandit::{Policy, SlidingWindowUcb};
use cbcc::numerics::RngStream;

fn main() -> cbcc::Result<()> {
    let before = [0.8, 0.3, 0.5];
    let after = [0.2, 0.3, 0.9];
    let switch = 3_000;
    let mut policy = SlidingWindowUcb::new(3, 100, 0.5)?;
    let mut env = RngStream::new(5);
    let mut picks = [[0u32; 3]; 2];

    for t in 0..2 * switch {
        let probs = if t < switch { &before } else { &after };
        let d = policy.select(&[])?;
        let reward = u8::from(env.uniform() < probs[d.arm]);
        policy.update(&[], d, reward)?;
        // Count choices over the last 1000 rounds of each phase.
        if t % switch >= switch - 1_000 {
            picks[t / switch][d.arm] += 1;
        }
    }

    println!("phase 1 (best arm 0): picks {:?}", picks[0]);
    println!("phase 2 (best arm 2): picks {:?}", picks[1]);
    let st = policy.state();
    for k in 0..3 {
        println!("arm {k}: window holds {} pulls, index {:.3}", st.window_rewards(k).count(), st.index(k));
    }
    Ok(())
}
