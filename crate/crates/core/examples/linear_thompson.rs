//! Linear contextual Thompson Sampling on a synthetic Bernoulli linear bandit.
//! Prints the average regret per round at a few horizons for the default
//! exploration scale and a smaller one.
//!
//! Run: `cargo run --release --example linear_thompson`

use cbcc::bandit::{HyperParams, LinearThompson};
use cbcc::numerics::RngStream;
use cbcc::synthetic::LinearBandit;

fn main() -> cbcc::Result<()> {
    let (d, k) = (5, 4);
    let default_v = HyperParams::default().v(d)?;
    let bandit = LinearBandit::random(d, k, &mut RngStream::new(42));

    for v in [default_v, 0.5] {
        println!("d = {d}, K = {k}, v = {v:.3}");
        let mut rng = RngStream::new(7);
        let mut policy = LinearThompson::new(k, d, v, RngStream::new(43))?;
        let curve = bandit.play(&mut policy, 20_000, &mut rng)?;
        for t in [100, 1_000, 2_000, 5_000, 10_000, 20_000] {
            println!("  t = {t:>6}  R(t) = {:>8.2}  R(t)/t = {:.4}", curve[t - 1], curve[t - 1] / t as f64);
        }
        let fmt = |xs: &[f64]| xs.iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>().join(" ");
        println!("  arm 0 true weights {}", fmt(&bandit.weights()[0]));
        println!("  arm 0 posterior    {}", fmt(policy.arms()[0].mu_hat()));
    }
    Ok(())
}
