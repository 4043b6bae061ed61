//! The round protocol by hand: a cyclic stream over a tiny dataset, contexts
//! corrupted with probability 0.5, and the regret ledger.
//!
//! Run: `cargo run --example corruption_environment`

use cbcc::dataio::{normalize, Dataset};
use cbcc::environment::Environment;
use cbcc::numerics::RngStream;

fn main() -> cbcc::Result<()> {
    let raw = Dataset::new(
        "toy",
        2,
        vec![0.0, 10.0, 5.0, 20.0, 10.0, 30.0, 2.0, 12.0],
        vec![0, 1, 1, 0],
        2,
    )?;
    let ds = normalize(&raw);
    let mut env = Environment::new(&ds, 0.5, RngStream::new(8))?;

    for _ in 0..8 {
        let round = env.next_round()?;
        let guess = usize::from(round.context()[0] > 0.5);
        let fb = env.step(guess)?;
        println!(
            "t={} instance={} context={:?} corrupted={} guess={guess} label={} reward={}",
            round.t(),
            fb.instance,
            round.context().iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>(),
            fb.was_corrupted,
            fb.true_label,
            fb.reward
        );
    }
    // Stepping twice without a new round is a protocol error.
    assert!(env.step(0).is_err());
    let ledger = env.ledger();
    println!("rounds {} reward {} regret {}", ledger.rounds(), ledger.cumulative_reward(), ledger.regret());
    Ok(())
}
