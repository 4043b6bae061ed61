//! TSCC against its two halves on a classification stream whose contexts are
//! replaced by noise with probability `p`. As `p` grows the meta-bandit shifts
//! its choices toward the non-contextual model.
//!
//! Run: `cargo run --release --example tscc_corrupted_stream`

use cbcc::bandit::PolicyKind;
use cbcc::harness::{run_outcomes, ExperimentConfig, PreparedData};
use cbcc::numerics::RngStream;
use cbcc::synthetic::{sparse_classification, SparseClassSpec};

fn main() -> cbcc::Result<()> {
    let mut rng = RngStream::new(3);
    let raw = sparse_classification("docs", SparseClassSpec::document_like(400, 60, 4), &mut rng)?;
    let data = PreparedData::from_dataset(&raw, None, 0)?;

    let mut cfg = ExperimentConfig::default();
    cfg.dataset.path = "docs".into();
    cfg.policies = vec![PolicyKind::Mab, PolicyKind::Cmab, PolicyKind::Tscc];
    cfg.levels = vec![0.0, 0.5, 0.95, 1.0];
    cfg.repetitions = 3;
    // A narrower posterior than the default makes the contextual model usable
    // at this small scale.
    cfg.hyper.r_scale = 0.05;

    let outcomes = run_outcomes(&cfg, &data)?;
    println!("{:>6} {:>8} {:>8} {:>8} {:>14}", "p", "mab %", "cmab %", "tscc %", "tscc alpha=0 %");
    for &p in &cfg.levels {
        let at = |kind| {
            let cells: Vec<_> = outcomes
                .iter()
                .filter(|o| o.cell.p_corrupt == p && o.cell.policy == kind)
                .collect();
            let err = cells.iter().map(|o| o.error_pct()).sum::<f64>() / cells.len() as f64;
            let share = cells.iter().filter_map(|o| o.tail_noncontextual_share()).sum::<f64>() / cells.len() as f64;
            (err, share)
        };
        let (mab, _) = at(PolicyKind::Mab);
        let (cmab, _) = at(PolicyKind::Cmab);
        let (tscc, share) = at(PolicyKind::Tscc);
        println!("{p:>6.2} {mab:>8.2} {cmab:>8.2} {tscc:>8.2} {:>14.1}", 100.0 * share);
    }
    Ok(())
}
