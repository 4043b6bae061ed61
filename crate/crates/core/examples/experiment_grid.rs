//! A full (policy x corruption level x repetition) grid written to disk, then
//! summarized and turned into curves, the same steps `cbcc run`,
//! `cbcc summarize` and `cbcc curves` perform.
//!
//! Run: `cargo run --release --example experiment_grid [out_dir]`

use cbcc::harness::{curves_dir, run_to_dir, summarize_dir, summary_csv, ExperimentConfig, PreparedData};
use cbcc::numerics::RngStream;
use cbcc::synthetic::{sparse_classification, SparseClassSpec};

fn main() -> cbcc::Result<()> {
    let out = std::env::args()
        .nth(1)
        .unwrap_or_else(|| std::env::temp_dir().join("cbcc-grid").display().to_string());

    let mut cfg = ExperimentConfig::default();
    cfg.apply_text(&format!(
        "# flat key = value, same format as --config files\n\
         dataset = synthetic\n\
         levels = 0.05, 0.5, 0.95\n\
         reps = 3\n\
         rounds = 2000\n\
         workers = 2\n\
         out = {out}\n"
    ))?;
    cfg.validate()?;

    let mut rng = RngStream::new(11);
    let raw = sparse_classification("synthetic", SparseClassSpec::document_like(300, 40, 3), &mut rng)?;
    let data = PreparedData::from_dataset(&raw, cfg.cap, cfg.seed)?;
    let report = run_to_dir(&cfg, &data)?;
    for f in &report.record_files {
        println!("wrote {}", f.display());
    }

    let (rows, levels) = summarize_dir(&cfg.out_dir)?;
    for r in &rows {
        println!("{:<10} {:<6} {:>6.2} ± {:.2} ({} cells)", r.dataset, r.policy, r.mean_error_pct, r.std_error_pct, r.cells);
    }
    print!("{}", summary_csv(&rows, &levels));
    for f in curves_dir(&cfg.out_dir)? {
        println!("curve {}", f.display());
    }
    Ok(())
}
