//! Loading a delimited file, min-max normalization, stratified subsampling,
//! the binary cache and the content hash.
//!
//! Run: `cargo run --example dataset_pipeline`

use cbcc::dataio::{self, DatasetSpec, LabelColumn};
use cbcc::numerics::RngStream;

fn main() -> cbcc::Result<()> {
    let dir = std::env::temp_dir().join(format!("cbcc-pipeline-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| cbcc::Error::InvalidParameter(e.to_string()))?;
    let csv = dir.join("weather.csv");
    let mut text = String::from("outlook;temp;humidity\n");
    let mut rng = RngStream::new(1);
    for i in 0..60 {
        let label = ["sunny", "rain", "fog"][if i % 10 == 0 { 2 } else { i % 2 }];
        text.push_str(&format!("{label};{:.1};{:.0}\n", 10.0 + 20.0 * rng.uniform(), 40.0 + 50.0 * rng.uniform()));
    }
    dataio::write_atomic(&csv, text.as_bytes())?;

    let spec = DatasetSpec::new(&csv).label_column(LabelColumn::First).header(true);
    let raw = dataio::load(&spec)?;
    println!("{}: n={} d={} k={} labels={:?}", raw.name(), raw.n(), raw.d(), raw.k(), raw.label_names());
    println!("class counts {:?}", raw.class_counts());

    let ds = dataio::normalize(&raw);
    println!("ranges after normalization {:?}", ds.feature_ranges());
    println!("stored scaling {:?}", ds.scaling());

    let small = dataio::subsample(&ds, 12, &mut RngStream::new(7))?;
    println!("subsample of 12: class counts {:?}", small.class_counts());

    let cache = dir.join("weather.cbcc");
    dataio::write_cache(&ds, &cache)?;
    let back = dataio::read_cache(&cache)?;
    println!("cache round-trip exact: {}", back == ds);
    println!("sha256 (git blob) of csv: {}", dataio::content_hash(&csv)?);

    let _ = std::fs::remove_dir_all(&dir);
    Ok(())
}
