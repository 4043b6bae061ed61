//! Grid execution: one fresh environment and policy per
//! (policy, corruption level, repetition) cell.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use log::{info, warn};
use rayon::prelude::*;

use super::config::ExperimentConfig;
use super::records::{RoundRecord, RunId, RECORD_HEADER};
use crate::bandit::{HyperParams, PolicyKind};
use crate::dataio::{self, Dataset, KnownDataset};
use crate::environment::{CorruptionProcess, Environment};
use crate::error::{Error, Result};
use crate::numerics::RngStream;

const ENV_STREAM: u64 = 1;
const POLICY_STREAM: u64 = 2;
const SUBSAMPLE_STREAM: u64 = 3;

/// Corruption stream of a cell. Shared by every policy run on that
/// (level, repetition), so policies face identical corruption masks.
pub fn env_stream(seed: u64, level_index: usize, repetition: usize) -> RngStream {
    RngStream::keyed(seed, [ENV_STREAM, level_index as u64, repetition as u64])
}

/// Policy stream of a repetition. It does not depend on the corruption level,
/// so a context-blind policy replays identically across levels.
pub fn policy_stream(seed: u64, policy: PolicyKind, repetition: usize) -> RngStream {
    RngStream::keyed(seed, [POLICY_STREAM, policy.tag(), repetition as u64])
}

pub fn subsample_stream(seed: u64) -> RngStream {
    RngStream::keyed(seed, [SUBSAMPLE_STREAM, 0, 0])
}

/// A normalized (and possibly subsampled) dataset ready for the grid.
#[derive(Debug, Clone)]
pub struct PreparedData {
    pub dataset: Dataset,
    /// Per-feature ranges of the full normalized dataset, used for corruption.
    pub corruption_ranges: Vec<(f64, f64)>,
    pub source_rows: usize,
    pub source_hash: Option<String>,
    pub warnings: Vec<String>,
}

impl PreparedData {
    /// Normalizes `raw`, then subsamples it to `cap` rows when given.
    pub fn from_dataset(raw: &Dataset, cap: Option<usize>, seed: u64) -> Result<Self> {
        let mut full = dataio::normalize(raw);
        full.set_name(sanitize(raw.name()));
        let corruption_ranges = full.feature_ranges();
        let mut warnings = KnownDataset::from_name(raw.name())
            .map(|known| known.shape_warnings(raw))
            .unwrap_or_default();
        let source_rows = full.n();
        let dataset = match cap {
            Some(cap) if cap < full.n() => {
                warnings.push(format!("{}: subsampled {} -> {cap} rows (stratified)", full.name(), full.n()));
                dataio::subsample(&full, cap, &mut subsample_stream(seed))?
            }
            _ => full,
        };
        Ok(Self {
            dataset,
            corruption_ranges,
            source_rows,
            source_hash: None,
            warnings,
        })
    }

    /// Loads the configured dataset (a delimited file, or a `.cbcc` cache).
    pub fn load(cfg: &ExperimentConfig) -> Result<Self> {
        let path = &cfg.dataset.path;
        let raw = if path.extension().is_some_and(|e| e == "cbcc") {
            let mut ds = dataio::read_cache(path)?;
            if let Some(name) = &cfg.dataset.name {
                ds.set_name(name.clone());
            }
            ds
        } else {
            dataio::load(&cfg.dataset)?
        };
        let mut data = Self::from_dataset(&raw, cfg.cap, cfg.seed)?;
        data.source_hash = Some(dataio::content_hash(path)?);
        for w in &data.warnings {
            warn!("{w}");
        }
        Ok(data)
    }
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' { c } else { '_' })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub policy: PolicyKind,
    pub level_index: usize,
    pub p_corrupt: f64,
    pub repetition: usize,
}

impl Cell {
    pub fn run_id(&self) -> RunId {
        RunId {
            level_index: self.level_index as u32,
            repetition: self.repetition as u32,
        }
    }
}

/// Cells of one policy in write order: level-major, then repetition.
pub fn cells_for(cfg: &ExperimentConfig, policy: PolicyKind) -> Vec<Cell> {
    let mut cells = Vec::with_capacity(cfg.levels.len() * cfg.repetitions);
    for (level_index, &p_corrupt) in cfg.levels.iter().enumerate() {
        for repetition in 0..cfg.repetitions {
            cells.push(Cell {
                policy,
                level_index,
                p_corrupt,
                repetition,
            });
        }
    }
    cells
}

/// Aggregates of one finished cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellOutcome {
    pub cell: Cell,
    pub rounds: u64,
    pub errors: u64,
    pub corrupted_rounds: u64,
    /// TSCC policy choices `[α = 0, α = 1]` over all rounds.
    pub alpha_counts: [u64; 2],
    /// TSCC policy choices over the final 20% of rounds.
    pub alpha_tail_counts: [u64; 2],
}

impl CellOutcome {
    pub fn error_pct(&self) -> f64 {
        100.0 * self.errors as f64 / self.rounds as f64
    }

    /// Share of `α = 0` decisions in the final 20% of rounds, if TSCC.
    pub fn tail_noncontextual_share(&self) -> Option<f64> {
        let total = self.alpha_tail_counts[0] + self.alpha_tail_counts[1];
        (total > 0).then(|| self.alpha_tail_counts[0] as f64 / total as f64)
    }
}

/// Plays one cell, handing every round to `sink`.
pub fn run_cell(
    cell: Cell,
    data: &PreparedData,
    hyper: &HyperParams,
    seed: u64,
    rounds: u64,
    mut sink: impl FnMut(RoundRecord),
) -> Result<CellOutcome> {
    let ds = &data.dataset;
    let corruption = CorruptionProcess::new(
        cell.p_corrupt,
        data.corruption_ranges.clone(),
        env_stream(seed, cell.level_index, cell.repetition),
    )?;
    let mut env = Environment::with_corruption(ds, corruption);
    let mut policy = cell
        .policy
        .build(ds.k(), ds.d(), hyper, policy_stream(seed, cell.policy, cell.repetition))?;
    let name: Arc<str> = Arc::from(ds.name());
    let tail_start = rounds - rounds / 5;
    let mut out = CellOutcome {
        cell,
        rounds,
        errors: 0,
        corrupted_rounds: 0,
        alpha_counts: [0; 2],
        alpha_tail_counts: [0; 2],
    };
    for t in 1..=rounds {
        let round = env.next_round()?;
        let decision = policy.select(round.context())?;
        let fb = env.step(decision.arm)?;
        policy.update(round.context(), decision, fb.reward)?;
        out.errors += u64::from(1 - fb.reward);
        out.corrupted_rounds += u64::from(fb.was_corrupted);
        if let Some(alpha) = decision.alpha {
            out.alpha_counts[alpha as usize] += 1;
            if t > tail_start {
                out.alpha_tail_counts[alpha as usize] += 1;
            }
        }
        debug_assert_eq!(env.ledger().regret(), out.errors);
        sink(RoundRecord {
            dataset: name.clone(),
            policy: cell.policy,
            run: cell.run_id(),
            t,
            p_corrupt: cell.p_corrupt,
            chosen_arm: decision.arm,
            reward: fb.reward,
            was_corrupted: fb.was_corrupted,
            alpha: decision.alpha,
            cumulative_error: out.errors,
        });
    }
    Ok(out)
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {workers} workers: {e}")))
}

/// Runs every cell of the grid and returns all round records, ordered by
/// policy, level and repetition.
pub fn run_experiment(cfg: &ExperimentConfig, data: &PreparedData) -> Result<Vec<RoundRecord>> {
    cfg.validate()?;
    let rounds = cfg.rounds_for(data.dataset.n());
    let cells: Vec<Cell> = cfg.policies.iter().flat_map(|&p| cells_for(cfg, p)).collect();
    let per_cell = pool(cfg.workers)?.install(|| {
        cells
            .par_iter()
            .map(|&cell| {
                let mut recs = Vec::with_capacity(rounds as usize);
                run_cell(cell, data, &cfg.hyper, cfg.seed, rounds, |r| recs.push(r))?;
                Ok(recs)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(per_cell.into_iter().flatten().collect())
}

/// Runs every cell, keeping only per-cell aggregates.
pub fn run_outcomes(cfg: &ExperimentConfig, data: &PreparedData) -> Result<Vec<CellOutcome>> {
    cfg.validate()?;
    let rounds = cfg.rounds_for(data.dataset.n());
    let cells: Vec<Cell> = cfg.policies.iter().flat_map(|&p| cells_for(cfg, p)).collect();
    pool(cfg.workers)?.install(|| {
        cells
            .par_iter()
            .map(|&cell| run_cell(cell, data, &cfg.hyper, cfg.seed, rounds, |_| {}))
            .collect()
    })
}

/// Files produced by [`run_to_dir`].
#[derive(Debug, Clone)]
pub struct RunReport {
    pub record_files: Vec<PathBuf>,
    pub metadata_files: Vec<PathBuf>,
    pub outcomes: Vec<CellOutcome>,
}

pub fn records_path(dir: &Path, dataset: &str, policy: PolicyKind) -> PathBuf {
    dir.join(format!("records_{dataset}_{policy}.csv"))
}

pub fn metadata_path(dir: &Path, dataset: &str, policy: PolicyKind) -> PathBuf {
    dir.join(format!("meta_{dataset}_{policy}.txt"))
}

/// Runs the grid and writes one records file and one metadata file per policy.
///
/// Cells run in parallel batches of `cfg.workers`; a single writer appends
/// each batch in cell order to a temporary file, renamed into place at the end.
pub fn run_to_dir(cfg: &ExperimentConfig, data: &PreparedData) -> Result<RunReport> {
    cfg.validate()?;
    fs::create_dir_all(&cfg.out_dir).map_err(|e| Error::io(&cfg.out_dir, e))?;
    let rounds = cfg.rounds_for(data.dataset.n());
    let workers = pool(cfg.workers)?;
    let name = data.dataset.name().to_string();
    let mut report = RunReport {
        record_files: Vec::new(),
        metadata_files: Vec::new(),
        outcomes: Vec::new(),
    };
    for &policy in &cfg.policies {
        let path = records_path(&cfg.out_dir, &name, policy);
        let tmp = dataio::tmp_path(&path);
        let file = File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
        let mut w = BufWriter::new(file);
        writeln!(w, "{RECORD_HEADER}").map_err(|e| Error::io(&tmp, e))?;
        let cells = cells_for(cfg, policy);
        info!("{name}/{policy}: {} cells x {rounds} rounds", cells.len());
        for batch in cells.chunks(cfg.workers) {
            let results = workers.install(|| {
                batch
                    .par_iter()
                    .map(|&cell| {
                        let mut buf = Vec::new();
                        let outcome = run_cell(cell, data, &cfg.hyper, cfg.seed, rounds, |r| {
                            r.write_csv(&mut buf).expect("writing to memory")
                        })?;
                        Ok((outcome, buf))
                    })
                    .collect::<Result<Vec<_>>>()
            })?;
            for (outcome, buf) in results {
                w.write_all(&buf).map_err(|e| Error::io(&tmp, e))?;
                info!(
                    "{name}/{policy} p={} rep={}: error {:.2}%",
                    outcome.cell.p_corrupt,
                    outcome.cell.repetition,
                    outcome.error_pct()
                );
                report.outcomes.push(outcome);
            }
        }
        w.flush().map_err(|e| Error::io(&tmp, e))?;
        drop(w);
        fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))?;
        report.record_files.push(path);

        let meta = metadata_path(&cfg.out_dir, &name, policy);
        dataio::write_atomic(&meta, metadata_text(cfg, data, policy, rounds).as_bytes())?;
        report.metadata_files.push(meta);
    }
    Ok(report)
}

fn metadata_text(cfg: &ExperimentConfig, data: &PreparedData, policy: PolicyKind, rounds: u64) -> String {
    let ds = &data.dataset;
    let mut s = cfg.to_text();
    s.push_str(&format!("run_policy = {policy}\n"));
    s.push_str(&format!("rounds_per_cell = {rounds}\n"));
    s.push_str(&format!("instances = {}\n", ds.n()));
    s.push_str(&format!("source_instances = {}\n", data.source_rows));
    s.push_str(&format!("features = {}\n", ds.d()));
    s.push_str(&format!("classes = {}\n", ds.k()));
    if let Some(h) = &data.source_hash {
        s.push_str(&format!("dataset_sha256 = {h}\n"));
    }
    if policy != PolicyKind::Mab && policy != PolicyKind::Nsmab {
        if let Ok(v) = cfg.hyper.v(ds.d()) {
            s.push_str(&format!("v = {v}\n"));
        }
    }
    for w in &data.warnings {
        s.push_str(&format!("warning = {w}\n"));
    }
    s
}

/// Share of `α = 0` decisions among TSCC outcomes' final 20% of rounds.
pub fn mean_tail_noncontextual_share(outcomes: &[CellOutcome]) -> Option<f64> {
    let shares: Vec<f64> = outcomes.iter().filter_map(CellOutcome::tail_noncontextual_share).collect();
    (!shares.is_empty()).then(|| shares.iter().sum::<f64>() / shares.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_data() -> PreparedData {
        let mut rng = RngStream::new(99);
        let n = 60;
        let d = 4;
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for i in 0..n {
            let label = i % 3;
            for j in 0..d {
                features.push(if j == label { 1.0 } else { 0.2 * rng.uniform() });
            }
            labels.push(label);
        }
        let ds = Dataset::new("toy", d, features, labels, 3).unwrap();
        PreparedData::from_dataset(&ds, None, 0).unwrap()
    }

    fn cfg() -> ExperimentConfig {
        let mut c = ExperimentConfig::default();
        c.set("dataset", "toy.csv").unwrap();
        c.set("rounds", "50").unwrap();
        c.set("reps", "2").unwrap();
        c.set("levels", "0,0.5,1").unwrap();
        c
    }

    #[test]
    fn mab_is_context_blind_across_levels() {
        let mut c = cfg();
        c.set("policy", "mab").unwrap();
        let recs = run_experiment(&c, &toy_data()).unwrap();
        let pick = |lvl: u32| -> Vec<(u64, usize, u8, u64)> {
            recs.iter()
                .filter(|r| r.run.level_index == lvl && r.run.repetition == 1)
                .map(|r| (r.t, r.chosen_arm, r.reward, r.cumulative_error))
                .collect()
        };
        assert_eq!(pick(0), pick(1));
        assert_eq!(pick(0), pick(2));
        assert_eq!(pick(0).len(), 50);
    }

    #[test]
    fn records_are_ordered_and_cumulative() {
        let mut c = cfg();
        c.set("policy", "tscc,nsmab").unwrap();
        let recs = run_experiment(&c, &toy_data()).unwrap();
        assert_eq!(recs.len(), 2 * 3 * 2 * 50);
        for w in recs.windows(2) {
            if w[0].run == w[1].run && w[0].policy == w[1].policy {
                assert_eq!(w[1].t, w[0].t + 1);
                assert!(w[1].cumulative_error >= w[0].cumulative_error);
            }
        }
        assert!(recs.iter().filter(|r| r.policy == PolicyKind::Tscc).all(|r| r.alpha.is_some()));
        assert!(recs.iter().filter(|r| r.policy == PolicyKind::Nsmab).all(|r| r.alpha.is_none()));
    }

    #[test]
    fn rejects_zero_rounds() {
        let mut c = cfg();
        c.rounds = Some(0);
        assert!(matches!(run_experiment(&c, &toy_data()), Err(Error::Config(_))));
    }

    #[test]
    fn streams_are_distinct() {
        use rand::RngCore;
        let mut seen = std::collections::HashSet::new();
        for level in 0..5 {
            for rep in 0..10 {
                assert!(seen.insert(env_stream(7, level, rep).next_u64()));
            }
        }
        for p in PolicyKind::ALL {
            for rep in 0..10 {
                assert!(seen.insert(policy_stream(7, p, rep).next_u64()));
            }
        }
    }
}
