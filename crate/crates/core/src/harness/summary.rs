//! Aggregation of round records into error tables and cumulative-error curves.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::records::{read_records, RoundRecord, RunId};
use crate::bandit::PolicyKind;
use crate::dataio::write_atomic;
use crate::error::{Error, Result};

/// Mean and spread of the final error rate over all cells of a policy.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub dataset: String,
    pub policy: PolicyKind,
    /// Mean of per-cell `100 · errors / rounds`.
    pub mean_error_pct: f64,
    /// Sample standard deviation across (repetition × level) cells; 0 for one cell.
    pub std_error_pct: f64,
    pub cells: usize,
}

/// Same as [`SummaryRow`] restricted to one corruption level.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSummary {
    pub dataset: String,
    pub policy: PolicyKind,
    pub p_corrupt: f64,
    pub mean_error_pct: f64,
    pub std_error_pct: f64,
    /// Mean final cumulative error count across repetitions.
    pub mean_final_errors: f64,
    pub cells: usize,
}

#[derive(Debug, Clone, Copy)]
struct FinalState {
    t: u64,
    errors: u64,
    p_corrupt: f64,
}

/// Keeps the last round of every run; insensitive to record order.
#[derive(Debug, Default, Clone)]
pub struct SummaryAccumulator {
    runs: BTreeMap<(String, PolicyKind, RunId), FinalState>,
}

impl SummaryAccumulator {
    pub fn push(&mut self, r: &RoundRecord) {
        let key = (r.dataset.to_string(), r.policy, r.run);
        let e = self.runs.entry(key).or_insert(FinalState {
            t: 0,
            errors: 0,
            p_corrupt: r.p_corrupt,
        });
        if r.t > e.t {
            *e = FinalState {
                t: r.t,
                errors: r.cumulative_error,
                p_corrupt: r.p_corrupt,
            };
        }
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn rows(&self) -> Result<Vec<SummaryRow>> {
        if self.runs.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut groups: BTreeMap<(String, PolicyKind), Vec<f64>> = BTreeMap::new();
        for ((ds, policy, _), st) in &self.runs {
            groups
                .entry((ds.clone(), *policy))
                .or_default()
                .push(100.0 * st.errors as f64 / st.t as f64);
        }
        Ok(groups
            .into_iter()
            .map(|((dataset, policy), v)| {
                let (mean, std) = mean_std(&v);
                SummaryRow {
                    dataset,
                    policy,
                    mean_error_pct: mean,
                    std_error_pct: std,
                    cells: v.len(),
                }
            })
            .collect())
    }

    pub fn level_rows(&self) -> Result<Vec<LevelSummary>> {
        if self.runs.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut groups: BTreeMap<(String, PolicyKind, u32), (f64, Vec<f64>, Vec<f64>)> = BTreeMap::new();
        for ((ds, policy, run), st) in &self.runs {
            let g = groups
                .entry((ds.clone(), *policy, run.level_index))
                .or_insert((st.p_corrupt, Vec::new(), Vec::new()));
            g.1.push(100.0 * st.errors as f64 / st.t as f64);
            g.2.push(st.errors as f64);
        }
        Ok(groups
            .into_iter()
            .map(|((dataset, policy, _), (p_corrupt, pct, counts))| {
                let (mean, std) = mean_std(&pct);
                LevelSummary {
                    dataset,
                    policy,
                    p_corrupt,
                    mean_error_pct: mean,
                    std_error_pct: std,
                    mean_final_errors: counts.iter().sum::<f64>() / counts.len() as f64,
                    cells: counts.len(),
                }
            })
            .collect())
    }
}

/// Sample mean and standard deviation (`n − 1`); a single value has std 0.
pub fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Per-(dataset, policy) error table over all cells.
pub fn summarize(records: &[RoundRecord]) -> Result<Vec<SummaryRow>> {
    let mut acc = SummaryAccumulator::default();
    records.iter().for_each(|r| acc.push(r));
    acc.rows()
}

pub fn summarize_by_level(records: &[RoundRecord]) -> Result<Vec<LevelSummary>> {
    let mut acc = SummaryAccumulator::default();
    records.iter().for_each(|r| acc.push(r));
    acc.level_rows()
}

/// Mean cumulative error per round, grouped by dataset, level and policy.
#[derive(Debug, Default, Clone)]
pub struct CurveAccumulator {
    // (dataset, p_corrupt bits) -> policy -> per-t (sum, count)
    curves: BTreeMap<(String, u64), BTreeMap<PolicyKind, Vec<(u64, u32)>>>,
}

impl CurveAccumulator {
    pub fn push(&mut self, r: &RoundRecord) {
        let per_t = self
            .curves
            .entry((r.dataset.to_string(), r.p_corrupt.to_bits()))
            .or_default()
            .entry(r.policy)
            .or_default();
        let idx = (r.t - 1) as usize;
        if per_t.len() <= idx {
            per_t.resize(idx + 1, (0, 0));
        }
        per_t[idx].0 += r.cumulative_error;
        per_t[idx].1 += 1;
    }

    /// Mean curve of one (dataset, level, policy), indexed by `t − 1`.
    pub fn curve(&self, dataset: &str, p_corrupt: f64, policy: PolicyKind) -> Option<Vec<f64>> {
        self.curves
            .get(&(dataset.to_string(), p_corrupt.to_bits()))?
            .get(&policy)
            .map(|v| v.iter().map(|&(s, c)| s as f64 / c.max(1) as f64).collect())
    }

    /// Writes `curve_<dataset>_p<level>.csv` files with columns
    /// `t,policy,mean_cumulative_error`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut files = Vec::new();
        for ((dataset, bits), by_policy) in &self.curves {
            let p = f64::from_bits(*bits);
            let path = dir.join(format!("curve_{dataset}_p{p}.csv"));
            let mut text = String::from("t,policy,mean_cumulative_error\n");
            for (policy, per_t) in by_policy {
                for (i, &(sum, count)) in per_t.iter().enumerate() {
                    if count > 0 {
                        writeln!(text, "{},{},{}", i + 1, policy, sum as f64 / count as f64).unwrap();
                    }
                }
            }
            write_atomic(&path, text.as_bytes())?;
            files.push(path);
        }
        Ok(files)
    }
}

pub fn emit_curves(records: &[RoundRecord], dir: &Path) -> Result<Vec<PathBuf>> {
    let mut acc = CurveAccumulator::default();
    records.iter().for_each(|r| acc.push(r));
    acc.write(dir)
}

/// Records files (`records_*.csv`) in `dir`, sorted by name.
pub fn record_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("records_") && n.ends_with(".csv"))
        })
        .collect();
    files.sort();
    Ok(files)
}

pub fn summarize_dir(dir: &Path) -> Result<(Vec<SummaryRow>, Vec<LevelSummary>)> {
    let mut acc = SummaryAccumulator::default();
    for f in record_files(dir)? {
        read_records(&f, |r| acc.push(&r))?;
    }
    Ok((acc.rows()?, acc.level_rows()?))
}

pub fn curves_dir(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut acc = CurveAccumulator::default();
    for f in record_files(dir)? {
        read_records(&f, |r| acc.push(&r))?;
    }
    acc.write(dir)
}

/// `summary.csv` text for a set of rows.
pub fn summary_csv(rows: &[SummaryRow], levels: &[LevelSummary]) -> String {
    let mut s = String::from("dataset,policy,p_corrupt,mean_error_pct,std_error_pct,cells\n");
    for r in rows {
        writeln!(s, "{},{},all,{:.4},{:.4},{}", r.dataset, r.policy, r.mean_error_pct, r.std_error_pct, r.cells).unwrap();
    }
    for r in levels {
        writeln!(
            s,
            "{},{},{},{:.4},{:.4},{}",
            r.dataset, r.policy, r.p_corrupt, r.mean_error_pct, r.std_error_pct, r.cells
        )
        .unwrap();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn rec(policy: PolicyKind, level: u32, rep: u32, t: u64, err: u64) -> RoundRecord {
        RoundRecord {
            dataset: Arc::from("d"),
            policy,
            run: RunId { level_index: level, repetition: rep },
            t,
            p_corrupt: level as f64 / 10.0,
            chosen_arm: 0,
            reward: 0,
            was_corrupted: false,
            alpha: None,
            cumulative_error: err,
        }
    }

    #[test]
    fn error_ratio() {
        let recs: Vec<_> = (1..=100).map(|t| rec(PolicyKind::Mab, 0, 0, t, (t * 40) / 100)).collect();
        let rows = summarize(&recs).unwrap();
        assert_eq!(rows.len(), 1);
        assert!((rows[0].mean_error_pct - 40.0).abs() < 1e-12);
        assert_eq!(rows[0].std_error_pct, 0.0);
    }

    #[test]
    fn sample_std_over_cells() {
        let recs = vec![rec(PolicyKind::Cmab, 0, 0, 10, 2), rec(PolicyKind::Cmab, 1, 0, 10, 4)];
        let rows = summarize(&recs).unwrap();
        assert!((rows[0].mean_error_pct - 30.0).abs() < 1e-12);
        assert!((rows[0].std_error_pct - 200f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn empty_input() {
        assert!(matches!(summarize(&[]), Err(Error::EmptyInput)));
    }

    #[test]
    fn curve_means() {
        let mut acc = CurveAccumulator::default();
        for r in [rec(PolicyKind::Mab, 1, 0, 1, 1), rec(PolicyKind::Mab, 1, 1, 1, 0), rec(PolicyKind::Mab, 1, 0, 2, 2)] {
            acc.push(&r);
        }
        assert_eq!(acc.curve("d", 0.1, PolicyKind::Mab).unwrap(), vec![0.5, 2.0]);
        assert!(acc.curve("d", 0.2, PolicyKind::Mab).is_none());
    }
}
