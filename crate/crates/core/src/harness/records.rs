use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::Arc;

use crate::bandit::{Alpha, PolicyKind};
use crate::error::{Error, Result};

pub const RECORD_HEADER: &str = "dataset,policy,run_id,t,p_corrupt,chosen_arm,reward,was_corrupted,alpha,cumulative_error";

/// Identifies one grid cell within a policy's run: corruption level and repetition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RunId {
    pub level_index: u32,
    pub repetition: u32,
}

impl fmt::Display for RunId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "l{}-r{}", self.level_index, self.repetition)
    }
}

impl std::str::FromStr for RunId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::ParseError {
            row: 0,
            column: 3,
            message: format!("malformed run id {s:?}"),
        };
        let rest = s.strip_prefix('l').ok_or_else(bad)?;
        let (l, r) = rest.split_once("-r").ok_or_else(bad)?;
        Ok(RunId {
            level_index: l.parse().map_err(|_| bad())?,
            repetition: r.parse().map_err(|_| bad())?,
        })
    }
}

/// One played round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub dataset: Arc<str>,
    pub policy: PolicyKind,
    pub run: RunId,
    pub t: u64,
    pub p_corrupt: f64,
    pub chosen_arm: usize,
    pub reward: u8,
    pub was_corrupted: bool,
    /// The deciding TSCC policy, `None` for other policies (written as `-1`).
    pub alpha: Option<Alpha>,
    pub cumulative_error: u64,
}

impl RoundRecord {
    pub fn alpha_code(&self) -> i8 {
        self.alpha.map_or(-1, |a| a as i8)
    }

    pub fn write_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            self.dataset,
            self.policy,
            self.run,
            self.t,
            self.p_corrupt,
            self.chosen_arm,
            self.reward,
            u8::from(self.was_corrupted),
            self.alpha_code(),
            self.cumulative_error
        )
    }

    pub fn parse_csv(line: &str, row: usize) -> Result<Self> {
        let fields: Vec<&str> = line.trim_end().split(',').collect();
        if fields.len() != 10 {
            return Err(Error::ParseError {
                row,
                column: fields.len(),
                message: format!("expected 10 fields, found {}", fields.len()),
            });
        }
        fn num<T: std::str::FromStr>(s: &str, row: usize, column: usize) -> Result<T> {
            s.parse().map_err(|_| Error::ParseError {
                row,
                column,
                message: format!("invalid value {s:?}"),
            })
        }
        let alpha = match fields[8] {
            "-1" => None,
            "0" => Some(Alpha::NonContextual),
            "1" => Some(Alpha::Contextual),
            other => {
                return Err(Error::ParseError {
                    row,
                    column: 9,
                    message: format!("invalid alpha {other:?}"),
                })
            }
        };
        Ok(RoundRecord {
            dataset: Arc::from(fields[0]),
            policy: fields[1].parse()?,
            run: fields[2].parse()?,
            t: num(fields[3], row, 4)?,
            p_corrupt: num(fields[4], row, 5)?,
            chosen_arm: num(fields[5], row, 6)?,
            reward: num(fields[6], row, 7)?,
            was_corrupted: num::<u8>(fields[7], row, 8)? == 1,
            alpha,
            cumulative_error: num(fields[9], row, 10)?,
        })
    }
}

/// Streams every record of a records file through `f`.
pub fn read_records(path: &Path, mut f: impl FnMut(RoundRecord)) -> Result<()> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut lines = BufReader::new(file).lines();
    match lines.next() {
        Some(Ok(h)) if h.trim_end() == RECORD_HEADER => {}
        Some(Err(e)) => return Err(Error::io(path, e)),
        _ => {
            return Err(Error::ParseError {
                row: 1,
                column: 1,
                message: format!("{} is missing the record header", path.display()),
            })
        }
    }
    for (i, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.is_empty() {
            continue;
        }
        f(RoundRecord::parse_csv(&line, i + 2)?);
    }
    Ok(())
}

pub fn write_records(path: &Path, records: &[RoundRecord]) -> Result<()> {
    let mut buf = Vec::with_capacity(records.len() * 48 + RECORD_HEADER.len() + 1);
    writeln!(buf, "{RECORD_HEADER}").unwrap();
    for r in records {
        r.write_csv(&mut buf).unwrap();
    }
    crate::dataio::write_atomic(path, &buf)
}
