//! Experiment configuration: flat `key = value` files layered under
//! `CBCC_*` environment variables and command-line overrides.

use std::path::{Path, PathBuf};

use crate::bandit::{HyperParams, PolicyKind};
use crate::dataio::{DatasetSpec, LabelColumn};
use crate::error::{Error, Result};

/// Passes over the dataset when `rounds` is not given.
pub const DEFAULT_PASSES: usize = 10;

pub const DEFAULT_LEVELS: [f64; 5] = [0.05, 0.25, 0.5, 0.75, 0.95];

pub const ENV_PREFIX: &str = "CBCC_";

/// Keys accepted in config files, `CBCC_<KEY>` variables and overrides.
pub const KEYS: &[&str] = &[
    "dataset",
    "name",
    "delimiter",
    "label_column",
    "header",
    "policy",
    "levels",
    "rounds",
    "reps",
    "seed",
    "cap",
    "workers",
    "out",
    "r_scale",
    "epsilon",
    "gamma_conf",
    "s0",
    "f0",
    "window",
    "xi",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dataset: DatasetSpec,
    pub policies: Vec<PolicyKind>,
    pub levels: Vec<f64>,
    /// `None` plays [`DEFAULT_PASSES`] full passes over the (subsampled) dataset.
    pub rounds: Option<u64>,
    pub repetitions: usize,
    pub seed: u64,
    pub hyper: HyperParams,
    pub cap: Option<usize>,
    pub workers: usize,
    pub out_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dataset: DatasetSpec::new(""),
            policies: PolicyKind::ALL.to_vec(),
            levels: DEFAULT_LEVELS.to_vec(),
            rounds: None,
            repetitions: 10,
            seed: 0,
            hyper: HyperParams::default(),
            cap: None,
            workers: 1,
            out_dir: PathBuf::from("results"),
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("invalid value {value:?} for {key}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        _ => Err(Error::Config(format!("invalid boolean {value:?} for {key}"))),
    }
}

impl ExperimentConfig {
    /// Sets one key. Unknown keys are errors.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().to_ascii_lowercase();
        let v = value.trim();
        match key.as_str() {
            "dataset" => self.dataset.path = PathBuf::from(v),
            "name" => self.dataset.name = Some(v.to_string()),
            "delimiter" => {
                self.dataset.delimiter = match v {
                    "auto" => None,
                    "," | "comma" => Some(b','),
                    ";" | "semicolon" => Some(b';'),
                    "\\t" | "tab" => Some(b'\t'),
                    _ => return Err(Error::Config(format!("unsupported delimiter {v:?}"))),
                }
            }
            "label_column" => self.dataset.label_column = v.parse::<LabelColumn>()?,
            "header" => self.dataset.header = parse_bool(&key, v)?,
            "policy" | "policies" => {
                self.policies = v
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(str::parse)
                    .collect::<Result<_>>()?
            }
            "levels" => {
                self.levels = v
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| parse_num(&key, s))
                    .collect::<Result<_>>()?
            }
            "rounds" => {
                self.rounds = match v {
                    "" | "auto" => None,
                    _ => Some(parse_num(&key, v)?),
                }
            }
            "reps" | "repetitions" => self.repetitions = parse_num(&key, v)?,
            "seed" => self.seed = parse_num(&key, v)?,
            "cap" => {
                self.cap = match v {
                    "" | "none" => None,
                    _ => Some(parse_num(&key, v)?),
                }
            }
            "workers" => self.workers = parse_num(&key, v)?,
            "out" => self.out_dir = PathBuf::from(v),
            "r_scale" => self.hyper.r_scale = parse_num(&key, v)?,
            "epsilon" => self.hyper.epsilon = parse_num(&key, v)?,
            "gamma_conf" | "gamma" => self.hyper.gamma_conf = parse_num(&key, v)?,
            "s0" => self.hyper.s0 = parse_num(&key, v)?,
            "f0" => self.hyper.f0 = parse_num(&key, v)?,
            "window" => self.hyper.window = parse_num(&key, v)?,
            "xi" => self.hyper.xi = parse_num(&key, v)?,
            _ => return Err(Error::Config(format!("unknown configuration key {key:?}"))),
        }
        Ok(())
    }

    /// Applies a flat `key = value` document; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
            self.set(k, v)
                .map_err(|e| Error::Config(format!("line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        self.apply_text(&text)
    }

    /// Applies `CBCC_<KEY>` variables from `vars`.
    pub fn apply_env<I, K, V>(&mut self, vars: I) -> Result<()>
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: AsRef<str>,
    {
        for (k, v) in vars {
            if let Some(key) = k.as_ref().strip_prefix(ENV_PREFIX) {
                let key = key.to_ascii_lowercase();
                if KEYS.contains(&key.as_str()) {
                    self.set(&key, v.as_ref())?;
                }
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.dataset.path.as_os_str().is_empty() {
            return Err(Error::Config("no dataset given".into()));
        }
        if self.policies.is_empty() {
            return Err(Error::Config("no policy given".into()));
        }
        if self.levels.is_empty() {
            return Err(Error::Config("no corruption levels given".into()));
        }
        if let Some(p) = self.levels.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::Config(format!("corruption level {p} outside [0, 1]")));
        }
        if self.rounds == Some(0) {
            return Err(Error::Config("rounds must be >= 1".into()));
        }
        if self.repetitions == 0 {
            return Err(Error::Config("reps must be >= 1".into()));
        }
        if self.cap == Some(0) {
            return Err(Error::Config("cap must be >= 1".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be >= 1".into()));
        }
        self.hyper.validate().map_err(|e| Error::Config(e.to_string()))
    }

    /// Rounds per cell for a dataset of `n` rows.
    pub fn rounds_for(&self, n: usize) -> u64 {
        self.rounds.unwrap_or((DEFAULT_PASSES * n) as u64)
    }

    /// Canonical `key = value` echo, used in run metadata.
    pub fn to_text(&self) -> String {
        let h = &self.hyper;
        let list = |v: &[String]| v.join(",");
        let lines = [
            ("dataset", self.dataset.path.display().to_string()),
            ("name", self.dataset.display_name()),
            (
                "delimiter",
                self.dataset.delimiter.map_or("auto".into(), |d| (d as char).to_string()),
            ),
            ("label_column", self.dataset.label_column.to_string()),
            ("header", self.dataset.header.to_string()),
            (
                "policy",
                list(&self.policies.iter().map(ToString::to_string).collect::<Vec<_>>()),
            ),
            ("levels", list(&self.levels.iter().map(ToString::to_string).collect::<Vec<_>>())),
            ("rounds", self.rounds.map_or("auto".into(), |r| r.to_string())),
            ("reps", self.repetitions.to_string()),
            ("seed", self.seed.to_string()),
            ("cap", self.cap.map_or("none".into(), |c| c.to_string())),
            ("workers", self.workers.to_string()),
            ("out", self.out_dir.display().to_string()),
            ("r_scale", h.r_scale.to_string()),
            ("epsilon", h.epsilon.to_string()),
            ("gamma_conf", h.gamma_conf.to_string()),
            ("s0", h.s0.to_string()),
            ("f0", h.f0.to_string()),
            ("window", h.window.to_string()),
            ("xi", h.xi.to_string()),
        ];
        lines.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_file() {
        let mut cfg = ExperimentConfig::default();
        cfg.apply_text(
            "# comment\ndataset = data/CNAE-9.data\nlabel_column = first\npolicy = tscc, cmab\nlevels=0,1\nreps = 3 # inline\n",
        )
        .unwrap();
        assert_eq!(cfg.dataset.path, PathBuf::from("data/CNAE-9.data"));
        assert_eq!(cfg.dataset.label_column, LabelColumn::First);
        assert_eq!(cfg.policies, vec![PolicyKind::Tscc, PolicyKind::Cmab]);
        assert_eq!(cfg.levels, vec![0.0, 1.0]);
        assert_eq!(cfg.repetitions, 3);
        cfg.validate().unwrap();
    }

    #[test]
    fn precedence_is_later_wins() {
        let mut cfg = ExperimentConfig::default();
        cfg.apply_text("dataset = a.csv\nseed = 1\nreps = 2\n").unwrap();
        cfg.apply_env([("CBCC_SEED", "5"), ("HOME", "/root"), ("CBCC_REPS", "4")]).unwrap();
        cfg.set("seed", "9").unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.repetitions, 4);
    }

    #[test]
    fn rejects_invalid_grids() {
        let mut cfg = ExperimentConfig::default();
        cfg.set("dataset", "x.csv").unwrap();
        cfg.set("rounds", "0").unwrap();
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        cfg.set("rounds", "10").unwrap();
        cfg.set("levels", "0.5,1.2").unwrap();
        assert!(cfg.validate().is_err());
        cfg.set("levels", "0.5").unwrap();
        cfg.set("epsilon", "2").unwrap();
        assert!(cfg.validate().is_err());
        assert!(cfg.set("bogus", "1").is_err());
        assert!(cfg.set("policy", "linucb").is_err());
        assert!(ExperimentConfig::default().validate().is_err());
    }

    #[test]
    fn echo_round_trips() {
        let mut cfg = ExperimentConfig::default();
        cfg.apply_text("dataset = d.csv\ncap = 200\nrounds = 77\nxi = 0.25\n").unwrap();
        let mut again = ExperimentConfig::default();
        again.apply_text(&cfg.to_text()).unwrap();
        assert_eq!(again.cap, Some(200));
        assert_eq!(again.rounds, Some(77));
        assert_eq!(again.hyper, cfg.hyper);
        assert_eq!(again.dataset.path, cfg.dataset.path);
    }
}
