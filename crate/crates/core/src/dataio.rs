//! Delimited-file loading, min–max normalization, stratified subsampling and
//! the binary dataset cache.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::index;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::numerics::RngStream;

const CACHE_MAGIC: &[u8; 4] = b"CBCC";
const CACHE_VERSION: u8 = 1;

/// A labelled classification dataset with `n` rows of `d` real features and
/// labels in `0..k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: String,
    d: usize,
    k: usize,
    features: Vec<f64>,
    labels: Vec<usize>,
    label_names: Vec<String>,
    scaling: Option<Vec<(f64, f64)>>,
}

impl Dataset {
    /// Builds a dataset from row-major features. Label names default to the
    /// label indices.
    pub fn new(name: impl Into<String>, d: usize, features: Vec<f64>, labels: Vec<usize>, k: usize) -> Result<Self> {
        let names = (0..k).map(|i| i.to_string()).collect();
        Self::with_label_names(name, d, features, labels, names)
    }

    pub fn with_label_names(
        name: impl Into<String>,
        d: usize,
        features: Vec<f64>,
        labels: Vec<usize>,
        label_names: Vec<String>,
    ) -> Result<Self> {
        let name = name.into();
        let k = label_names.len();
        if labels.is_empty() {
            return Err(Error::EmptyDataset(name));
        }
        if d == 0 {
            return Err(Error::InvalidParameter("datasets need at least one feature".into()));
        }
        if features.len() != labels.len() * d {
            return Err(Error::DimensionMismatch {
                expected: labels.len() * d,
                actual: features.len(),
            });
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= k) {
            return Err(Error::InvalidParameter(format!("label {bad} out of range for k = {k}")));
        }
        if let Some(pos) = features.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonNumericFeature {
                row: pos / d + 1,
                column: pos % d + 1,
                value: features[pos].to_string(),
            });
        }
        Ok(Self {
            name,
            d,
            k,
            features,
            labels,
            label_names,
            scaling: None,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.d..(i + 1) * self.d]
    }

    #[inline]
    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn label_names(&self) -> &[String] {
        &self.label_names
    }

    /// Raw per-feature `(min, max)` recorded by [`normalize`], if applied.
    pub fn scaling(&self) -> Option<&[(f64, f64)]> {
        self.scaling.as_deref()
    }

    /// Observed `(min, max)` of each feature column as currently stored.
    pub fn feature_ranges(&self) -> Vec<(f64, f64)> {
        let mut ranges = vec![(f64::INFINITY, f64::NEG_INFINITY); self.d];
        for row in self.features.chunks_exact(self.d) {
            for (r, &x) in ranges.iter_mut().zip(row) {
                r.0 = r.0.min(x);
                r.1 = r.1.max(x);
            }
        }
        ranges
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.k];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelColumn {
    First,
    Last,
    Index(usize),
}

impl LabelColumn {
    fn resolve(self, columns: usize) -> Option<usize> {
        match self {
            LabelColumn::First => (columns > 0).then_some(0),
            LabelColumn::Last => columns.checked_sub(1),
            LabelColumn::Index(i) => (i < columns).then_some(i),
        }
    }
}

impl FromStr for LabelColumn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "first" => Ok(LabelColumn::First),
            "last" => Ok(LabelColumn::Last),
            other => other
                .parse()
                .map(LabelColumn::Index)
                .map_err(|_| Error::Config(format!("label column must be first, last or an index, got {s:?}"))),
        }
    }
}

impl fmt::Display for LabelColumn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelColumn::First => f.write_str("first"),
            LabelColumn::Last => f.write_str("last"),
            LabelColumn::Index(i) => write!(f, "{i}"),
        }
    }
}

/// Where and how to read a delimited dataset file.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSpec {
    pub path: PathBuf,
    /// `None` sniffs `;` versus `,` from the first line.
    pub delimiter: Option<u8>,
    pub label_column: LabelColumn,
    pub header: bool,
    /// Display name; defaults to the file stem.
    pub name: Option<String>,
}

impl DatasetSpec {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Self {
            path: path.into(),
            delimiter: None,
            label_column: LabelColumn::Last,
            header: false,
            name: None,
        }
    }

    pub fn label_column(mut self, col: LabelColumn) -> Self {
        self.label_column = col;
        self
    }

    pub fn header(mut self, header: bool) -> Self {
        self.header = header;
        self
    }

    pub fn delimiter(mut self, delimiter: u8) -> Self {
        self.delimiter = Some(delimiter);
        self
    }

    pub fn name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn display_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| {
            self.path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "dataset".into())
        })
    }
}

fn sniff_delimiter(bytes: &[u8]) -> u8 {
    let first_line = bytes.split(|&b| b == b'\n').next().unwrap_or(&[]);
    let semis = first_line.iter().filter(|&&b| b == b';').count();
    let commas = first_line.iter().filter(|&&b| b == b',').count();
    if semis > commas {
        b';'
    } else {
        b','
    }
}

/// Reads a delimited file. Feature columns must be numeric; the label column
/// is factorized to `0..k` in order of first appearance.
pub fn load(spec: &DatasetSpec) -> Result<Dataset> {
    let mut bytes = Vec::new();
    File::open(&spec.path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(&spec.path, e))?;
    parse(&bytes, spec)
}

/// [`load`] on an in-memory buffer.
pub fn parse(bytes: &[u8], spec: &DatasetSpec) -> Result<Dataset> {
    let name = spec.display_name();
    let delimiter = spec.delimiter.unwrap_or_else(|| sniff_delimiter(bytes));
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(spec.header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);

    let mut columns: Option<(usize, usize)> = None;
    let mut features = Vec::new();
    let mut labels = Vec::new();
    let mut label_index: HashMap<String, usize> = HashMap::new();
    let mut label_names = Vec::new();
    let mut record = csv::StringRecord::new();
    loop {
        let line = reader.position().line() as usize;
        match reader.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => {
                return Err(Error::ParseError {
                    row: e.position().map_or(line, |p| p.line() as usize),
                    column: 0,
                    message: e.to_string(),
                })
            }
        }
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        let (width, label_col) = match columns {
            Some(c) => c,
            None => {
                let width = record.len();
                let label_col = spec.label_column.resolve(width).filter(|_| width >= 2).ok_or_else(|| {
                    Error::Config(format!(
                        "label column {} not resolvable against {width} columns",
                        spec.label_column
                    ))
                })?;
                columns = Some((width, label_col));
                (width, label_col)
            }
        };
        if record.len() != width {
            return Err(Error::ParseError {
                row: line,
                column: record.len().min(width) + 1,
                message: format!("expected {width} columns, found {}", record.len()),
            });
        }
        for (col, field) in record.iter().enumerate() {
            if col == label_col {
                let next = label_index.len();
                let id = *label_index.entry(field.to_string()).or_insert_with(|| {
                    label_names.push(field.to_string());
                    next
                });
                labels.push(id);
            } else {
                let x: f64 = field.parse().ok().filter(|x: &f64| x.is_finite()).ok_or_else(|| {
                    Error::NonNumericFeature {
                        row: line,
                        column: col + 1,
                        value: field.to_string(),
                    }
                })?;
                features.push(x);
            }
        }
    }
    let Some((width, _)) = columns else {
        return Err(Error::EmptyDataset(name));
    };
    Dataset::with_label_names(name, width - 1, features, labels, label_names)
}

/// Per-feature min–max scaling to `[0, 1]`; constant features map to 0.
/// The raw ranges are kept in [`Dataset::scaling`].
pub fn normalize(ds: &Dataset) -> Dataset {
    let ranges = ds.feature_ranges();
    let mut out = ds.clone();
    for row in out.features.chunks_exact_mut(ds.d) {
        for (x, &(lo, hi)) in row.iter_mut().zip(&ranges) {
            *x = if hi > lo { (*x - lo) / (hi - lo) } else { 0.0 };
        }
    }
    let raw = match &ds.scaling {
        None => ranges,
        Some(prev) => prev
            .iter()
            .zip(&ranges)
            .map(|(&(plo, phi), &(lo, hi))| (plo + lo * (phi - plo), plo + hi * (phi - plo)))
            .collect(),
    };
    out.scaling = Some(raw);
    out
}

/// A stratified uniform subset of at most `cap` rows, kept in original order.
///
/// Each class gets `cap · n_c / n` rows rounded by largest remainder, with at
/// least one row per class whenever `cap ≥ k`.
pub fn subsample(ds: &Dataset, cap: usize, rng: &mut RngStream) -> Result<Dataset> {
    if cap == 0 {
        return Err(Error::InvalidParameter("subsample cap must be >= 1".into()));
    }
    let n = ds.n();
    if n <= cap {
        return Ok(ds.clone());
    }
    let counts = ds.class_counts();
    let quota = stratified_quota(&counts, cap);

    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); ds.k];
    for (i, &l) in ds.labels.iter().enumerate() {
        by_class[l].push(i);
    }
    let mut keep = Vec::with_capacity(cap);
    for (rows, &q) in by_class.iter().zip(&quota) {
        keep.extend(index::sample(rng, rows.len(), q).into_iter().map(|j| rows[j]));
    }
    keep.sort_unstable();

    let mut features = Vec::with_capacity(cap * ds.d);
    let mut labels = Vec::with_capacity(cap);
    for &i in &keep {
        features.extend_from_slice(ds.row(i));
        labels.push(ds.labels[i]);
    }
    let mut out = Dataset::with_label_names(ds.name.clone(), ds.d, features, labels, ds.label_names.clone())?;
    out.scaling = ds.scaling.clone();
    Ok(out)
}

fn stratified_quota(counts: &[usize], cap: usize) -> Vec<usize> {
    let n: usize = counts.iter().sum();
    let present = counts.iter().filter(|&&c| c > 0).count();
    let mut quota: Vec<usize> = counts.iter().map(|&c| c * cap / n).collect();
    if cap >= present {
        for (q, &c) in quota.iter_mut().zip(counts) {
            if c > 0 && *q == 0 {
                *q = 1;
            }
        }
    }
    let mut assigned: usize = quota.iter().sum();
    // Largest remainder first; ties to the lower class index.
    let mut order: Vec<usize> = (0..counts.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = (counts[a] * cap) % n;
        let rb = (counts[b] * cap) % n;
        rb.cmp(&ra).then(a.cmp(&b))
    });
    while assigned < cap {
        let before = assigned;
        for &c in &order {
            if assigned < cap && quota[c] < counts[c] {
                quota[c] += 1;
                assigned += 1;
            }
        }
        if assigned == before {
            break;
        }
    }
    while assigned > cap {
        // Only reachable when the one-per-class floor overshoots; trim the largest.
        let c = (0..quota.len()).max_by_key(|&c| (quota[c], std::cmp::Reverse(c))).unwrap();
        quota[c] -= 1;
        assigned -= 1;
    }
    quota
}

/// Git-style object hash of a file: SHA-256 over `"blob <len>\0"` plus the bytes.
pub fn content_hash(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(&bytes);
    Ok(hex::encode(h.finalize()))
}

/// Serializes a dataset into the columnar cache layout.
///
/// Layout (little-endian): `"CBCC"`, version byte, `u32` name length and
/// UTF-8 name, `u64` n, d, k, a scaling flag byte, the `d` feature columns as
/// `f64`, the `n` labels as `u64`, optional `d` `(min, max)` pairs, then `k`
/// length-prefixed label names.
pub fn encode_cache(ds: &Dataset) -> Vec<u8> {
    let mut out = Vec::with_capacity(64 + ds.features.len() * 8 + ds.n() * 8);
    out.extend_from_slice(CACHE_MAGIC);
    out.push(CACHE_VERSION);
    put_str(&mut out, &ds.name);
    for v in [ds.n(), ds.d, ds.k] {
        out.extend_from_slice(&(v as u64).to_le_bytes());
    }
    out.push(u8::from(ds.scaling.is_some()));
    for j in 0..ds.d {
        for i in 0..ds.n() {
            out.extend_from_slice(&ds.features[i * ds.d + j].to_le_bytes());
        }
    }
    for &l in &ds.labels {
        out.extend_from_slice(&(l as u64).to_le_bytes());
    }
    if let Some(scaling) = &ds.scaling {
        for &(lo, hi) in scaling {
            out.extend_from_slice(&lo.to_le_bytes());
            out.extend_from_slice(&hi.to_le_bytes());
        }
    }
    for name in &ds.label_names {
        put_str(&mut out, name);
    }
    out
}

pub fn decode_cache(bytes: &[u8]) -> Result<Dataset> {
    let mut r = Cursor { bytes, pos: 0 };
    if r.take(4)? != CACHE_MAGIC {
        return Err(Error::InvalidCache("bad magic bytes".into()));
    }
    let version = r.take(1)?[0];
    if version != CACHE_VERSION {
        return Err(Error::InvalidCache(format!("unsupported version {version}")));
    }
    let name = r.string()?;
    let n = r.u64()? as usize;
    let d = r.u64()? as usize;
    let k = r.u64()? as usize;
    let has_scaling = r.take(1)?[0] != 0;
    let cells = n
        .checked_mul(d)
        .filter(|&c| c.saturating_mul(8) <= bytes.len())
        .ok_or_else(|| Error::InvalidCache("truncated feature block".into()))?;
    let mut features = vec![0.0; cells];
    for j in 0..d {
        for i in 0..n {
            features[i * d + j] = r.f64()?;
        }
    }
    let labels = (0..n).map(|_| r.u64().map(|l| l as usize)).collect::<Result<Vec<_>>>()?;
    let scaling = if has_scaling {
        Some((0..d).map(|_| Ok((r.f64()?, r.f64()?))).collect::<Result<Vec<_>>>()?)
    } else {
        None
    };
    let label_names = (0..k).map(|_| r.string()).collect::<Result<Vec<_>>>()?;
    if r.pos != bytes.len() {
        return Err(Error::InvalidCache("trailing bytes".into()));
    }
    let mut ds = Dataset::with_label_names(name, d, features, labels, label_names)
        .map_err(|e| Error::InvalidCache(e.to_string()))?;
    ds.scaling = scaling;
    Ok(ds)
}

/// Writes the cache atomically (temporary file, then rename).
pub fn write_cache(ds: &Dataset, path: &Path) -> Result<()> {
    write_atomic(path, &encode_cache(ds))
}

pub fn read_cache(path: &Path) -> Result<Dataset> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path).map_err(|e| Error::io(path, e))?)
        .read_to_end(&mut bytes)
        .map_err(|e| Error::io(path, e))?;
    decode_cache(&bytes)
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = tmp_path(path);
    {
        let file = File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
        let mut w = BufWriter::new(file);
        w.write_all(bytes).map_err(|e| Error::io(&tmp, e))?;
        w.flush().map_err(|e| Error::io(&tmp, e))?;
    }
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

pub(crate) fn tmp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(".tmp");
    path.with_file_name(name)
}

fn put_str(out: &mut Vec<u8>, s: &str) {
    out.extend_from_slice(&(s.len() as u32).to_le_bytes());
    out.extend_from_slice(s.as_bytes());
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(len)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::InvalidCache("unexpected end of file".into()))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn string(&mut self) -> Result<String> {
        let len = u32::from_le_bytes(self.take(4)?.try_into().unwrap()) as usize;
        String::from_utf8(self.take(len)?.to_vec()).map_err(|_| Error::InvalidCache("name is not UTF-8".into()))
    }
}

/// Published shapes of the benchmark datasets, used to flag mismatching files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KnownDataset {
    Covertype,
    Cnae9,
    InternetAds,
    PokerHand,
}

impl KnownDataset {
    /// `(instances, features, classes)`.
    pub fn reference_shape(self) -> (usize, usize, usize) {
        match self {
            KnownDataset::Covertype => (581_012, 95, 7),
            KnownDataset::Cnae9 => (1080, 857, 9),
            KnownDataset::InternetAds => (3279, 1558, 2),
            KnownDataset::PokerHand => (1_025_010, 11, 9),
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        let n: String = name.to_ascii_lowercase().chars().filter(char::is_ascii_alphanumeric).collect();
        if n.contains("cnae") {
            Some(KnownDataset::Cnae9)
        } else if n.contains("cov") {
            Some(KnownDataset::Covertype)
        } else if n.contains("poker") {
            Some(KnownDataset::PokerHand)
        } else if n == "ad" || n == "addata" || n.contains("internetad") || n.contains("advert") {
            Some(KnownDataset::InternetAds)
        } else {
            None
        }
    }

    /// Human-readable mismatches between `ds` and the published shape.
    pub fn shape_warnings(self, ds: &Dataset) -> Vec<String> {
        let (n, d, k) = self.reference_shape();
        let mut out = Vec::new();
        for (what, expected, actual) in [("instances", n, ds.n()), ("features", d, ds.d()), ("classes", k, ds.k())] {
            if expected != actual {
                out.push(format!("{}: {what} = {actual}, reference lists {expected}", ds.name()));
            }
        }
        out
    }
}
