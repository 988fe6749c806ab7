//! Sample, distribution, and score file formats.
//!
//! Samples are CSV (numeric columns, optional header row) or the binary
//! layout `"OVLB" | version: u32 | n: u64 | d: u64 | n*d f64`, all
//! little-endian and row-major.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::metrics::LabeledScores;
use crate::oracle::{DiscreteDistribution, DistributionFile};
use crate::sample::SampleSet;
use crate::vector::NormKind;

pub const BINARY_MAGIC: &[u8; 4] = b"OVLB";
pub const BINARY_VERSION: u32 = 1;
const BINARY_HEADER_LEN: usize = 4 + 4 + 8 + 8;

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a sample file, detecting the binary format by its magic bytes.
pub fn read_samples(path: &Path, norm: NormKind) -> Result<SampleSet> {
    let bytes = read_bytes(path)?;
    if bytes.starts_with(BINARY_MAGIC) {
        decode_binary(path, &bytes, norm)
    } else {
        let (data, dim) = parse_numeric_csv(path, &bytes)?;
        SampleSet::from_flat(data, dim, norm)
    }
}

fn parse_error(path: &Path, line: u64, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        column,
        message: message.into(),
    }
}

fn csv_reader(bytes: &[u8]) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(bytes)
}

/// Row-major values and column count. A first row with no numeric field is
/// taken as a header.
fn parse_numeric_csv(path: &Path, bytes: &[u8]) -> Result<(Vec<f64>, usize)> {
    let mut data = Vec::new();
    let mut dim = None;
    for (i, record) in csv_reader(bytes).records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_error(path, line, 0, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        if i == 0 && record.iter().all(|f| f.parse::<f64>().is_err()) {
            continue;
        }
        match dim {
            None => dim = Some(record.len()),
            Some(d) if d != record.len() => {
                return Err(parse_error(
                    path,
                    line,
                    record.len().min(d) + 1,
                    format!("expected {d} columns, found {}", record.len()),
                ))
            }
            _ => {}
        }
        for (col, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                parse_error(path, line, col + 1, format!("`{field}` is not a number"))
            })?;
            if !v.is_finite() {
                return Err(parse_error(
                    path,
                    line,
                    col + 1,
                    format!("`{field}` is not finite"),
                ));
            }
            data.push(v);
        }
    }
    match dim {
        Some(d) if !data.is_empty() => Ok((data, d)),
        _ => Err(parse_error(path, 1, 0, "no sample rows")),
    }
}

fn decode_binary(path: &Path, bytes: &[u8], norm: NormKind) -> Result<SampleSet> {
    let bad = |msg: String| parse_error(path, 0, 0, msg);
    if bytes.len() < BINARY_HEADER_LEN {
        return Err(bad("truncated binary header".into()));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes"));
    if version != BINARY_VERSION {
        return Err(bad(format!("unsupported binary version {version}")));
    }
    let n = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes"));
    let d = u64::from_le_bytes(bytes[16..24].try_into().expect("8 bytes"));
    let expected = n
        .checked_mul(d)
        .and_then(|c| c.checked_mul(8))
        .and_then(|c| c.checked_add(BINARY_HEADER_LEN as u64));
    if expected != Some(bytes.len() as u64) {
        return Err(bad(format!(
            "binary payload is {} bytes, header declares n = {n}, d = {d}",
            bytes.len()
        )));
    }
    let data = bytes[BINARY_HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    SampleSet::from_flat(data, d as usize, norm)
}

pub fn encode_binary(set: &SampleSet) -> Vec<u8> {
    let mut out = Vec::with_capacity(BINARY_HEADER_LEN + set.as_flat().len() * 8);
    out.extend_from_slice(BINARY_MAGIC);
    out.extend_from_slice(&BINARY_VERSION.to_le_bytes());
    out.extend_from_slice(&(set.len() as u64).to_le_bytes());
    out.extend_from_slice(&(set.dim() as u64).to_le_bytes());
    for v in set.as_flat() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn encode_csv(set: &SampleSet) -> String {
    let mut out = String::new();
    for row in set.rows() {
        let fields: Vec<String> = row.iter().map(f64::to_string).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn read_distribution(path: &Path) -> Result<DiscreteDistribution> {
    let bytes = read_bytes(path)?;
    let file: DistributionFile = serde_json::from_slice(&bytes)
        .map_err(|e| parse_error(path, e.line() as u64, e.column(), e.to_string()))?;
    DiscreteDistribution::try_from(file)
}

fn parse_label(s: &str) -> Option<bool> {
    match s.to_ascii_lowercase().as_str() {
        "1" | "+" | "+1" | "in" | "in-class" | "pos" | "positive" | "true" => Some(true),
        "0" | "-" | "-1" | "out" | "out-class" | "neg" | "negative" | "false" => Some(false),
        _ => None,
    }
}

/// Reads `score,label` rows (header optional).
pub fn read_labeled_scores(path: &Path) -> Result<LabeledScores> {
    let bytes = read_bytes(path)?;
    let mut scores = Vec::new();
    let mut labels = Vec::new();
    for (i, record) in csv_reader(&bytes).records().enumerate() {
        let record = record.map_err(|e| parse_error(path, 0, 0, e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        if record.len() != 2 {
            return Err(parse_error(
                path,
                line,
                0,
                "expected two columns: score,label",
            ));
        }
        let score = record[0].parse::<f64>();
        if i == 0 && score.is_err() {
            continue;
        }
        scores.push(score.map_err(|_| {
            parse_error(path, line, 1, format!("`{}` is not a number", &record[0]))
        })?);
        labels.push(parse_label(&record[1]).ok_or_else(|| {
            parse_error(path, line, 2, format!("`{}` is not a label", &record[1]))
        })?);
    }
    LabeledScores::new(scores, labels)
}

/// Reads scores and labels from two single-column files.
pub fn read_scores_and_labels(scores: &Path, labels: &Path) -> Result<LabeledScores> {
    let (s, d) = parse_numeric_csv(scores, &read_bytes(scores)?)?;
    if d != 1 {
        return Err(Error::Contract(format!(
            "{} has {d} columns, expected one",
            scores.display()
        )));
    }
    let bytes = read_bytes(labels)?;
    let mut l = Vec::new();
    for (i, record) in csv_reader(&bytes).records().enumerate() {
        let record = record.map_err(|e| parse_error(labels, 0, 0, e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let Some(field) = record.get(0).filter(|f| !f.is_empty()) else {
            continue;
        };
        match parse_label(field) {
            Some(v) => l.push(v),
            None if i == 0 => continue,
            None => {
                return Err(parse_error(
                    labels,
                    line,
                    1,
                    format!("`{field}` is not a label"),
                ))
            }
        }
    }
    if s.len() != l.len() {
        return Err(Error::Contract(format!(
            "{} has {} scores but {} has {} labels",
            scores.display(),
            s.len(),
            labels.display(),
            l.len()
        )));
    }
    LabeledScores::new(s, l)
}
