//! Point matrices as headerless CSV or as the little-endian `FDM1` binary
//! layout: magic, `n: u32`, `d: u32`, four zero bytes, then `n * d`
//! row-major `f64` values.

use std::path::Path;

use super::{read_file, write_file, ParseError};
use crate::cloud::PointCloud;
use crate::error::Result;

pub const RAW_MAGIC: [u8; 4] = *b"FDM1";
pub const RAW_HEADER_LEN: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    Csv,
    RawF64,
}

impl MatrixFormat {
    /// `.csv` and `.txt` are text; anything else is sniffed for the magic.
    pub fn detect(path: &Path, bytes: &[u8]) -> Self {
        let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
        match ext.as_deref() {
            Some("csv") | Some("txt") => MatrixFormat::Csv,
            _ if bytes.starts_with(&RAW_MAGIC) => MatrixFormat::RawF64,
            _ => MatrixFormat::Csv,
        }
    }
}

fn finite(v: f64, row: usize, col: usize) -> std::result::Result<f64, ParseError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ParseError::NonFinite { row, col })
    }
}

fn build(data: Vec<f64>, n: usize, d: usize) -> std::result::Result<PointCloud, ParseError> {
    // Shape and finiteness are checked above, so construction cannot fail.
    PointCloud::new(data, n, d).map_err(|_| ParseError::Empty)
}

/// Comma-separated rows, one point per line. Blank lines are skipped and
/// fields may carry surrounding whitespace.
pub fn parse_csv_matrix(bytes: &[u8]) -> std::result::Result<PointCloud, ParseError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let mut data = Vec::new();
    let mut d = 0;
    let mut n = 0;
    for rec in reader.records() {
        let rec = rec.map_err(|e| ParseError::Table {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        let row = n + 1;
        if n == 0 {
            d = rec.len();
        } else if rec.len() != d {
            return Err(ParseError::Ragged { row, expected: d, found: rec.len() });
        }
        for (c, field) in rec.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| ParseError::BadNumber {
                row,
                col: c + 1,
                text: field.to_string(),
            })?;
            data.push(finite(v, row, c + 1)?);
        }
        n += 1;
    }
    if n == 0 {
        return Err(ParseError::Empty);
    }
    build(data, n, d)
}

pub fn parse_raw_matrix(bytes: &[u8]) -> std::result::Result<PointCloud, ParseError> {
    if bytes.len() < RAW_HEADER_LEN {
        return Err(ParseError::TruncatedHeader { len: bytes.len() });
    }
    let word = |i: usize| [bytes[i], bytes[i + 1], bytes[i + 2], bytes[i + 3]];
    if word(0) != RAW_MAGIC {
        return Err(ParseError::BadMagic { found: word(0) });
    }
    let n = u32::from_le_bytes(word(4)) as usize;
    let d = u32::from_le_bytes(word(8)) as usize;
    if word(12) != [0; 4] {
        return Err(ParseError::Reserved);
    }
    let payload = &bytes[RAW_HEADER_LEN..];
    let expected = n as u64 * d as u64 * 8;
    if payload.len() as u64 != expected {
        return Err(ParseError::LengthMismatch {
            expected,
            found: payload.len() as u64,
        });
    }
    if n == 0 || d == 0 {
        return Err(ParseError::Empty);
    }
    let data = payload
        .chunks_exact(8)
        .enumerate()
        .map(|(k, b)| finite(f64::from_le_bytes(b.try_into().unwrap()), k / d + 1, k % d + 1))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    build(data, n, d)
}

/// Values printed with 17 significant digits, so every `f64` survives a
/// write and re-read unchanged.
pub fn encode_csv_matrix(cloud: &PointCloud) -> String {
    let mut out = String::new();
    for row in cloud.rows() {
        let line: Vec<String> = row.iter().map(|&v| super::format_f64(v)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn encode_raw_matrix(cloud: &PointCloud) -> crate::error::Result<Vec<u8>> {
    let dim = |v: usize| {
        u32::try_from(v).map_err(|_| crate::error::Error::invalid(format!("{v} exceeds the u32 header field")))
    };
    let mut out = Vec::with_capacity(RAW_HEADER_LEN + cloud.as_slice().len() * 8);
    out.extend_from_slice(&RAW_MAGIC);
    out.extend_from_slice(&dim(cloud.n())?.to_le_bytes());
    out.extend_from_slice(&dim(cloud.d())?.to_le_bytes());
    out.extend_from_slice(&[0; 4]);
    for v in cloud.as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

/// Read a matrix, detecting the format when `format` is `None`.
pub fn load_matrix(path: &Path, format: Option<MatrixFormat>) -> Result<PointCloud> {
    let bytes = read_file(path)?;
    let parsed = match format.unwrap_or_else(|| MatrixFormat::detect(path, &bytes)) {
        MatrixFormat::Csv => parse_csv_matrix(&bytes),
        MatrixFormat::RawF64 => parse_raw_matrix(&bytes),
    };
    parsed.map_err(|e| crate::error::Error::InvalidInput(format!("{}: {e}", path.display())))
}

pub fn save_matrix(path: &Path, cloud: &PointCloud, format: MatrixFormat) -> Result<()> {
    let bytes = match format {
        MatrixFormat::Csv => encode_csv_matrix(cloud).into_bytes(),
        MatrixFormat::RawF64 => encode_raw_matrix(cloud)?,
    };
    write_file(path, &bytes)
}
