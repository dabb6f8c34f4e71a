//! File formats: point matrices, run and CDDR manifests, and the tabular
//! reports written by sweeps, RDR runs and benchmarks.
//!
//! Row and column numbers in parse errors are 1-based.

use std::path::Path;

use thiserror::Error;

use crate::error::{Error, Result};

mod manifest;
mod matrix;
mod tables;

pub use manifest::{CddrEntry, CddrManifest, RunManifest, Task};
pub use matrix::{
    encode_csv_matrix, encode_raw_matrix, load_matrix, parse_csv_matrix, parse_raw_matrix,
    save_matrix, MatrixFormat, RAW_HEADER_LEN, RAW_MAGIC,
};
pub use tables::{
    encode_aggregate_csv, encode_bench_csv, encode_sweep_csv, format_f64, parse_aggregate_csv,
    parse_bench_csv, parse_sweep_csv,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("empty matrix")]
    Empty,

    #[error("row {row} has {found} columns, expected {expected}")]
    Ragged { row: usize, expected: usize, found: usize },

    #[error("row {row}, column {col}: cannot parse '{text}' as a number")]
    BadNumber { row: usize, col: usize, text: String },

    #[error("row {row}, column {col}: non-finite value")]
    NonFinite { row: usize, col: usize },

    #[error("bad magic {found:?}, expected \"FDM1\"")]
    BadMagic { found: [u8; 4] },

    #[error("header needs {RAW_HEADER_LEN} bytes, file has {len}")]
    TruncatedHeader { len: usize },

    #[error("reserved header bytes must be zero")]
    Reserved,

    #[error("payload is {found} bytes, header promises {expected}")]
    LengthMismatch { expected: u64, found: u64 },

    #[error("line {line}: {message}")]
    Table { line: u64, message: String },
}

pub(crate) fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}
