//! Matrix files.
//!
//! FFPM layout (all integers little-endian):
//!
//! | offset | size | content                          |
//! |--------|------|----------------------------------|
//! | 0      | 4    | magic `FFPM`                     |
//! | 4      | 1    | version, currently 1             |
//! | 5      | 8    | rows, u64                        |
//! | 13     | 8    | cols, u64                        |
//! | 21     | 8·rows·cols | IEEE-754 f64 entries, row-major |
//!
//! CSV holds one matrix row per line, cells separated by commas.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

pub const FFPM_MAGIC: [u8; 4] = *b"FFPM";
pub const FFPM_VERSION: u8 = 1;
const HEADER_LEN: usize = 21;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixFormat {
    Ffpm,
    Csv,
}

impl MatrixFormat {
    /// `.csv` (any case) selects CSV; everything else is FFPM.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => MatrixFormat::Csv,
            _ => MatrixFormat::Ffpm,
        }
    }
}

pub fn encode_ffpm(m: &DenseMatrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * m.rows() * m.cols());
    out.extend_from_slice(&FFPM_MAGIC);
    out.push(FFPM_VERSION);
    out.extend_from_slice(&(m.rows() as u64).to_le_bytes());
    out.extend_from_slice(&(m.cols() as u64).to_le_bytes());
    for v in m.to_row_major() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_ffpm(bytes: &[u8]) -> Result<DenseMatrix> {
    let fail = |offset: usize, reason: &str| Err(Error::Format { offset: offset as u64, reason: reason.to_string() });
    if bytes.is_empty() {
        return fail(0, "empty file");
    }
    if bytes.len() < 4 || bytes[..4] != FFPM_MAGIC {
        return fail(0, "bad magic, expected \"FFPM\"");
    }
    match bytes.get(4) {
        None => return fail(bytes.len(), "truncated header"),
        Some(&FFPM_VERSION) => {}
        Some(v) => return fail(4, &format!("unsupported version {v}")),
    }
    if bytes.len() < HEADER_LEN {
        return fail(bytes.len(), "truncated header");
    }
    let read_u64 = |at: usize| u64::from_le_bytes(bytes[at..at + 8].try_into().expect("8 bytes"));
    let (rows, cols) = (read_u64(5), read_u64(13));
    if rows == 0 || cols == 0 {
        return fail(if rows == 0 { 5 } else { 13 }, "zero dimension");
    }
    let payload = rows
        .checked_mul(cols)
        .and_then(|c| c.checked_mul(8))
        .and_then(|b| usize::try_from(b).ok())
        .and_then(|b| b.checked_add(HEADER_LEN));
    let Some(expected) = payload else {
        return fail(5, &format!("dimension overflow: {rows}x{cols}"));
    };
    if bytes.len() < expected {
        return fail(bytes.len(), &format!("truncated payload, expected {expected} bytes"));
    }
    if bytes.len() > expected {
        return fail(expected, "trailing bytes after payload");
    }
    let (rows, cols) = (rows as usize, cols as usize);
    let mut entries = Vec::with_capacity(rows * cols);
    for (i, chunk) in bytes[HEADER_LEN..].chunks_exact(8).enumerate() {
        let v = f64::from_le_bytes(chunk.try_into().expect("8 bytes"));
        if !v.is_finite() {
            return fail(HEADER_LEN + 8 * i, "non-finite entry");
        }
        entries.push(v);
    }
    DenseMatrix::from_row_major(rows, cols, entries)
}

/// Shortest round-trip representation of every entry.
pub fn encode_csv(m: &DenseMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if j > 0 {
                out.push(',');
            }
            write!(out, "{:?}", m.get(i, j)).expect("writing to a String");
        }
        out.push('\n');
    }
    out
}

pub fn parse_csv(text: &str) -> Result<DenseMatrix> {
    let mut entries = Vec::new();
    let mut cols = 0;
    let mut rows = 0;
    for (r, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row_start = entries.len();
        for (c, cell) in line.split(',').enumerate() {
            let cell = cell.trim();
            let value: f64 = cell.parse().map_err(|_| Error::Parse {
                row: r + 1,
                col: c + 1,
                reason: format!("{cell:?} is not a number"),
            })?;
            if !value.is_finite() {
                return Err(Error::Parse { row: r + 1, col: c + 1, reason: "non-finite value".into() });
            }
            entries.push(value);
        }
        let width = entries.len() - row_start;
        if rows == 0 {
            cols = width;
        } else if width != cols {
            return Err(Error::Parse {
                row: r + 1,
                col: width.min(cols) + 1,
                reason: format!("expected {cols} cells, found {width}"),
            });
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(Error::Format { offset: 0, reason: "empty CSV".into() });
    }
    DenseMatrix::from_row_major(rows, cols, entries)
}

/// Writes FFPM or CSV depending on the extension.
pub fn write_matrix(path: impl AsRef<Path>, m: &DenseMatrix) -> Result<()> {
    let path = path.as_ref();
    match MatrixFormat::from_path(path) {
        MatrixFormat::Ffpm => std::fs::write(path, encode_ffpm(m))?,
        MatrixFormat::Csv => std::fs::write(path, encode_csv(m))?,
    }
    Ok(())
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    let path = path.as_ref();
    match MatrixFormat::from_path(path) {
        MatrixFormat::Ffpm => decode_ffpm(&std::fs::read(path)?),
        MatrixFormat::Csv => parse_csv(&std::fs::read_to_string(path)?),
    }
}
