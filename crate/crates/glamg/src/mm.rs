//! Matrix Market coordinate-format reader and writer.
//!
//! Supports the ASCII `matrix coordinate real general` flavor (1-based
//! indices) that finite-difference and FEM tools exchange; `symmetric` files
//! are accepted on read by mirroring off-diagonal entries. Parsing is
//! whitespace-tolerant and reports errors with line numbers.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

const HEADER: &str = "%%MatrixMarket matrix coordinate real general";

fn parse_err(path: &str, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_string(),
        line,
        msg: msg.into(),
    }
}

/// Read a matrix from a Matrix Market file.
pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<CsrMatrix> {
    let path = path.as_ref();
    let file = File::open(path)?;
    read_from(BufReader::new(file), &path.to_string_lossy())
}

/// Read a matrix from any buffered reader; `label` names the source in
/// error messages.
pub fn read_from(reader: impl BufRead, label: &str) -> Result<CsrMatrix> {
    let mut lines = reader.lines().enumerate();

    let (banner_line, banner) = loop {
        match lines.next() {
            Some((idx, line)) => {
                let line = line?;
                if !line.trim().is_empty() {
                    break (idx + 1, line);
                }
            }
            None => return Err(parse_err(label, 1, "empty file")),
        }
    };
    let banner_fields: Vec<String> = banner
        .trim()
        .split_whitespace()
        .map(|t| t.to_ascii_lowercase())
        .collect();
    if banner_fields.len() < 5 || !banner_fields[0].starts_with("%%matrixmarket") {
        return Err(parse_err(label, banner_line, "missing MatrixMarket banner"));
    }
    if banner_fields[1] != "matrix" || banner_fields[2] != "coordinate" {
        return Err(parse_err(
            label,
            banner_line,
            format!("unsupported object/format '{} {}'", banner_fields[1], banner_fields[2]),
        ));
    }
    if banner_fields[3] != "real" && banner_fields[3] != "integer" {
        return Err(parse_err(
            label,
            banner_line,
            format!("unsupported field type '{}'", banner_fields[3]),
        ));
    }
    let symmetric = match banner_fields[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => {
            return Err(parse_err(
                label,
                banner_line,
                format!("unsupported symmetry '{other}'"),
            ))
        }
    };

    // Size line: first non-comment, non-blank line after the banner.
    let (size_line_no, size_line) = loop {
        match lines.next() {
            Some((idx, line)) => {
                let line = line?;
                let trimmed = line.trim();
                if !trimmed.is_empty() && !trimmed.starts_with('%') {
                    break (idx + 1, line);
                }
            }
            None => return Err(parse_err(label, banner_line, "missing size line")),
        }
    };
    let dims: Vec<&str> = size_line.split_whitespace().collect();
    if dims.len() != 3 {
        return Err(parse_err(
            label,
            size_line_no,
            format!("expected 'rows cols nnz', got '{}'", size_line.trim()),
        ));
    }
    let n_rows: usize = dims[0]
        .parse()
        .map_err(|_| parse_err(label, size_line_no, format!("bad row count '{}'", dims[0])))?;
    let n_cols: usize = dims[1]
        .parse()
        .map_err(|_| parse_err(label, size_line_no, format!("bad column count '{}'", dims[1])))?;
    let nnz: usize = dims[2]
        .parse()
        .map_err(|_| parse_err(label, size_line_no, format!("bad entry count '{}'", dims[2])))?;

    let mut entries = Vec::with_capacity(if symmetric { 2 * nnz } else { nnz });
    let mut seen = 0usize;
    while seen < nnz {
        let (idx, line) = match lines.next() {
            Some((idx, line)) => (idx + 1, line?),
            None => {
                return Err(parse_err(
                    label,
                    size_line_no,
                    format!("expected {nnz} entries, found {seen}"),
                ))
            }
        };
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(parse_err(
                label,
                idx,
                format!("expected 'row col value', got '{trimmed}'"),
            ));
        }
        let row: usize = fields[0]
            .parse()
            .map_err(|_| parse_err(label, idx, format!("bad row index '{}'", fields[0])))?;
        let col: usize = fields[1]
            .parse()
            .map_err(|_| parse_err(label, idx, format!("bad column index '{}'", fields[1])))?;
        let val: f64 = fields[2]
            .parse()
            .map_err(|_| parse_err(label, idx, format!("bad value '{}'", fields[2])))?;
        if row == 0 || col == 0 || row > n_rows || col > n_cols {
            return Err(parse_err(
                label,
                idx,
                format!("index ({row}, {col}) outside 1..={n_rows} x 1..={n_cols}"),
            ));
        }
        entries.push((row - 1, col - 1, val));
        if symmetric && row != col {
            entries.push((col - 1, row - 1, val));
        }
        seen += 1;
    }

    CsrMatrix::from_triplets(n_rows, n_cols, &entries)
}

/// Write a matrix to a Matrix Market file (`general` symmetry, 1-based).
pub fn write_matrix_market(a: &CsrMatrix, path: impl AsRef<Path>) -> Result<()> {
    let file = File::create(path)?;
    write_to(a, BufWriter::new(file))
}

/// Write a matrix to any writer. Values are printed in Rust's shortest
/// round-trip form, so read-back reproduces them bit for bit.
pub fn write_to(a: &CsrMatrix, mut writer: impl Write) -> Result<()> {
    writeln!(writer, "{HEADER}")?;
    writeln!(writer, "{} {} {}", a.n_rows(), a.n_cols(), a.nnz())?;
    for i in 0..a.n_rows() {
        let (cols, vals) = a.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            writeln!(writer, "{} {} {}", i + 1, j + 1, v)?;
        }
    }
    writer.flush()?;
    Ok(())
}
