//! CSV tables, float formatting and atomic file writes.

use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use sha2::{Digest, Sha256};
use subsimplex_core::Dataset;

use crate::config::DEFAULT_PRECISION;
use crate::error::{CliError, Result};

/// Scientific notation with a fixed number of significant digits. Seventeen
/// digits round-trip every `f64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FloatFormat {
    digits: usize,
}

impl FloatFormat {
    pub fn new(digits: usize) -> Self {
        Self { digits: digits.clamp(1, 17) }
    }

    pub fn full() -> Self {
        Self::new(DEFAULT_PRECISION)
    }

    pub fn fmt(&self, v: f64) -> String {
        format!("{:.*e}", self.digits - 1, v)
    }
}

/// An in-memory CSV table with a one-line header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// One row per matrix row, optionally prefixed by a label column.
    pub fn from_matrix(header: Vec<String>, m: &DMatrix<f64>, fmt: FloatFormat) -> Self {
        let mut t = Table::new(header);
        for row in m.row_iter() {
            t.push(row.iter().map(|v| fmt.fmt(*v)).collect());
        }
        t
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }
}

/// Dataset as CSV: metadata columns first, then the parts.
pub fn dataset_table(ds: &Dataset, fmt: FloatFormat) -> Table {
    let mut header: Vec<String> = ds.row_metadata().iter().map(|m| m.name.clone()).collect();
    header.extend(ds.column_labels().iter().cloned());
    let mut t = Table::new(header);
    for i in 0..ds.n_samples() {
        let mut row: Vec<String> = ds.row_metadata().iter().map(|m| m.values[i].clone()).collect();
        row.extend(ds.row(i).iter().map(|v| fmt.fmt(*v)));
        t.push(row);
    }
    t
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        let f = FloatFormat::full();
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 0.0, 123456.789, f64::MIN_POSITIVE] {
            let s = f.fmt(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
        assert_eq!(f.fmt(0.5), "5.0000000000000000e-1");
        assert_eq!(FloatFormat::new(3).fmt(0.123456), "1.23e-1");
    }

    #[test]
    fn table_bytes() {
        let mut t = Table::new(["a", "b"]);
        t.push(vec!["1".into(), "x,y".into()]);
        assert_eq!(String::from_utf8(t.to_bytes()).unwrap(), "a,b\n1,\"x,y\"\n");
    }

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
