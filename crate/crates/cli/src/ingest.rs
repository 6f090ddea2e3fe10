//! CSV ingestion: a header row of part names, optional metadata columns
//! selected by name, numeric cells everywhere else.

use std::io::Read;
use std::path::Path;

use nalgebra::DMatrix;
use subsimplex_core::{Dataset, MetaColumn};

use crate::error::{CliError, Result};

pub fn ingest_csv(path: &Path, meta: &[String]) -> Result<Dataset> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    ingest_reader(bytes.as_slice(), path, meta)
}

/// Parses CSV from `reader`; `path` is only used in error messages.
pub fn ingest_reader(reader: impl Read, path: &Path, meta: &[String]) -> Result<Dataset> {
    let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let parse_err = |line: u64, column: &str, message: String| CliError::Parse {
        path: path.to_path_buf(),
        line,
        column: column.to_string(),
        message,
    };
    let header = csv.headers().map_err(|e| parse_err(1, "", e.to_string()))?.clone();
    let names: Vec<String> = header.iter().map(str::to_string).collect();

    let mut meta_idx = Vec::with_capacity(meta.len());
    for m in meta {
        match names.iter().position(|n| n == m) {
            Some(k) => meta_idx.push(k),
            None => return Err(CliError::Config(format!("metadata column `{m}` is not in the header"))),
        }
    }
    let part_idx: Vec<usize> = (0..names.len()).filter(|k| !meta_idx.contains(k)).collect();
    let labels: Vec<String> = part_idx.iter().map(|&k| names[k].clone()).collect();

    let mut values = Vec::new();
    let mut meta_values = vec![Vec::new(); meta.len()];
    for record in csv.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, "", e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        for &k in &part_idx {
            let cell = &record[k];
            let v: f64 =
                cell.parse().map_err(|_| parse_err(line, &names[k], format!("cannot read `{cell}` as a number")))?;
            values.push(v);
        }
        for (slot, &k) in meta_values.iter_mut().zip(&meta_idx) {
            slot.push(record[k].to_string());
        }
    }
    let n = values.len() / part_idx.len().max(1);
    let matrix = DMatrix::from_row_slice(n, part_idx.len(), &values);
    let input_err = |source| CliError::Input { path: path.to_path_buf(), source };
    let mut ds = Dataset::new(matrix, labels).map_err(input_err)?;
    for (name, values) in meta.iter().zip(meta_values) {
        ds = ds.with_metadata(MetaColumn { name: name.clone(), values }).map_err(input_err)?;
    }
    Ok(ds)
}
