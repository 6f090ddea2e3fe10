use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simplex::{Composition, RENORMALIZE_TOL};

/// A named per-row annotation such as a sample depth or a cluster label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaColumn {
    pub name: String,
    pub values: Vec<String>,
}

/// `n` compositions of `D = d + 1` parts, stored row-wise.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    values: DMatrix<f64>,
    column_labels: Vec<String>,
    row_metadata: Vec<MetaColumn>,
}

impl Dataset {
    /// Validates every row. Rows whose sum is within `1e-6` of one are
    /// rescaled to unit sum; others are rejected with the offending row index.
    pub fn new(values: DMatrix<f64>, column_labels: Vec<String>) -> Result<Self> {
        if values.nrows() == 0 {
            return Err(Error::EmptyDataset);
        }
        if values.ncols() < 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: values.ncols() });
        }
        if column_labels.len() != values.ncols() {
            return Err(Error::DimensionMismatch { expected: values.ncols(), found: column_labels.len() });
        }
        let mut values = values;
        for i in 0..values.nrows() {
            let mut sum = 0.0;
            for j in 0..values.ncols() {
                let v = values[(i, j)];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::NegativeEntry { row: i, column: j, value: v });
                }
                sum += v;
            }
            if (sum - 1.0).abs() >= RENORMALIZE_TOL {
                return Err(Error::RowSumOutOfTolerance { row: i, sum });
            }
            for j in 0..values.ncols() {
                values[(i, j)] /= sum;
            }
        }
        Ok(Self { values, column_labels, row_metadata: Vec::new() })
    }

    /// Labels default to `V1, V2, ...`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        let dim = rows[0].len();
        if let Some(r) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: r.len() });
        }
        let values = DMatrix::from_fn(n, dim, |i, j| rows[i][j]);
        Self::new(values, default_labels(dim))
    }

    pub fn with_metadata(mut self, column: MetaColumn) -> Result<Self> {
        if column.values.len() != self.n_samples() {
            return Err(Error::DimensionMismatch { expected: self.n_samples(), found: column.values.len() });
        }
        self.row_metadata.push(column);
        Ok(self)
    }

    pub fn n_samples(&self) -> usize {
        self.values.nrows()
    }

    /// Number of parts `D = d + 1`.
    pub fn n_parts(&self) -> usize {
        self.values.ncols()
    }

    /// Simplex dimension `d`.
    pub fn dim(&self) -> usize {
        self.values.ncols() - 1
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn column_labels(&self) -> &[String] {
        &self.column_labels
    }

    pub fn row_metadata(&self) -> &[MetaColumn] {
        &self.row_metadata
    }

    pub fn metadata(&self, name: &str) -> Option<&MetaColumn> {
        self.row_metadata.iter().find(|m| m.name == name)
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.values.row(i).iter().copied().collect()
    }

    pub fn composition(&self, i: usize) -> Composition {
        Composition::new(self.row(i)).expect("rows are validated on construction")
    }

    /// Fraction of entries that are exactly zero.
    pub fn zero_fraction(&self) -> f64 {
        let zeros = self.values.iter().filter(|v| **v == 0.0).count();
        zeros as f64 / self.values.len() as f64
    }
}

pub fn default_labels(dim: usize) -> Vec<String> {
    (1..=dim).map(|j| format!("V{j}")).collect()
}
