//! Log-ratio and power transforms, and zero replacement.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformKind {
    Identity,
    Power,
    Clr,
    Alr,
    Ilr,
}

impl TransformKind {
    pub fn is_log_ratio(self) -> bool {
        matches!(self, TransformKind::Clr | TransformKind::Alr | TransformKind::Ilr)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformSpec {
    pub kind: TransformKind,
    /// Entrywise exponent of the power transform.
    pub exponent: f64,
    /// Zeros become `zero_factor * (smallest nonzero entry)` before log-ratios.
    pub zero_factor: f64,
    /// Rescale rows to unit sum after zero replacement.
    pub renormalize: bool,
    /// Divisor column of the alr transform.
    pub alr_reference: Option<usize>,
}

impl TransformSpec {
    pub fn new(kind: TransformKind) -> Self {
        Self { kind, exponent: 0.5, zero_factor: 0.5, renormalize: true, alr_reference: None }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.exponent > 0.0 && self.exponent.is_finite()) {
            return Err(Error::InvalidParameter(format!("exponent must be > 0, got {}", self.exponent)));
        }
        if !(self.zero_factor > 0.0 && self.zero_factor.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "zero replacement factor must be > 0, got {}",
                self.zero_factor
            )));
        }
        Ok(())
    }
}

fn check_positive(x: &[f64]) -> Result<()> {
    match x.iter().position(|v| v.is_nan() || *v <= 0.0) {
        Some(column) => Err(Error::NonPositiveEntry { row: 0, column }),
        None => Ok(()),
    }
}

/// Centered log-ratio `log(x_k / g(x))` with `g` the geometric mean.
pub fn clr(x: &[f64]) -> Result<Vec<f64>> {
    check_positive(x)?;
    let logs: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let mean = logs.iter().sum::<f64>() / logs.len() as f64;
    Ok(logs.into_iter().map(|l| l - mean).collect())
}

/// Inverse of [`clr`]: `exp(w) / sum exp(w)`.
pub fn clr_inverse(w: &[f64]) -> Vec<f64> {
    let max = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = w.iter().map(|v| (v - max).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

/// Additive log-ratio against column `reference` (the last column by default).
pub fn alr(x: &[f64], reference: Option<usize>) -> Result<Vec<f64>> {
    check_positive(x)?;
    let r = reference.unwrap_or(x.len() - 1);
    if r >= x.len() {
        return Err(Error::InvalidParameter(format!("alr reference {r} out of range")));
    }
    let denom = x[r].ln();
    Ok(x.iter().enumerate().filter(|(k, _)| *k != r).map(|(_, v)| v.ln() - denom).collect())
}

pub fn alr_inverse(w: &[f64], reference: Option<usize>) -> Vec<f64> {
    let r = reference.unwrap_or(w.len());
    let mut full = w.to_vec();
    full.insert(r, 0.0);
    clr_inverse(&full)
}

/// Lower `(D - 1) x D` block of the Helmert matrix of order `D`. Its rows are
/// orthonormal and orthogonal to the all-ones vector.
pub fn helmert_submatrix(parts: usize) -> DMatrix<f64> {
    DMatrix::from_fn(parts - 1, parts, |row, col| {
        let k = (row + 1) as f64;
        let scale = 1.0 / (k * (k + 1.0)).sqrt();
        if col <= row {
            scale
        } else if col == row + 1 {
            -k * scale
        } else {
            0.0
        }
    })
}

/// Isometric log-ratio `H clr(x)`.
pub fn ilr(x: &[f64]) -> Result<Vec<f64>> {
    let c = clr(x)?;
    let h = helmert_submatrix(x.len());
    Ok((0..h.nrows()).map(|r| h.row(r).iter().zip(&c).map(|(a, b)| a * b).sum()).collect())
}

pub fn ilr_inverse(z: &[f64]) -> Vec<f64> {
    let h = helmert_submatrix(z.len() + 1);
    let w: Vec<f64> = (0..h.ncols()).map(|c| h.column(c).iter().zip(z).map(|(a, b)| a * b).sum()).collect();
    clr_inverse(&w)
}

/// Entrywise `x_k^exponent`. With exponent one half a composition lands on
/// the unit sphere.
pub fn power_transform(x: &[f64], exponent: f64) -> Vec<f64> {
    x.iter().map(|v| v.powf(exponent)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroReplacement {
    pub values: DMatrix<f64>,
    /// True where the input entry was zero.
    pub zero_mask: DMatrix<bool>,
    /// Value substituted for zeros; `None` when the input had none.
    pub replacement: Option<f64>,
    pub min_nonzero: f64,
}

/// Replaces every zero by `factor` times the smallest nonzero entry of the
/// whole matrix, then optionally rescales rows to unit sum.
pub fn zero_replace(values: &DMatrix<f64>, factor: f64, renormalize: bool) -> Result<ZeroReplacement> {
    let min_nonzero = values.iter().copied().filter(|v| *v > 0.0).fold(f64::INFINITY, f64::min);
    if !min_nonzero.is_finite() {
        return Err(Error::AllZeroMatrix);
    }
    let zero_mask = values.map(|v| v == 0.0);
    let has_zero = zero_mask.iter().any(|z| *z);
    let replacement = factor * min_nonzero;
    let mut out = values.map(|v| if v == 0.0 { replacement } else { v });
    if renormalize && has_zero {
        for mut row in out.row_iter_mut() {
            let s: f64 = row.iter().sum();
            row /= s;
        }
    }
    Ok(ZeroReplacement { values: out, zero_mask, replacement: has_zero.then_some(replacement), min_nonzero })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn uniform_maps_to_origin() {
        let u = [1.0 / 3.0; 3];
        assert!(clr(&u).unwrap().iter().all(|v| v.abs() < 1e-15));
        assert!(alr(&u, None).unwrap().iter().all(|v| v.abs() < 1e-15));
        assert!(ilr(&u).unwrap().iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn alr_by_hand() {
        let w = alr(&[0.5, 0.25, 0.25], None).unwrap();
        assert_abs_diff_eq!(w.as_slice(), [2f64.ln(), 0.0].as_slice(), epsilon = 1e-15);
        let w = alr(&[0.5, 0.25, 0.25], Some(0)).unwrap();
        assert_abs_diff_eq!(w.as_slice(), [-(2f64.ln()), -(2f64.ln())].as_slice(), epsilon = 1e-15);
    }

    #[test]
    fn zeros_are_rejected() {
        assert_eq!(clr(&[0.0, 1.0]).unwrap_err(), Error::NonPositiveEntry { row: 0, column: 0 });
        assert!(alr(&[0.5, 0.0, 0.5], None).is_err());
        assert!(ilr(&[0.5, 0.5, 0.0]).is_err());
    }

    #[test]
    fn helmert_rows_are_orthonormal_contrasts() {
        let h = helmert_submatrix(5);
        let gram = &h * h.transpose();
        assert_abs_diff_eq!(gram, DMatrix::identity(4, 4), epsilon = 1e-15);
        for r in 0..4 {
            assert!(h.row(r).sum().abs() < 1e-15);
        }
    }

    #[test]
    fn power_by_hand() {
        let p = power_transform(&[0.25, 0.25, 0.5], 0.5);
        assert_abs_diff_eq!(p.as_slice(), [0.5, 0.5, 0.5f64.sqrt()].as_slice(), epsilon = 1e-15);
        assert_abs_diff_eq!(p.iter().map(|v| v * v).sum::<f64>(), 1.0, epsilon = 1e-15);
        assert_eq!(power_transform(&[0.3, 0.7], 1.0), vec![0.3, 0.7]);
    }

    #[test]
    fn zero_replacement_by_hand() {
        let m = DMatrix::from_row_slice(2, 3, &[0.0, 0.4, 0.6, 0.2, 0.8, 0.0]);
        let z = zero_replace(&m, 0.5, true).unwrap();
        assert_eq!(z.replacement, Some(0.1));
        let expected =
            DMatrix::from_row_slice(2, 3, &[0.1 / 1.1, 0.4 / 1.1, 0.6 / 1.1, 0.2 / 1.1, 0.8 / 1.1, 0.1 / 1.1]);
        assert_abs_diff_eq!(z.values, expected, epsilon = 1e-15);
        assert!(z.zero_mask[(0, 0)] && z.zero_mask[(1, 2)] && !z.zero_mask[(0, 1)]);

        let raw = zero_replace(&m, 0.5, false).unwrap();
        assert_eq!(raw.values[(0, 0)], 0.1);
        assert_eq!(raw.values[(0, 1)], 0.4);
    }

    #[test]
    fn zero_replacement_without_zeros_is_a_no_op() {
        let m = DMatrix::from_row_slice(1, 3, &[0.2, 0.3, 0.5]);
        let z = zero_replace(&m, 0.5, true).unwrap();
        assert_eq!(z.values, m);
        assert_eq!(z.replacement, None);
    }

    #[test]
    fn replacement_halves_small_minimum() {
        let m = DMatrix::from_row_slice(1, 3, &[0.0, 0.0026, 0.9974]);
        let z = zero_replace(&m, 0.5, true).unwrap();
        assert_abs_diff_eq!(z.replacement.unwrap(), 0.0013, epsilon = 1e-18);
        assert_eq!(zero_replace(&DMatrix::zeros(2, 2), 0.5, true).unwrap_err(), Error::AllZeroMatrix);
    }

    fn positive_composition() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.001..1.0f64, 2..8).prop_map(|v| {
            let s: f64 = v.iter().sum();
            v.into_iter().map(|x| x / s).collect()
        })
    }

    proptest! {
        #[test]
        fn log_ratio_round_trips(x in positive_composition()) {
            let c = clr(&x).unwrap();
            prop_assert!(c.iter().sum::<f64>().abs() < 1e-12);
            for (a, b) in clr_inverse(&c).iter().zip(&x) {
                prop_assert!((a - b).abs() < 1e-12);
            }
            for (a, b) in alr_inverse(&alr(&x, None).unwrap(), None).iter().zip(&x) {
                prop_assert!((a - b).abs() < 1e-12);
            }
            for (a, b) in alr_inverse(&alr(&x, Some(0)).unwrap(), Some(0)).iter().zip(&x) {
                prop_assert!((a - b).abs() < 1e-12);
            }
            let z = ilr(&x).unwrap();
            let nc: f64 = c.iter().map(|v| v * v).sum::<f64>().sqrt();
            let nz: f64 = z.iter().map(|v| v * v).sum::<f64>().sqrt();
            prop_assert!((nc - nz).abs() < 1e-12);
            for (a, b) in ilr_inverse(&z).iter().zip(&x) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }

        #[test]
        fn square_root_lands_on_sphere(x in positive_composition()) {
            let p = power_transform(&x, 0.5);
            prop_assert!((p.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}
