//! Covariance PCA on raw, power-transformed, or log-ratio-transformed
//! compositions.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::transforms::{
    alr, alr_inverse, clr, clr_inverse, ilr, ilr_inverse, power_transform, zero_replace, TransformKind, TransformSpec,
};
use crate::error::{Error, Result};

/// Slack used when flagging approximations that leave the simplex.
pub const OUT_OF_SIMPLEX_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct PcaResult {
    pub transform: TransformSpec,
    /// Data in the transform's codomain, one row per sample.
    pub transformed: DMatrix<f64>,
    pub mean: DVector<f64>,
    /// Columns are orthonormal principal directions, by decreasing eigenvalue.
    pub components: DMatrix<f64>,
    pub eigenvalues: DVector<f64>,
    /// `n x k` scores, centered data times components.
    pub scores: DMatrix<f64>,
    /// Rank `k` reconstructions in the transform codomain, indexed by `k = 0..=m`.
    pub approximations: Vec<DMatrix<f64>>,
    /// Reconstructions mapped back to the simplex by the inverse log-ratio map.
    pub simplex_approximations: Option<Vec<DMatrix<f64>>>,
    /// Power transform only: reconstructions orthogonally projected onto the
    /// hyperplane `sum = 1` for plotting.
    pub hyperplane_projections: Option<Vec<DMatrix<f64>>>,
    /// Per rank, per sample: does the composition-space approximation leave
    /// the simplex? Always false for log-ratio kinds.
    pub out_of_simplex: Vec<Vec<bool>>,
    /// Value substituted for zeros, when zero replacement touched the data.
    pub replacement: Option<f64>,
}

impl PcaResult {
    pub fn n_components(&self) -> usize {
        self.components.ncols()
    }

    pub fn total_variance(&self) -> f64 {
        self.eigenvalues.sum()
    }

    /// Rows living in composition space for rank `k`, when such a view exists.
    pub fn composition_view(&self, k: usize) -> &DMatrix<f64> {
        if let Some(s) = &self.simplex_approximations {
            &s[k]
        } else if let Some(h) = &self.hyperplane_projections {
            &h[k]
        } else {
            &self.approximations[k]
        }
    }
}

fn transform_rows(values: &DMatrix<f64>, f: impl Fn(&[f64]) -> Result<Vec<f64>>) -> Result<DMatrix<f64>> {
    let rows: Vec<Vec<f64>> = values
        .row_iter()
        .enumerate()
        .map(|(r, row)| {
            let v: Vec<f64> = row.iter().copied().collect();
            f(&v).map_err(|e| match e {
                Error::NonPositiveEntry { column, .. } => Error::NonPositiveEntry { row: r, column },
                other => other,
            })
        })
        .collect::<Result<_>>()?;
    let m = rows[0].len();
    Ok(DMatrix::from_fn(rows.len(), m, |i, j| rows[i][j]))
}

fn map_rows(values: &DMatrix<f64>, f: impl Fn(&[f64]) -> Vec<f64>) -> DMatrix<f64> {
    transform_rows(values, |r| Ok(f(r))).expect("infallible")
}

/// Eigendecomposition of a symmetric matrix with eigenvalues sorted in
/// decreasing order (clamped at zero) and each eigenvector's largest-magnitude
/// entry made positive.
pub fn sorted_eigen(cov: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(cov.clone());
    let m = cov.nrows();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap_or(Ordering::Equal).then(a.cmp(&b))
    });
    let values = DVector::from_iterator(m, order.iter().map(|&k| eig.eigenvalues[k].max(0.0)));
    let mut vectors = DMatrix::zeros(m, m);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(src).clone_owned();
        let mut lead = 0;
        for k in 1..m {
            if col[k].abs() > col[lead].abs() {
                lead = k;
            }
        }
        if col[lead] < 0.0 {
            col = -col;
        }
        vectors.set_column(dst, &col);
    }
    (values, vectors)
}

/// Centers columns and eigendecomposes the sample covariance (divisor `n - 1`).
pub fn pca(values: &DMatrix<f64>, spec: &TransformSpec) -> Result<PcaResult> {
    let n = values.nrows();
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    if n < 2 {
        return Err(Error::InvalidParameter("PCA needs at least two samples".into()));
    }
    spec.validate()?;

    let mut replacement = None;
    let transformed = match spec.kind {
        TransformKind::Identity => values.clone(),
        TransformKind::Power => map_rows(values, |r| power_transform(r, spec.exponent)),
        kind => {
            let z = zero_replace(values, spec.zero_factor, spec.renormalize)?;
            replacement = z.replacement;
            match kind {
                TransformKind::Clr => transform_rows(&z.values, clr)?,
                TransformKind::Alr => transform_rows(&z.values, |r| alr(r, spec.alr_reference))?,
                _ => transform_rows(&z.values, ilr)?,
            }
        }
    };

    let m = transformed.ncols();
    let mean = DVector::from_iterator(m, transformed.column_iter().map(|c| c.mean()));
    let mut centered = transformed.clone();
    for mut row in centered.row_iter_mut() {
        row -= mean.transpose();
    }
    let cov = centered.transpose() * &centered / (n as f64 - 1.0);
    let (eigenvalues, components) = sorted_eigen(&cov);
    let scores = &centered * &components;

    let mut approximations = Vec::with_capacity(m + 1);
    for k in 0..=m {
        let mut approx = DMatrix::from_fn(n, m, |_, j| mean[j]);
        if k > 0 {
            approx += scores.columns(0, k) * components.columns(0, k).transpose();
        }
        approximations.push(approx);
    }

    let simplex_approximations = spec.kind.is_log_ratio().then(|| {
        approximations
            .iter()
            .map(|a| match spec.kind {
                TransformKind::Clr => map_rows(a, clr_inverse),
                TransformKind::Alr => map_rows(a, |r| alr_inverse(r, spec.alr_reference)),
                _ => map_rows(a, ilr_inverse),
            })
            .collect::<Vec<_>>()
    });
    let hyperplane_projections = (spec.kind == TransformKind::Power)
        .then(|| approximations.iter().map(|a| map_rows(a, project_to_unit_sum_hyperplane)).collect::<Vec<_>>());

    let out_of_simplex = (0..=m)
        .map(|k| {
            let view = match (&simplex_approximations, &hyperplane_projections) {
                (Some(_), _) => return vec![false; n],
                (None, Some(h)) => &h[k],
                (None, None) => &approximations[k],
            };
            view.row_iter()
                .map(|row| row.iter().any(|v| *v < -OUT_OF_SIMPLEX_TOL || *v > 1.0 + OUT_OF_SIMPLEX_TOL))
                .collect()
        })
        .collect();

    Ok(PcaResult {
        transform: *spec,
        transformed,
        mean,
        components,
        eigenvalues,
        scores,
        approximations,
        simplex_approximations,
        hyperplane_projections,
        out_of_simplex,
        replacement,
    })
}

/// Orthogonal projection onto `{y : sum y = 1}`.
pub fn project_to_unit_sum_hyperplane(y: &[f64]) -> Vec<f64> {
    let shift = (1.0 - y.iter().sum::<f64>()) / y.len() as f64;
    y.iter().map(|v| v + shift).collect()
}
