//! Spectral facts about log-ratio PCA.

use nalgebra::DVector;
use rand::Rng;
use subsimplex_core::benchmarks::pca::pca;
use subsimplex_core::benchmarks::transforms::{TransformKind, TransformSpec};

use super::data;

fn positive_matrix(rng: &mut impl Rng) -> nalgebra::DMatrix<f64> {
    let parts = rng.random_range(3..=8);
    let n = rng.random_range(parts + 2..=40);
    let rows = data::random_rows(rng, n, parts, 0.0);
    nalgebra::DMatrix::from_fn(n, parts, |i, j| rows[i][j])
}

#[derive(Debug, Default)]
pub struct NullReport {
    pub datasets: usize,
    pub max_eigenvalue: f64,
    pub max_angle: f64,
}

/// The smallest clr-PCA eigenvalue vanishes and its component is the
/// normalized all-ones vector.
pub fn clr_null_direction(datasets: usize, seed: u64) -> Result<NullReport, String> {
    let mut rng = data::rng(seed);
    let mut report = NullReport::default();
    for case in 0..datasets {
        let m = positive_matrix(&mut rng);
        let parts = m.ncols();
        let r = pca(&m, &TransformSpec::new(TransformKind::Clr)).map_err(|e| e.to_string())?;
        let smallest = r.eigenvalues[parts - 1];
        let c = r.components.column(parts - 1);
        let ones = DVector::from_element(parts, 1.0 / (parts as f64).sqrt());
        let along = c.dot(&ones).abs();
        let across = (c - &ones * c.dot(&ones)).norm();
        let angle = across.atan2(along);
        if smallest >= 1e-10 || angle >= 1e-6 {
            return Err(format!("case {case}: smallest eigenvalue {smallest}, angle {angle}"));
        }
        report.max_eigenvalue = report.max_eigenvalue.max(smallest);
        report.max_angle = report.max_angle.max(angle);
        report.datasets += 1;
    }
    Ok(report)
}

/// ilr spectrum equals the nonzero part of the clr spectrum.
pub fn ilr_clr_agree(datasets: usize, seed: u64) -> Result<f64, String> {
    let mut rng = data::rng(seed);
    let mut worst = 0.0f64;
    for case in 0..datasets {
        let m = positive_matrix(&mut rng);
        let c = pca(&m, &TransformSpec::new(TransformKind::Clr)).map_err(|e| e.to_string())?;
        let i = pca(&m, &TransformSpec::new(TransformKind::Ilr)).map_err(|e| e.to_string())?;
        for k in 0..i.eigenvalues.len() {
            let gap = (c.eigenvalues[k] - i.eigenvalues[k]).abs();
            if gap > 1e-9 {
                return Err(format!(
                    "case {case}: eigenvalue {k} clr {} vs ilr {}",
                    c.eigenvalues[k], i.eigenvalues[k]
                ));
            }
            worst = worst.max(gap);
        }
    }
    Ok(worst)
}
