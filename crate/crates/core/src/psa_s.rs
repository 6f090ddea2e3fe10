//! Principal subsimplex analysis via simplices.
//!
//! Starting from the vertices `e_1, ..., e_D` of the unit simplex, each
//! backwards step merges two vertices `v_i, v_j` into `alpha v_i + (1 - alpha) v_j`
//! and moves every sample parallel to the edge `v_j - v_i` onto the new,
//! lower dimensional subsimplex. The pooled barycentric mass `x_i + x_j` is
//! kept, so all other coordinates are untouched. The merge is chosen to
//! minimize the sum of squared scores, where the optimal `alpha` for a fixed
//! pair has a closed form.
//!
//! State is carried as barycentric coordinates relative to the current
//! vertex set; ambient approximations are materialized from those.

use std::f64::consts::SQRT_2;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::simplex::{Composition, SimplexVertexSet};

/// Pairs whose RSS differ by less than this are considered tied; the
/// lexicographically smaller pair wins.
pub const RSS_TIE_TOL: f64 = 1e-12;

/// One backwards step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergeRecord {
    pub rank_from: usize,
    /// Indices into the rank `rank_from` vertex list, `i < j`.
    pub merged_pair: (usize, usize),
    /// Weight on `v_i` in the merged vertex.
    pub alpha: f64,
    /// Sum of squared rank `rank_from` scores.
    pub rss: f64,
}

/// Merges `v_i` and `v_j` into `alpha v_i + (1 - alpha) v_j`, placed first and
/// followed by the remaining vertices in their original order.
pub fn merge_vertices(basis: &SimplexVertexSet, i: usize, j: usize, alpha: f64) -> Result<SimplexVertexSet> {
    let rank = basis.rank();
    if rank == 0 {
        return Err(Error::RankZero);
    }
    check_pair(i, j, rank)?;
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidAlpha(alpha));
    }
    let merged: Vec<f64> = basis
        .vertex(i)
        .as_slice()
        .iter()
        .zip(basis.vertex(j).as_slice())
        .map(|(a, b)| alpha * a + (1.0 - alpha) * b)
        .collect();
    let mut vertices = Vec::with_capacity(rank);
    vertices.push(Composition::new(merged)?);
    vertices.extend(basis.vertices().iter().enumerate().filter(|(k, _)| *k != i && *k != j).map(|(_, v)| v.clone()));
    // Convex combination of two vertices of an independent set keeps independence.
    Ok(SimplexVertexSet::from_trusted(vertices))
}

/// Mass-preserving projection in barycentric coordinates: the merged
/// coordinate receives the pooled mass `x_i + x_j`, the rest are copied.
/// The result does not depend on the merge ratio.
pub fn project_mass_preserving(coeffs: &[f64], i: usize, j: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(coeffs.len() - 1);
    out.push(coeffs[i] + coeffs[j]);
    out.extend(coeffs.iter().enumerate().filter(|(k, _)| *k != i && *k != j).map(|(_, v)| *v));
    out
}

/// Closed-form RSS minimizing ratio `sum x_i (x_i + x_j) / sum (x_i + x_j)^2`,
/// clipped to `[0, 1]`.
pub fn optimal_alpha(coeffs: &DMatrix<f64>, i: usize, j: usize) -> Result<f64> {
    let mut num = 0.0;
    let mut den = 0.0;
    for row in coeffs.row_iter() {
        let pooled = row[i] + row[j];
        num += row[i] * pooled;
        den += pooled * pooled;
    }
    if den == 0.0 {
        return Err(Error::DegeneratePair { i, j });
    }
    Ok((num / den).clamp(0.0, 1.0))
}

/// Signed distance `sqrt(2) (alpha x_j - (1 - alpha) x_i)` between a point and
/// its mass-preserving projection, measured in barycentric coordinates.
/// Positive scores mean excess mass on `v_j`.
pub fn score(coeffs_row: &[f64], i: usize, j: usize, alpha: f64) -> f64 {
    SQRT_2 * (alpha * coeffs_row[j] - (1.0 - alpha) * coeffs_row[i])
}

/// Optimal ratio and resulting RSS for one pair. A pair carrying no mass in
/// any sample gets ratio one half and RSS zero.
pub fn pair_fit(coeffs: &DMatrix<f64>, i: usize, j: usize) -> (f64, f64) {
    match optimal_alpha(coeffs, i, j) {
        Ok(alpha) => {
            let rss = coeffs
                .row_iter()
                .map(|row| {
                    let s = SQRT_2 * (alpha * row[j] - (1.0 - alpha) * row[i]);
                    s * s
                })
                .sum();
            (alpha, rss)
        }
        Err(_) => (0.5, 0.0),
    }
}

fn check_pair(i: usize, j: usize, rank: usize) -> Result<()> {
    if i == j || i > rank || j > rank {
        return Err(Error::InvalidPair { i, j, rank });
    }
    Ok(())
}

/// All pairs `i < j` among `r + 1` vertices, in lexicographic order.
pub fn vertex_pairs(rank: usize) -> Vec<(usize, usize)> {
    (0..=rank).flat_map(|i| (i + 1..=rank).map(move |j| (i, j))).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsaDecomposition {
    /// Indexed by rank, `0..=d`.
    vertex_sets: Vec<SimplexVertexSet>,
    /// Barycentric coordinates of the rank `r` approximations in the rank
    /// `r` vertex set, indexed by rank.
    coefficients: Vec<DMatrix<f64>>,
    /// Ambient rank `r` approximations, indexed by rank.
    approximations: Vec<DMatrix<f64>>,
    /// In fit order: rank `d` first.
    merges: Vec<MergeRecord>,
    /// `n x d`; column `k` holds the rank `d - k` scores.
    scores: DMatrix<f64>,
    /// In fit order, `v_j - v_i` of each merge.
    loadings: Vec<Vec<f64>>,
}

/// Runs the full backwards decomposition down to the backwards mean.
pub fn fit(data: &Dataset) -> Result<PsaDecomposition> {
    let n = data.n_samples();
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    let d = data.dim();
    if d < 1 {
        return Err(Error::DimensionMismatch { expected: 2, found: data.n_parts() });
    }

    let mut basis = SimplexVertexSet::standard(d + 1);
    let mut coeffs = data.values().clone();
    let mut vertex_sets = vec![basis.clone()];
    let mut coefficients = vec![coeffs.clone()];
    let mut merges = Vec::with_capacity(d);
    let mut scores = DMatrix::zeros(n, d);
    let mut loadings = Vec::with_capacity(d);

    for rank in (1..=d).rev() {
        let pairs = vertex_pairs(rank);
        let fits: Vec<(f64, f64)> = pairs.par_iter().map(|&(i, j)| pair_fit(&coeffs, i, j)).collect();
        let mut best = 0;
        for k in 1..pairs.len() {
            if fits[k].1 < fits[best].1 - RSS_TIE_TOL {
                best = k;
            }
        }
        let (i, j) = pairs[best];
        let (alpha, rss) = fits[best];

        let col = d - rank;
        for (s, row) in scores.column_mut(col).iter_mut().zip(coeffs.row_iter()) {
            *s = SQRT_2 * (alpha * row[j] - (1.0 - alpha) * row[i]);
        }
        loadings.push(basis.vertex(j).as_slice().iter().zip(basis.vertex(i).as_slice()).map(|(b, a)| b - a).collect());
        merges.push(MergeRecord { rank_from: rank, merged_pair: (i, j), alpha, rss });

        basis = merge_vertices(&basis, i, j, alpha)?;
        let mut next = DMatrix::zeros(n, rank);
        for (s, row) in coeffs.row_iter().enumerate() {
            let row: Vec<f64> = row.iter().copied().collect();
            for (k, v) in project_mass_preserving(&row, i, j).into_iter().enumerate() {
                next[(s, k)] = v;
            }
        }
        coeffs = next;
        vertex_sets.push(basis.clone());
        coefficients.push(coeffs.clone());
    }

    vertex_sets.reverse();
    coefficients.reverse();
    let approximations = coefficients.iter().zip(&vertex_sets).map(|(c, vs)| c * vs.to_matrix().transpose()).collect();

    Ok(PsaDecomposition { vertex_sets, coefficients, approximations, merges, scores, loadings })
}

impl PsaDecomposition {
    /// Simplex dimension `d` of the input.
    pub fn dim(&self) -> usize {
        self.vertex_sets.len() - 1
    }

    pub fn n_samples(&self) -> usize {
        self.scores.nrows()
    }

    pub fn vertex_set(&self, rank: usize) -> &SimplexVertexSet {
        &self.vertex_sets[rank]
    }

    pub fn coefficients(&self, rank: usize) -> &DMatrix<f64> {
        &self.coefficients[rank]
    }

    pub fn approximation(&self, rank: usize) -> &DMatrix<f64> {
        &self.approximations[rank]
    }

    /// Merge records in fit order, rank `d` first.
    pub fn merges(&self) -> &[MergeRecord] {
        &self.merges
    }

    pub fn merge(&self, rank: usize) -> &MergeRecord {
        &self.merges[self.dim() - rank]
    }

    /// `n x d` score matrix, columns ordered rank `d` down to rank 1.
    pub fn scores(&self) -> &DMatrix<f64> {
        &self.scores
    }

    pub fn score_column(&self, rank: usize) -> Vec<f64> {
        self.scores.column(self.dim() - rank).iter().copied().collect()
    }

    /// Loadings in fit order, rank `d` first.
    pub fn loadings(&self) -> &[Vec<f64>] {
        &self.loadings
    }

    pub fn loading(&self, rank: usize) -> &[f64] {
        &self.loadings[self.dim() - rank]
    }

    /// The single vertex of the rank 0 subsimplex.
    pub fn backwards_mean(&self) -> &Composition {
        self.vertex_sets[0].vertex(0)
    }

    /// Point `v0 + t / sqrt(2) * l_r` on the `rank`th mode of variation.
    pub fn mode_of_variation(&self, rank: usize, t: f64) -> Result<Composition> {
        if rank == 0 || rank > self.dim() {
            return Err(Error::InvalidRank { rank, max: self.dim() });
        }
        let point: Vec<f64> =
            self.backwards_mean().as_slice().iter().zip(self.loading(rank)).map(|(m, l)| m + t / SQRT_2 * l).collect();
        let min_entry = point.iter().copied().fold(f64::INFINITY, f64::min);
        if min_entry < -1e-9 {
            return Err(Error::OutOfSimplex { min_entry });
        }
        Composition::from_clamped(point, 1e-9)
    }
}
