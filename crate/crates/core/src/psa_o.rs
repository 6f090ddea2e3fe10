//! Principal subsimplex analysis via orthants.
//!
//! Compositions are carried onto the unit nonnegative orthant by
//! `x / ||x||_2`. Each backwards step merges two orthonormal vertices into
//! `(alpha v_i + (1 - alpha) v_j) / ||.||_2`, which together with the untouched
//! vertices spans a suborthant. Samples move onto it along great circles
//! perpendicular to the suborthant; the signed arc length is the score.
//! Pair and ratio are found by a grid search over `alpha`. At the end every
//! vertex set and approximation is mapped back with `x / ||x||_1`.
//!
//! Samples are tracked by their coordinates in the current orthonormal
//! vertex basis. For a candidate merge only the two merged coordinates
//! change, which keeps each candidate evaluation O(n).

use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::psa_s::{vertex_pairs, RSS_TIE_TOL};
use crate::simplex::{
    arc_distance, dot, l1_normalize, l2_normalize, orthant_to_simplex, Composition, OrthantVertexSet, SimplexVertexSet,
    SphericalPoint,
};

/// `|x . u|` at or above `1 - POLE_TOL` counts as sitting on the removed pole.
pub const POLE_TOL: f64 = 1e-12;

pub const DEFAULT_GRID_POINTS: usize = 101;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsaoOptions {
    /// Uniform grid over `[0, 1]`, both endpoints included.
    pub grid_points: usize,
    /// Run one golden-section pass around the best grid point of each pair.
    pub refine: bool,
}

impl Default for PsaoOptions {
    fn default() -> Self {
        Self { grid_points: DEFAULT_GRID_POINTS, refine: false }
    }
}

/// Result of merging two orthant vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthantMerge {
    pub new_vertex: Vec<f64>,
    /// Unit normal of the suborthant inside `span{v_i, v_j}`, oriented toward `v_j`.
    pub removed_direction: Vec<f64>,
    pub reduced: OrthantVertexSet,
}

pub fn merge_orthant_vertices(basis: &OrthantVertexSet, i: usize, j: usize, alpha: f64) -> Result<OrthantMerge> {
    let rank = basis.rank();
    if rank == 0 {
        return Err(Error::RankZero);
    }
    if i == j || i > rank || j > rank {
        return Err(Error::InvalidPair { i, j, rank });
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidAlpha(alpha));
    }
    let vi = basis.vertex(i).as_slice();
    let vj = basis.vertex(j).as_slice();
    let merged: Vec<f64> = vi.iter().zip(vj).map(|(a, b)| alpha * a + (1.0 - alpha) * b).collect();
    let removed: Vec<f64> = vi.iter().zip(vj).map(|(a, b)| alpha * b - (1.0 - alpha) * a).collect();
    if merged.iter().all(|v| *v == 0.0) {
        return Err(Error::DegenerateRatio);
    }
    let new_vertex = l2_normalize(&merged);
    let removed_direction = l2_normalize(&removed);
    let mut vertices = Vec::with_capacity(rank);
    vertices.push(SphericalPoint::new(new_vertex.clone())?);
    vertices.extend(basis.vertices().iter().enumerate().filter(|(k, _)| *k != i && *k != j).map(|(_, v)| v.clone()));
    Ok(OrthantMerge { new_vertex, removed_direction, reduced: OrthantVertexSet::from_trusted(vertices) })
}

/// Closest point to `x` on the great subsphere orthogonal to the unit vector
/// `u`, together with the signed arc length from `x` to it (positive when
/// `x . u > 0`).
pub fn project_to_suborthant(x: &[f64], u: &[f64]) -> Result<(Vec<f64>, f64)> {
    let a = dot(x, u);
    if a.abs() >= 1.0 - POLE_TOL {
        return Err(Error::PoleSingularity);
    }
    let tangent: Vec<f64> = x.iter().zip(u).map(|(xv, uv)| xv - a * uv).collect();
    let projection = l2_normalize(&tangent);
    let dist = arc_distance(x, &projection);
    Ok((projection, if a < 0.0 { -dist } else { dist }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthantMergeRecord {
    pub rank_from: usize,
    pub merged_pair: (usize, usize),
    pub alpha: f64,
    pub new_vertex: Vec<f64>,
    pub removed_direction: Vec<f64>,
    pub rss: f64,
}

/// A sample that sat on the removed pole of a merge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoleEvent {
    pub rank_from: usize,
    pub sample: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsaoDecomposition {
    /// Indexed by rank.
    orthant_vertex_sets: Vec<OrthantVertexSet>,
    /// Coordinates of the spherical approximations in the orthant basis of
    /// the same rank, indexed by rank.
    coordinates: Vec<DMatrix<f64>>,
    spherical_approximations: Vec<DMatrix<f64>>,
    simplex_approximations: Vec<DMatrix<f64>>,
    /// Fit order, rank `d` first.
    merges: Vec<OrthantMergeRecord>,
    /// `n x d`, column `k` holds rank `d - k`.
    scores: DMatrix<f64>,
    loadings: Vec<Vec<f64>>,
    poles: Vec<PoleEvent>,
}

/// Per-sample coordinates on the merged pair, plus the squared norm of the
/// untouched coordinates.
#[derive(Clone, Copy)]
struct PairState {
    ci: f64,
    cj: f64,
    others_sq: f64,
}

struct Step {
    score: f64,
    kept: f64,
    pole: bool,
}

fn evaluate(p: PairState, alpha: f64) -> Step {
    let norm = alpha.hypot(1.0 - alpha);
    let along_u = (alpha * p.cj - (1.0 - alpha) * p.ci) / norm;
    let kept = (alpha * p.ci + (1.0 - alpha) * p.cj) / norm;
    if along_u.abs() >= 1.0 - POLE_TOL {
        return Step { score: FRAC_PI_2.copysign(along_u), kept, pole: true };
    }
    let rest = (kept * kept + p.others_sq).sqrt();
    Step { score: along_u.atan2(rest), kept, pole: false }
}

fn pair_states(coords: &DMatrix<f64>, i: usize, j: usize) -> Vec<PairState> {
    coords
        .row_iter()
        .map(|row| {
            let others_sq = row.iter().enumerate().filter(|(k, _)| *k != i && *k != j).map(|(_, v)| v * v).sum();
            PairState { ci: row[i], cj: row[j], others_sq }
        })
        .collect()
}

fn rss(states: &[PairState], alpha: f64) -> f64 {
    states.iter().map(|p| evaluate(*p, alpha).score.powi(2)).sum()
}

/// Best `(alpha, rss)` for one pair over the grid, smallest alpha on ties.
fn search_pair(states: &[PairState], opts: &PsaoOptions) -> (f64, f64) {
    let steps = opts.grid_points - 1;
    let mut best = (0.0, rss(states, 0.0));
    for k in 1..=steps {
        let alpha = k as f64 / steps as f64;
        let value = rss(states, alpha);
        if value < best.1 - RSS_TIE_TOL {
            best = (alpha, value);
        }
    }
    if opts.refine {
        let h = 1.0 / steps as f64;
        let (alpha, value) = golden_section(|a| rss(states, a), (best.0 - h).max(0.0), (best.0 + h).min(1.0), 60);
        if value < best.1 - RSS_TIE_TOL {
            best = (alpha, value);
        }
    }
    best
}

fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - inv_phi * (hi - lo);
    let mut b = lo + inv_phi * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..iters {
        if fa <= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = f(b);
        }
    }
    if fa <= fb {
        (a, fa)
    } else {
        (b, fb)
    }
}

pub fn fit(data: &Dataset, opts: &PsaoOptions) -> Result<PsaoDecomposition> {
    fit_rows(data.values(), opts)
}

/// Fits rows of nonnegative weights that need not sum to one; each row is
/// only used through its direction `x / ||x||_2`.
pub fn fit_rows(rows: &DMatrix<f64>, opts: &PsaoOptions) -> Result<PsaoDecomposition> {
    let n = rows.nrows();
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    if rows.ncols() < 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: rows.ncols() });
    }
    if opts.grid_points < 2 {
        return Err(Error::InvalidParameter(format!("grid needs at least 2 points, got {}", opts.grid_points)));
    }
    let d = rows.ncols() - 1;
    let mut coords = rows.clone();
    for (r, mut row) in coords.row_iter_mut().enumerate() {
        if let Some((c, v)) = row.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < 0.0) {
            return Err(Error::NegativeEntry { row: r, column: c, value: *v });
        }
        let norm = row.norm();
        if norm == 0.0 {
            return Err(Error::InvalidComposition(format!("row {r} is zero")));
        }
        row /= norm;
    }

    let mut basis = OrthantVertexSet::standard(d + 1);
    let mut vertex_sets = vec![basis.clone()];
    let mut coordinates = vec![coords.clone()];
    let mut merges = Vec::with_capacity(d);
    let mut scores = DMatrix::zeros(n, d);
    let mut loadings = Vec::with_capacity(d);
    let mut poles = Vec::new();

    for rank in (1..=d).rev() {
        let pairs = vertex_pairs(rank);
        let results: Vec<(f64, f64)> =
            pairs.par_iter().map(|&(i, j)| search_pair(&pair_states(&coords, i, j), opts)).collect();
        let mut best = 0;
        for k in 1..pairs.len() {
            if results[k].1 < results[best].1 - RSS_TIE_TOL {
                best = k;
            }
        }
        let (i, j) = pairs[best];
        let (alpha, rss) = results[best];

        let merge = merge_orthant_vertices(&basis, i, j, alpha)?;
        let states = pair_states(&coords, i, j);
        let mut next = DMatrix::zeros(n, rank);
        let col = d - rank;
        for (s, state) in states.iter().enumerate() {
            let step = evaluate(*state, alpha);
            scores[(s, col)] = step.score;
            let lead = if step.pole {
                poles.push(PoleEvent { rank_from: rank, sample: s });
                state.ci.hypot(state.cj)
            } else {
                step.kept
            };
            let mut row = Vec::with_capacity(rank);
            row.push(lead);
            row.extend((0..=rank).filter(|k| *k != i && *k != j).map(|k| coords[(s, k)]));
            for (k, v) in l2_normalize(&row).into_iter().enumerate() {
                next[(s, k)] = v;
            }
        }

        let vi = orthant_to_simplex(basis.vertex(i));
        let vj = orthant_to_simplex(basis.vertex(j));
        loadings.push(vj.as_slice().iter().zip(vi.as_slice()).map(|(b, a)| b - a).collect());
        merges.push(OrthantMergeRecord {
            rank_from: rank,
            merged_pair: (i, j),
            alpha,
            new_vertex: merge.new_vertex,
            removed_direction: merge.removed_direction,
            rss,
        });
        basis = merge.reduced;
        coords = next;
        vertex_sets.push(basis.clone());
        coordinates.push(coords.clone());
    }

    vertex_sets.reverse();
    coordinates.reverse();
    let spherical_approximations: Vec<DMatrix<f64>> =
        coordinates.iter().zip(&vertex_sets).map(|(c, vs)| c * vs.to_matrix().transpose()).collect();
    let simplex_approximations = spherical_approximations
        .iter()
        .map(|m| {
            let mut out = m.clone();
            for mut row in out.row_iter_mut() {
                let s: f64 = row.iter().sum();
                row /= s;
            }
            out
        })
        .collect();

    Ok(PsaoDecomposition {
        orthant_vertex_sets: vertex_sets,
        coordinates,
        spherical_approximations,
        simplex_approximations,
        merges,
        scores,
        loadings,
        poles,
    })
}

impl PsaoDecomposition {
    pub fn dim(&self) -> usize {
        self.orthant_vertex_sets.len() - 1
    }

    pub fn n_samples(&self) -> usize {
        self.scores.nrows()
    }

    pub fn orthant_vertex_set(&self, rank: usize) -> &OrthantVertexSet {
        &self.orthant_vertex_sets[rank]
    }

    pub fn simplex_vertex_set(&self, rank: usize) -> SimplexVertexSet {
        self.orthant_vertex_sets[rank].to_simplex()
    }

    /// Coordinates of the rank `rank` spherical approximations in that
    /// rank's orthonormal vertex basis.
    pub fn coordinates(&self, rank: usize) -> &DMatrix<f64> {
        &self.coordinates[rank]
    }

    pub fn spherical_approximation(&self, rank: usize) -> &DMatrix<f64> {
        &self.spherical_approximations[rank]
    }

    pub fn simplex_approximation(&self, rank: usize) -> &DMatrix<f64> {
        &self.simplex_approximations[rank]
    }

    pub fn merges(&self) -> &[OrthantMergeRecord] {
        &self.merges
    }

    pub fn merge(&self, rank: usize) -> &OrthantMergeRecord {
        &self.merges[self.dim() - rank]
    }

    pub fn scores(&self) -> &DMatrix<f64> {
        &self.scores
    }

    pub fn score_column(&self, rank: usize) -> Vec<f64> {
        self.scores.column(self.dim() - rank).iter().copied().collect()
    }

    pub fn loadings(&self) -> &[Vec<f64>] {
        &self.loadings
    }

    pub fn loading(&self, rank: usize) -> &[f64] {
        &self.loadings[self.dim() - rank]
    }

    /// Samples that hit the removed pole during some merge.
    pub fn poles(&self) -> &[PoleEvent] {
        &self.poles
    }

    pub fn spherical_mean(&self) -> &SphericalPoint {
        self.orthant_vertex_sets[0].vertex(0)
    }

    pub fn backwards_mean(&self) -> Composition {
        orthant_to_simplex(self.spherical_mean())
    }

    /// Point at signed arc length `t` from the backwards mean along the great
    /// circle through the removed direction of the rank `rank` merge.
    pub fn mode_of_variation(&self, rank: usize, t: f64) -> Result<Composition> {
        if rank == 0 || rank > self.dim() {
            return Err(Error::InvalidRank { rank, max: self.dim() });
        }
        let point = self.mode_point_on_sphere(rank, t);
        let min_entry = point.iter().copied().fold(f64::INFINITY, f64::min);
        if min_entry < -1e-9 {
            return Err(Error::OutOfOrthant { min_entry });
        }
        let clamped: Vec<f64> = point.into_iter().map(|v| v.max(0.0)).collect();
        Composition::new(l1_normalize(&clamped))
    }

    /// Unclamped spherical point `cos(t) m + sin(t) u_r`.
    pub fn mode_point_on_sphere(&self, rank: usize, t: f64) -> Vec<f64> {
        let m = self.spherical_mean().as_slice();
        let u = &self.merge(rank).removed_direction;
        m.iter().zip(u).map(|(a, b)| t.cos() * a + t.sin() * b).collect()
    }
}
