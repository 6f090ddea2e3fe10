//! Geometry of unit simplices and unit nonnegative orthants.
//!
//! A composition of `D = d + 1` parts is a point of the unit `d`-simplex.
//! Dividing by the Euclidean norm carries it onto the nonnegative part of
//! the unit sphere; dividing by the 1-norm carries it back. Both PSA
//! variants build on these maps.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the unit-sum and unit-norm invariants.
pub const INVARIANT_TOL: f64 = 1e-9;

/// Raw rows whose sum deviates from one by less than this are renormalized;
/// larger deviations are rejected.
pub const RENORMALIZE_TOL: f64 = 1e-6;

/// Relative singular-value threshold of the affine independence test.
pub const AFFINE_RANK_TOL: f64 = 1e-10;

/// Least-squares residual and negativity slack allowed in
/// [`barycentric_coordinates`].
pub const BARYCENTRIC_TOL: f64 = 1e-8;

/// A point of the unit simplex: nonnegative entries summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Composition(Vec<f64>);

impl Composition {
    /// Strict constructor: entries must be nonnegative and sum to one
    /// within [`INVARIANT_TOL`].
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidComposition("no entries".into()));
        }
        if let Some(v) = entries.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidComposition(format!("entry {v} is negative or not finite")));
        }
        let sum: f64 = entries.iter().sum();
        if (sum - 1.0).abs() > INVARIANT_TOL {
            return Err(Error::InvalidComposition(format!("entries sum to {sum}")));
        }
        Ok(Self(entries))
    }

    /// Accepts rows whose sum is within [`RENORMALIZE_TOL`] of one and
    /// rescales them to unit sum.
    pub fn renormalized(entries: Vec<f64>) -> Result<Self> {
        if let Some(v) = entries.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidComposition(format!("entry {v} is negative or not finite")));
        }
        let sum: f64 = entries.iter().sum();
        if (sum - 1.0).abs() >= RENORMALIZE_TOL {
            return Err(Error::InvalidComposition(format!("entries sum to {sum}")));
        }
        Ok(Self(entries.into_iter().map(|v| v / sum).collect()))
    }

    /// Clamps entries in `[-slack, 0)` to zero and rescales to unit sum.
    pub(crate) fn from_clamped(entries: Vec<f64>, slack: f64) -> Result<Self> {
        let min = entries.iter().copied().fold(f64::INFINITY, f64::min);
        if min < -slack {
            return Err(Error::InvalidComposition(format!("entry {min} is negative")));
        }
        let clamped: Vec<f64> = entries.into_iter().map(|v| v.max(0.0)).collect();
        Self::new(l1_normalize(&clamped))
    }

    /// The `j`th standard unit vector `e_j` in `dim` parts.
    pub fn unit(dim: usize, j: usize) -> Self {
        let mut v = vec![0.0; dim];
        v[j] = 1.0;
        Self(v)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Indices of the parts with positive mass.
    pub fn support(&self) -> Vec<usize> {
        self.0.iter().enumerate().filter(|(_, v)| **v > 0.0).map(|(i, _)| i).collect()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl TryFrom<Vec<f64>> for Composition {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<Composition> for Vec<f64> {
    fn from(c: Composition) -> Self {
        c.0
    }
}

impl AsRef<[f64]> for Composition {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// A point of the unit nonnegative orthant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SphericalPoint(Vec<f64>);

impl SphericalPoint {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidComposition("no entries".into()));
        }
        if let Some(v) = entries.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidComposition(format!("entry {v} is negative or not finite")));
        }
        let norm = l2_norm(&entries);
        if (norm - 1.0).abs() > INVARIANT_TOL {
            return Err(Error::InvalidComposition(format!("norm is {norm}, expected 1")));
        }
        Ok(Self(entries))
    }

    pub fn unit(dim: usize, j: usize) -> Self {
        let mut v = vec![0.0; dim];
        v[j] = 1.0;
        Self(v)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl TryFrom<Vec<f64>> for SphericalPoint {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SphericalPoint> for Vec<f64> {
    fn from(p: SphericalPoint) -> Self {
        p.0
    }
}

impl AsRef<[f64]> for SphericalPoint {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Vertices `v_1, ..., v_{r+1}` of an `r`-dimensional subsimplex of the
/// unit simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexVertexSet {
    vertices: Vec<Composition>,
}

impl SimplexVertexSet {
    pub fn new(vertices: Vec<Composition>) -> Result<Self> {
        check_same_dim(vertices.iter().map(|v| v.len()))?;
        let rows: Vec<&[f64]> = vertices.iter().map(|v| v.as_slice()).collect();
        if !affinely_independent(&rows) {
            return Err(Error::AffinelyDependent);
        }
        Ok(Self { vertices })
    }

    /// Skips the independence check; callers guarantee it by construction.
    pub(crate) fn from_trusted(vertices: Vec<Composition>) -> Self {
        Self { vertices }
    }

    /// Vertices `e_1, ..., e_dim` of the whole unit simplex.
    pub fn standard(dim: usize) -> Self {
        Self { vertices: (0..dim).map(|j| Composition::unit(dim, j)).collect() }
    }

    pub fn rank(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn ambient_dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn vertices(&self) -> &[Composition] {
        &self.vertices
    }

    pub fn vertex(&self, k: usize) -> &Composition {
        &self.vertices[k]
    }

    /// Ambient point `sum_k coeffs[k] * v_k`.
    pub fn combine(&self, coeffs: &[f64]) -> Vec<f64> {
        combine_rows(self.vertices.iter().map(|v| v.as_slice()), coeffs, self.ambient_dim())
    }

    /// Columns are the vertices.
    pub fn to_matrix(&self) -> DMatrix<f64> {
        vertex_matrix(self.vertices.iter().map(|v| v.as_slice()), self.ambient_dim())
    }
}

/// Orthonormal vertices of an `r`-dimensional nonnegative orthant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthantVertexSet {
    vertices: Vec<SphericalPoint>,
}

impl OrthantVertexSet {
    pub fn new(vertices: Vec<SphericalPoint>) -> Result<Self> {
        check_same_dim(vertices.iter().map(|v| v.len()))?;
        for (a, va) in vertices.iter().enumerate() {
            for vb in &vertices[a + 1..] {
                if dot(va.as_slice(), vb.as_slice()).abs() > INVARIANT_TOL {
                    return Err(Error::NotOrthonormal);
                }
            }
        }
        Ok(Self { vertices })
    }

    pub(crate) fn from_trusted(vertices: Vec<SphericalPoint>) -> Self {
        Self { vertices }
    }

    pub fn standard(dim: usize) -> Self {
        Self { vertices: (0..dim).map(|j| SphericalPoint::unit(dim, j)).collect() }
    }

    pub fn rank(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn ambient_dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn vertices(&self) -> &[SphericalPoint] {
        &self.vertices
    }

    pub fn vertex(&self, k: usize) -> &SphericalPoint {
        &self.vertices[k]
    }

    pub fn combine(&self, coeffs: &[f64]) -> Vec<f64> {
        combine_rows(self.vertices.iter().map(|v| v.as_slice()), coeffs, self.ambient_dim())
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        vertex_matrix(self.vertices.iter().map(|v| v.as_slice()), self.ambient_dim())
    }

    /// Simplex images `v / ||v||_1` of the vertices.
    pub fn to_simplex(&self) -> SimplexVertexSet {
        SimplexVertexSet::from_trusted(self.vertices.iter().map(orthant_to_simplex).collect())
    }
}

fn check_same_dim(mut dims: impl Iterator<Item = usize>) -> Result<()> {
    let first = dims.next().ok_or(Error::InvalidComposition("empty vertex set".into()))?;
    for d in dims {
        if d != first {
            return Err(Error::DimensionMismatch { expected: first, found: d });
        }
    }
    Ok(())
}

fn combine_rows<'a>(rows: impl Iterator<Item = &'a [f64]>, coeffs: &[f64], dim: usize) -> Vec<f64> {
    let mut out = vec![0.0; dim];
    for (row, &c) in rows.zip(coeffs) {
        if c == 0.0 {
            continue;
        }
        for (o, v) in out.iter_mut().zip(row) {
            *o += c * v;
        }
    }
    out
}

fn vertex_matrix<'a>(rows: impl ExactSizeIterator<Item = &'a [f64]>, dim: usize) -> DMatrix<f64> {
    let cols: Vec<&[f64]> = rows.collect();
    DMatrix::from_fn(dim, cols.len(), |i, k| cols[k][i])
}

/// True when the differences `v_k - v_last` are linearly independent, judged
/// by the singular values of the difference matrix.
pub fn affinely_independent(vertices: &[&[f64]]) -> bool {
    if vertices.len() <= 1 {
        return true;
    }
    let last = vertices[vertices.len() - 1];
    let r = vertices.len() - 1;
    if r > last.len() {
        return false;
    }
    let diff = DMatrix::from_fn(last.len(), r, |i, k| vertices[k][i] - last[i]);
    let sv = diff.singular_values();
    let max = sv.max();
    if max <= 0.0 {
        return false;
    }
    sv.iter().filter(|s| **s > AFFINE_RANK_TOL * max).count() == r
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn l2_norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn l1_normalize(a: &[f64]) -> Vec<f64> {
    let s: f64 = a.iter().map(|v| v.abs()).sum();
    a.iter().map(|v| v / s).collect()
}

pub fn l2_normalize(a: &[f64]) -> Vec<f64> {
    let n = l2_norm(a);
    a.iter().map(|v| v / n).collect()
}

/// Scaling function: barycentric coordinates of `x` in the simplex spanned
/// by `basis`, obtained by least squares and validated against the residual.
pub fn barycentric_coordinates(x: &Composition, basis: &SimplexVertexSet) -> Result<Vec<f64>> {
    if x.len() != basis.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: basis.ambient_dim(), found: x.len() });
    }
    let b = basis.to_matrix();
    let rhs = DVector::from_column_slice(x.as_slice());
    let coeffs =
        b.clone().svd(true, true).solve(&rhs, 1e-14).map_err(|_| Error::NotInSimplex { residual: f64::INFINITY })?;
    let residual = (&b * &coeffs - &rhs).norm();
    if residual > BARYCENTRIC_TOL {
        return Err(Error::NotInSimplex { residual });
    }
    if coeffs.iter().any(|c| *c < -BARYCENTRIC_TOL) {
        return Err(Error::NotInSimplex { residual });
    }
    let clamped: Vec<f64> = coeffs.iter().map(|c| c.max(0.0)).collect();
    Ok(l1_normalize(&clamped))
}

/// `x / ||x||_2`: from the simplex onto the nonnegative orthant.
pub fn simplex_to_orthant(x: &Composition) -> SphericalPoint {
    SphericalPoint(l2_normalize(x.as_slice()))
}

/// `x / ||x||_1`: from the nonnegative orthant back onto the simplex.
pub fn orthant_to_simplex(x: &SphericalPoint) -> Composition {
    Composition(l1_normalize(x.as_slice()))
}

/// Great-circle distance between two unit vectors.
///
/// Evaluated as `2 atan2(||x - y||, ||x + y||)`, which equals `acos(x . y)`
/// for unit vectors but keeps full precision for nearly coincident or nearly
/// antipodal points.
pub fn arc_distance(x: &[f64], y: &[f64]) -> f64 {
    let mut minus = 0.0;
    let mut plus = 0.0;
    for (a, b) in x.iter().zip(y) {
        minus += (a - b) * (a - b);
        plus += (a + b) * (a + b);
    }
    2.0 * minus.sqrt().atan2(plus.sqrt())
}

pub fn geodesic_distance(x: &SphericalPoint, y: &SphericalPoint) -> f64 {
    arc_distance(x.as_slice(), y.as_slice())
}
