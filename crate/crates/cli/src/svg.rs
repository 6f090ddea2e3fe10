//! Hand-written SVG: ternary plots with approximating subsets, and score
//! scatter matrices.

use std::fmt::Write;

use subsimplex_core::benchmarks::pca::{project_to_unit_sum_hyperplane, PcaResult};
use subsimplex_core::benchmarks::transforms::{alr_inverse, clr_inverse, ilr_inverse, TransformKind};
use subsimplex_core::simplex::{barycentric_coordinates, l2_normalize};
use subsimplex_core::{
    orthant_to_simplex, Composition, Dataset, PsaDecomposition, PsaoDecomposition, SimplexVertexSet, SphericalPoint,
};

use crate::error::{CliError, Result};

pub const PALETTE: [&str; 10] =
    ["#d62728", "#2ca02c", "#17becf", "#9467bd", "#1f77b4", "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22"];

const SIDE: f64 = 400.0;
const SQRT3_2: f64 = 0.866_025_403_784_438_6;

/// Maps `(a, b, c)` to the unit-edge triangle with `e_1` at the origin,
/// `e_2` at `(1, 0)` and `e_3` at the apex.
pub fn ternary_xy(p: [f64; 3]) -> (f64, f64) {
    (p[1] + p[2] / 2.0, SQRT3_2 * p[2])
}

/// Row grouping used for colors.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Groups {
    pub names: Vec<String>,
    /// Index into `names` for every sample.
    pub of_row: Vec<usize>,
}

impl Groups {
    pub fn single(n: usize) -> Self {
        Self { names: Vec::new(), of_row: vec![0; n] }
    }

    /// Groups by the named metadata column, or by `cluster`, or by the first
    /// metadata column; one group when there is no metadata.
    pub fn from_dataset(ds: &Dataset, color_by: Option<&str>) -> Result<Self> {
        let column = match color_by {
            Some(name) => Some(
                ds.metadata(name)
                    .ok_or_else(|| CliError::Config(format!("no metadata column `{name}` to color by")))?,
            ),
            None => ds.metadata("cluster").or_else(|| ds.row_metadata().first()),
        };
        let Some(column) = column else { return Ok(Self::single(ds.n_samples())) };
        let mut names: Vec<String> = Vec::new();
        let of_row = column
            .values
            .iter()
            .map(|v| match names.iter().position(|n| n == v) {
                Some(k) => k,
                None => {
                    names.push(v.clone());
                    names.len() - 1
                }
            })
            .collect();
        Ok(Self { names, of_row })
    }

    fn color(&self, row: usize) -> &'static str {
        PALETTE[self.of_row[row] % PALETTE.len()]
    }
}

/// Everything drawn in one ternary plot, in barycentric coordinates of the
/// plotted triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct TernaryScene {
    pub title: String,
    pub corners: [String; 3],
    pub points: Vec<[f64; 3]>,
    pub approximations: Vec<[f64; 3]>,
    pub subset: Vec<[f64; 3]>,
    pub mean: [f64; 3],
}

fn triple(v: &[f64]) -> [f64; 3] {
    [v[0], v[1], v[2]]
}

fn vertex_label(v: &Composition, labels: &[String]) -> String {
    let mut parts: Vec<(usize, f64)> = v.as_slice().iter().copied().enumerate().filter(|(_, w)| *w > 1e-12).collect();
    if parts.len() == 1 {
        return labels[parts[0].0].clone();
    }
    parts.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut s: Vec<String> = parts.iter().take(3).map(|(k, w)| format!("{w:.2} {}", labels[*k])).collect();
    if parts.len() > 3 {
        s.push("...".into());
    }
    s.join(" + ")
}

fn in_basis(x: &[f64], basis: &SimplexVertexSet) -> Result<[f64; 3]> {
    let c = Composition::new(x.to_vec())?;
    Ok(triple(&barycentric_coordinates(&c, basis)?))
}

fn corners(basis: &SimplexVertexSet, labels: &[String]) -> [String; 3] {
    [0, 1, 2].map(|k| vertex_label(basis.vertex(k), labels))
}

fn row(m: &nalgebra::DMatrix<f64>, i: usize) -> Vec<f64> {
    m.row(i).iter().copied().collect()
}

/// PSA-S rank 2 view: the data (or its rank 2 approximation when `d > 2`),
/// the rank 1 segment and approximations, and the backwards mean.
pub fn psa_s_scene(ds: &Dataset, fit: &PsaDecomposition) -> Result<TernaryScene> {
    if fit.dim() < 2 {
        return Err(CliError::DimensionNotTwo { dim: fit.dim() });
    }
    let basis = fit.vertex_set(2);
    let n = ds.n_samples();
    let coeffs = fit.coefficients(2);
    let points = (0..n).map(|i| triple(&row(coeffs, i))).collect();
    let approximations = (0..n).map(|i| in_basis(&row(fit.approximation(1), i), basis)).collect::<Result<Vec<_>>>()?;
    let ends = fit.vertex_set(1);
    let subset = vec![in_basis(ends.vertex(0).as_slice(), basis)?, in_basis(ends.vertex(1).as_slice(), basis)?];
    Ok(TernaryScene {
        title: "PSA-S".into(),
        corners: corners(basis, ds.column_labels()),
        points,
        approximations,
        subset,
        mean: in_basis(fit.backwards_mean().as_slice(), basis)?,
    })
}

/// PSA-O rank 2 view; the rank 1 subset is the image of a great-circle arc.
pub fn psa_o_scene(ds: &Dataset, fit: &PsaoDecomposition) -> Result<TernaryScene> {
    if fit.dim() < 2 {
        return Err(CliError::DimensionNotTwo { dim: fit.dim() });
    }
    let basis = fit.simplex_vertex_set(2);
    let n = ds.n_samples();
    let points = (0..n).map(|i| in_basis(&row(fit.simplex_approximation(2), i), &basis)).collect::<Result<Vec<_>>>()?;
    let approximations =
        (0..n).map(|i| in_basis(&row(fit.simplex_approximation(1), i), &basis)).collect::<Result<Vec<_>>>()?;
    let arc = fit.orthant_vertex_set(1);
    let (w0, w1) = (arc.vertex(0).as_slice(), arc.vertex(1).as_slice());
    let subset = (0..=64)
        .map(|k| {
            let t = k as f64 / 64.0 * std::f64::consts::FRAC_PI_2;
            let p: Vec<f64> = w0.iter().zip(w1).map(|(a, b)| (t.cos() * a + t.sin() * b).max(0.0)).collect();
            let x = orthant_to_simplex(&SphericalPoint::new(l2_normalize(&p))?);
            in_basis(x.as_slice(), &basis)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TernaryScene {
        title: "PSA-O".into(),
        corners: corners(&basis, ds.column_labels()),
        points,
        approximations,
        subset,
        mean: in_basis(fit.backwards_mean().as_slice(), &basis)?,
    })
}

/// Maps a point of the transform codomain to the composition view of `r`.
pub fn to_composition_view(r: &PcaResult, y: &[f64]) -> Vec<f64> {
    match r.transform.kind {
        TransformKind::Identity => y.to_vec(),
        TransformKind::Power => project_to_unit_sum_hyperplane(y),
        TransformKind::Clr => clr_inverse(y),
        TransformKind::Alr => alr_inverse(y, r.transform.alr_reference),
        TransformKind::Ilr => ilr_inverse(y),
    }
}

/// PCA view for three-part data: rank 1 approximations and the first
/// principal curve through the mean. Points may leave the triangle.
pub fn pca_scene(ds: &Dataset, r: &PcaResult, title: &str) -> Result<TernaryScene> {
    if ds.dim() != 2 {
        return Err(CliError::DimensionNotTwo { dim: ds.dim() });
    }
    let n = ds.n_samples();
    let points = (0..n).map(|i| triple(&ds.row(i))).collect();
    let view = r.composition_view(1);
    let approximations = (0..n).map(|i| triple(&row(view, i))).collect();
    let s = r.scores.column(0);
    let (lo, hi) = (s.min(), s.max());
    let pad = 0.1 * (hi - lo).max(1e-12);
    let c = r.components.column(0);
    let subset = (0..=64)
        .map(|k| {
            let t = lo - pad + (hi - lo + 2.0 * pad) * k as f64 / 64.0;
            let y: Vec<f64> = r.mean.iter().zip(c.iter()).map(|(m, v)| m + t * v).collect();
            triple(&to_composition_view(r, &y))
        })
        .collect();
    Ok(TernaryScene {
        title: title.into(),
        corners: [0, 1, 2].map(|k| ds.column_labels()[k].clone()),
        points,
        approximations,
        subset,
        mean: triple(&row(r.composition_view(0), 0)),
    })
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn legend(out: &mut String, groups: &Groups, x: f64, y: f64) {
    for (k, name) in groups.names.iter().enumerate() {
        let yy = y + 16.0 * k as f64;
        let _ = writeln!(
            out,
            r#"<circle class="legend" cx="{x:.3}" cy="{yy:.3}" r="4" fill="{}"/><text x="{:.3}" y="{:.3}" font-size="11">{}</text>"#,
            PALETTE[k % PALETTE.len()],
            x + 8.0,
            yy + 4.0,
            escape(name)
        );
    }
}

/// Standalone SVG of a ternary scene. The canvas grows to keep points that
/// leave the triangle visible.
pub fn emit_ternary_svg(scene: &TernaryScene, groups: &Groups) -> String {
    let all = scene.points.iter().chain(&scene.approximations).chain(&scene.subset).chain(std::iter::once(&scene.mean));
    let (mut x0, mut x1, mut y0, mut y1) = (0.0f64, 1.0f64, 0.0f64, SQRT3_2);
    for p in all {
        let (x, y) = ternary_xy(*p);
        if x.is_finite() && y.is_finite() {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
    }
    let margin = 60.0;
    let px = |p: [f64; 3]| {
        let (x, y) = ternary_xy(p);
        (margin + (x - x0) * SIDE, margin + (y1 - y) * SIDE)
    };
    let width = (x1 - x0) * SIDE + 2.0 * margin + 120.0;
    let height = (y1 - y0) * SIDE + 2.0 * margin;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.3} {height:.3}">"#
    );
    let _ = writeln!(out, r#"<title>{}</title>"#, escape(&scene.title));
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let e = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]].map(px);
    let _ = writeln!(
        out,
        r#"<polygon class="simplex" points="{:.3},{:.3} {:.3},{:.3} {:.3},{:.3}" fill="none" stroke="black"/>"#,
        e[0].0, e[0].1, e[1].0, e[1].1, e[2].0, e[2].1
    );
    let offsets = [(-10.0, 18.0, "end"), (10.0, 18.0, "start"), (0.0, -10.0, "middle")];
    for ((pos, label), (dx, dy, anchor)) in e.iter().zip(&scene.corners).zip(offsets) {
        let _ = writeln!(
            out,
            r#"<text class="corner" x="{:.3}" y="{:.3}" text-anchor="{anchor}" font-size="13">{}</text>"#,
            pos.0 + dx,
            pos.1 + dy,
            escape(label)
        );
    }
    let path: Vec<String> = scene.subset.iter().map(|p| px(*p)).map(|(x, y)| format!("{x:.3},{y:.3}")).collect();
    let _ = writeln!(
        out,
        r#"<polyline class="subset" points="{}" fill="none" stroke="black" stroke-width="1.5"/>"#,
        path.join(" ")
    );
    for (p, a) in scene.points.iter().zip(&scene.approximations) {
        let (p, a) = (px(*p), px(*a));
        let _ = writeln!(
            out,
            r#"<line class="residual" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="gray" stroke-width="0.6"/>"#,
            p.0, p.1, a.0, a.1
        );
    }
    for (i, p) in scene.points.iter().enumerate() {
        let (x, y) = px(*p);
        let _ = writeln!(out, r#"<circle class="data" cx="{x:.3}" cy="{y:.3}" r="3.5" fill="{}"/>"#, groups.color(i));
    }
    for (i, p) in scene.approximations.iter().enumerate() {
        let (x, y) = px(*p);
        let _ = writeln!(
            out,
            r#"<circle class="approx" cx="{x:.3}" cy="{y:.3}" r="2.5" fill="none" stroke="{}"/>"#,
            groups.color(i)
        );
    }
    let (mx, my) = px(scene.mean);
    let _ = writeln!(
        out,
        r#"<rect class="mean" x="{:.3}" y="{:.3}" width="8" height="8" fill="black" transform="rotate(45 {mx:.3} {my:.3})"/>"#,
        mx - 4.0,
        my - 4.0
    );
    legend(&mut out, groups, width - 100.0, margin);
    out.push_str("</svg>\n");
    out
}

/// Pairwise scatter plots of the first score columns; labels go on the
/// diagonal. A single column is plotted against the sample index.
pub fn emit_scatter_matrix(columns: &[(String, Vec<f64>)], groups: &Groups) -> String {
    let panel = 180.0;
    let gap = 20.0;
    let k = columns.len().max(1);
    let size = k as f64 * (panel + gap) + gap;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{size:.0}" viewBox="0 0 {:.3} {size:.3}">"#,
        size + 120.0,
        size + 120.0
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let range = |v: &[f64]| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let pad = 0.05 * (hi - lo).max(1e-12);
        (lo - pad, hi + pad)
    };
    let index: Vec<f64> = (0..groups.of_row.len()).map(|i| i as f64).collect();
    for a in 0..k {
        for b in 0..k {
            let ox = gap + b as f64 * (panel + gap);
            let oy = gap + a as f64 * (panel + gap);
            let _ = writeln!(
                out,
                r#"<rect class="panel" x="{ox:.3}" y="{oy:.3}" width="{panel}" height="{panel}" fill="none" stroke="black"/>"#
            );
            let (xs, ys) = if k == 1 {
                (&index, &columns[0].1)
            } else if a == b {
                let _ = writeln!(
                    out,
                    r#"<text class="label" x="{:.3}" y="{:.3}" text-anchor="middle" font-size="14">{}</text>"#,
                    ox + panel / 2.0,
                    oy + panel / 2.0,
                    escape(&columns[a].0)
                );
                continue;
            } else {
                (&columns[b].1, &columns[a].1)
            };
            let (xl, xh) = range(xs);
            let (yl, yh) = range(ys);
            for (i, (x, y)) in xs.iter().zip(ys.iter()).enumerate() {
                let cx = ox + (x - xl) / (xh - xl) * panel;
                let cy = oy + panel - (y - yl) / (yh - yl) * panel;
                let _ = writeln!(
                    out,
                    r#"<circle class="score" cx="{cx:.3}" cy="{cy:.3}" r="2.5" fill="{}"/>"#,
                    groups.color(i)
                );
            }
        }
    }
    legend(&mut out, groups, size + 10.0, gap + 8.0);
    out.push_str("</svg>\n");
    out
}
