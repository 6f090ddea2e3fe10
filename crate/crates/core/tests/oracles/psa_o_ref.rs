//! Brute-force PSA-O carried out directly in ambient coordinates: every pair,
//! every ratio on a grid, geodesic projection onto the great subsphere
//! orthogonal to the removed direction.

use std::f64::consts::FRAC_PI_2;

use subsimplex_core::{psa_o, PsaoOptions};

use super::data;
use super::psa_s_ref::{pairs, TIE};

#[derive(Debug, Clone)]
pub struct Step {
    pub pair: (usize, usize),
    pub alpha: f64,
    pub rss: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(a: Vec<f64>) -> Vec<f64> {
    let n = dot(&a, &a).sqrt();
    a.into_iter().map(|v| v / n).collect()
}

fn frame(vi: &[f64], vj: &[f64], alpha: f64) -> (Vec<f64>, Vec<f64>) {
    let w = normalize(vi.iter().zip(vj).map(|(a, b)| alpha * a + (1.0 - alpha) * b).collect());
    let u = normalize(vi.iter().zip(vj).map(|(a, b)| alpha * b - (1.0 - alpha) * a).collect());
    (w, u)
}

/// Signed geodesic score and projected point.
fn project(x: &[f64], vi: &[f64], vj: &[f64], w: &[f64], u: &[f64]) -> (f64, Vec<f64>) {
    let a = dot(x, u);
    if a.abs() >= 1.0 - 1e-12 {
        let (ci, cj) = (dot(x, vi), dot(x, vj));
        let p: Vec<f64> = (0..x.len()).map(|k| x[k] - ci * vi[k] - cj * vj[k] + ci.hypot(cj) * w[k]).collect();
        return (FRAC_PI_2.copysign(a), normalize(p));
    }
    let p = normalize(x.iter().zip(u).map(|(xv, uv)| xv - a * uv).collect());
    let cos = dot(x, &p).clamp(-1.0, 1.0);
    (cos.acos().copysign(a), p)
}

pub fn rss(xs: &[Vec<f64>], vi: &[f64], vj: &[f64], alpha: f64) -> f64 {
    let (w, u) = frame(vi, vj, alpha);
    xs.iter().map(|x| project(x, vi, vj, &w, &u).0.powi(2)).sum()
}

pub fn decompose(rows: &[Vec<f64>], points: usize) -> Vec<Step> {
    let dim = rows[0].len();
    let mut xs: Vec<Vec<f64>> = rows.iter().map(|r| normalize(r.clone())).collect();
    let mut vertices: Vec<Vec<f64>> =
        (0..dim).map(|k| (0..dim).map(|c| if c == k { 1.0 } else { 0.0 }).collect()).collect();
    let mut steps = Vec::new();
    for rank in (1..dim).rev() {
        let mut best: Option<Step> = None;
        for (i, j) in pairs(rank) {
            for k in 0..points {
                let alpha = k as f64 / (points - 1) as f64;
                let value = rss(&xs, &vertices[i], &vertices[j], alpha);
                if best.as_ref().is_none_or(|b| value < b.rss - TIE) {
                    best = Some(Step { pair: (i, j), alpha, rss: value });
                }
            }
        }
        let step = best.unwrap();
        let (i, j) = step.pair;
        let (w, u) = frame(&vertices[i], &vertices[j], step.alpha);
        xs = xs.iter().map(|x| project(x, &vertices[i], &vertices[j], &w, &u).1).collect();
        let mut next = vec![w];
        next.extend((0..=rank).filter(|k| *k != i && *k != j).map(|k| vertices[k].clone()));
        vertices = next;
        steps.push(step);
    }
    steps
}

#[derive(Debug, Default)]
pub struct Report {
    pub datasets: usize,
    pub merges: usize,
    pub max_alpha_gap: f64,
}

/// Random datasets with `d` in {2, 3} and `n` in 5..=30: a fit on the
/// default grid must choose the same pairs as the fine-grid brute force, with
/// ratios within `tol`.
pub fn check(datasets: usize, seed: u64, fine_points: usize, tol: f64) -> Result<Report, String> {
    use rand::Rng;
    let mut rng = data::rng(seed);
    let mut report = Report::default();
    for case in 0..datasets {
        let d = rng.random_range(2..=3);
        let n = rng.random_range(5..=30);
        let zero_prob = if case % 4 == 0 { 0.3 } else { 0.0 };
        let ds = data::random_dataset(&mut rng, n, d + 1, zero_prob);
        let fit = psa_o::fit(&ds, &PsaoOptions::default()).map_err(|e| format!("case {case}: {e}"))?;
        let reference = decompose(&data::to_rows(ds.values()), fine_points);
        for (k, r) in reference.iter().enumerate() {
            let m = &fit.merges()[k];
            if m.merged_pair != r.pair {
                return Err(format!(
                    "case {case} rank {}: fitted pair {:?} (rss {}), brute force {:?} (rss {})",
                    m.rank_from, m.merged_pair, m.rss, r.pair, r.rss
                ));
            }
            let gap = (m.alpha - r.alpha).abs();
            if gap > tol + 1e-12 {
                return Err(format!("case {case} rank {}: alpha {} vs brute force {}", m.rank_from, m.alpha, r.alpha));
            }
            report.max_alpha_gap = report.max_alpha_gap.max(gap);
            report.merges += 1;
        }
        report.datasets += 1;
    }
    Ok(report)
}
