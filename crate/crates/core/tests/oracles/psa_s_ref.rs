//! Brute-force PSA-S: every pair, ratio on a dense grid, residual measured as
//! the squared distance between barycentric coordinates before and after the
//! pooling projection.

use subsimplex_core::psa_s;

use super::data;

pub const TIE: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct Step {
    pub pair: (usize, usize),
    pub alpha: f64,
    pub rss: f64,
    /// Barycentric coordinates the step was searched on.
    pub coeffs: Vec<Vec<f64>>,
}

pub fn pairs(rank: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..=rank {
        for j in i + 1..=rank {
            out.push((i, j));
        }
    }
    out
}

/// The projected point keeps the pooled mass `p = x_i + x_j` on the new
/// vertex, i.e. `alpha p` on `v_i` and `(1 - alpha) p` on `v_j`.
pub fn rss(coeffs: &[Vec<f64>], i: usize, j: usize, alpha: f64) -> f64 {
    coeffs
        .iter()
        .map(|c| {
            let p = c[i] + c[j];
            let di = c[i] - alpha * p;
            let dj = c[j] - (1.0 - alpha) * p;
            di * di + dj * dj
        })
        .sum()
}

/// Grid argmin over `points` ratios in `[0, 1]`, smallest ratio on ties.
pub fn grid_argmin(coeffs: &[Vec<f64>], i: usize, j: usize, points: usize) -> (f64, f64) {
    let steps = (points - 1) as f64;
    let mut best = (0.0, rss(coeffs, i, j, 0.0));
    for k in 1..points {
        let a = k as f64 / steps;
        let v = rss(coeffs, i, j, a);
        if v < best.1 - TIE {
            best = (a, v);
        }
    }
    best
}

pub fn decompose(rows: &[Vec<f64>], points: usize) -> Vec<Step> {
    let mut coeffs = rows.to_vec();
    let d = rows[0].len() - 1;
    let mut steps = Vec::new();
    for rank in (1..=d).rev() {
        let mut best: Option<Step> = None;
        for (i, j) in pairs(rank) {
            let (alpha, value) = grid_argmin(&coeffs, i, j, points);
            if best.as_ref().is_none_or(|b| value < b.rss - TIE) {
                best = Some(Step { pair: (i, j), alpha, rss: value, coeffs: coeffs.clone() });
            }
        }
        let step = best.unwrap();
        let (i, j) = step.pair;
        coeffs = coeffs
            .iter()
            .map(|c| {
                let mut next = vec![c[i] + c[j]];
                next.extend((0..=rank).filter(|k| *k != i && *k != j).map(|k| c[k]));
                next
            })
            .collect();
        steps.push(step);
    }
    steps
}

#[derive(Debug, Default)]
pub struct Report {
    pub datasets: usize,
    pub pair_alphas: usize,
    pub merges: usize,
    pub max_alpha_gap: f64,
}

/// Random datasets with `d` in {2, 3, 4} and `n` in 5..=30. For every rank
/// and every pair, the closed-form ratio must sit within one grid step of the
/// dense-grid argmin, and the fitted merge sequence must equal the
/// exhaustive one.
pub fn check(datasets: usize, seed: u64, points: usize) -> Result<Report, String> {
    use rand::Rng;
    let mut rng = data::rng(seed);
    let step = 1.0 / (points - 1) as f64;
    let mut report = Report::default();
    for case in 0..datasets {
        let d = rng.random_range(2..=4);
        let n = rng.random_range(5..=30);
        let zero_prob = if case % 4 == 0 { 0.3 } else { 0.0 };
        let ds = data::random_dataset(&mut rng, n, d + 1, zero_prob);
        let rows = data::to_rows(ds.values());
        let fit = psa_s::fit(&ds).map_err(|e| format!("case {case}: {e}"))?;
        let reference = decompose(&rows, points);
        for (k, refstep) in reference.iter().enumerate() {
            let m = &fit.merges()[k];
            if m.merged_pair != refstep.pair {
                return Err(format!(
                    "case {case} rank {}: fitted pair {:?}, exhaustive {:?}",
                    m.rank_from, m.merged_pair, refstep.pair
                ));
            }
            let gap = (m.alpha - refstep.alpha).abs();
            if gap > step + 1e-12 {
                return Err(format!("case {case} rank {}: alpha {} vs grid {}", m.rank_from, m.alpha, refstep.alpha));
            }
            report.max_alpha_gap = report.max_alpha_gap.max(gap);
            report.merges += 1;

            let cm = nalgebra::DMatrix::from_fn(n, refstep.coeffs[0].len(), |r, c| refstep.coeffs[r][c]);
            for (i, j) in pairs(refstep.coeffs[0].len() - 1) {
                let Ok(alpha) = psa_s::optimal_alpha(&cm, i, j) else { continue };
                let (grid_alpha, _) = grid_argmin(&refstep.coeffs, i, j, points);
                let gap = (alpha - grid_alpha).abs();
                if gap > step + 1e-12 {
                    return Err(format!("case {case} pair ({i},{j}): closed form {alpha} vs grid {grid_alpha}"));
                }
                report.max_alpha_gap = report.max_alpha_gap.max(gap);
                report.pair_alphas += 1;
            }
        }
        report.datasets += 1;
    }
    Ok(report)
}
