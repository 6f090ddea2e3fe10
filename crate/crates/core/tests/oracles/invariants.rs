//! Structural properties of both decompositions on randomized inputs.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use subsimplex_core::psa_o::{self, project_to_suborthant};
use subsimplex_core::psa_s;
use subsimplex_core::{
    geodesic_distance, orthant_to_simplex, simplex_to_orthant, Composition, PsaoOptions, SphericalPoint,
};

use super::data;

fn fail(case: usize, what: impl std::fmt::Display) -> String {
    format!("case {case}: {what}")
}

fn row(m: &DMatrix<f64>, r: usize) -> Vec<f64> {
    m.row(r).iter().copied().collect()
}

/// Unconstrained least-squares coefficients of `x` in the affine hull of
/// `basis` (columns), with the unit-sum constraint eliminated.
fn affine_coefficients(basis: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
    let r = basis.ncols() - 1;
    if r == 0 {
        return vec![1.0];
    }
    let last = basis.column(r);
    let a = DMatrix::from_fn(basis.nrows(), r, |i, k| basis[(i, k)] - last[i]);
    let b = DVector::from_iterator(x.len(), x.iter().zip(last.iter()).map(|(v, l)| v - l));
    let sol = a.svd(true, true).solve(&b, 1e-14).expect("svd solve");
    let mut out: Vec<f64> = sol.iter().copied().collect();
    out.push(1.0 - out.iter().sum::<f64>());
    out
}

#[derive(Debug, Default)]
pub struct Report {
    pub cases: usize,
    pub heavy_zero_cases: usize,
    pub checks: usize,
    pub pole_samples: usize,
}

/// Runs every property on one random dataset.
pub fn check_case(rng: &mut impl Rng, case: usize, report: &mut Report) -> Result<(), String> {
    let d = rng.random_range(1..=5);
    let n = rng.random_range(1..=30);
    let heavy = case.is_multiple_of(3);
    let zero_prob = if heavy {
        0.5
    } else if case % 3 == 1 {
        0.15
    } else {
        0.0
    };
    let ds = data::random_dataset(rng, n, d + 1, zero_prob);
    if heavy && ds.zero_fraction() >= 0.4 {
        report.heavy_zero_cases += 1;
    }
    let mut checks = 0usize;

    // Simplex/orthant round trip.
    for i in 0..n {
        let x = ds.composition(i);
        let back = orthant_to_simplex(&simplex_to_orthant(&x));
        for (a, b) in back.as_slice().iter().zip(x.as_slice()) {
            if (a - b).abs() > 1e-9 {
                return Err(fail(case, format!("round trip of row {i} moved {a} -> {b}")));
            }
        }
        checks += 1;
    }

    // PSA-S.
    let s = psa_s::fit(&ds).map_err(|e| fail(case, e))?;
    for rank in 0..=d {
        let approx = s.approximation(rank);
        for i in 0..n {
            Composition::new(row(approx, i)).map_err(|e| fail(case, format!("PSA-S rank {rank} row {i}: {e}")))?;
        }
        checks += 1;
    }
    for rank in 1..=d {
        let m = s.merge(rank);
        let (i, j) = m.merged_pair;
        // Nestedness.
        let upper = s.vertex_set(rank).to_matrix();
        for v in s.vertex_set(rank - 1).vertices() {
            let c = affine_coefficients(&upper, v.as_slice());
            let min = c.iter().copied().fold(f64::INFINITY, f64::min);
            if min < -1e-12 {
                return Err(fail(case, format!("rank {} vertex outside rank {rank}: {c:?}", rank - 1)));
            }
        }
        // Mass preservation.
        let hi = s.coefficients(rank);
        let lo = s.coefficients(rank - 1);
        for r in 0..n {
            let pooled = hi[(r, i)] + hi[(r, j)];
            if (lo[(r, 0)] - pooled).abs() > 1e-12 {
                return Err(fail(case, format!("pooled mass {} vs {pooled}", lo[(r, 0)])));
            }
            let rest: Vec<f64> = (0..=rank).filter(|k| *k != i && *k != j).map(|k| hi[(r, k)]).collect();
            for (k, v) in rest.iter().enumerate() {
                if lo[(r, k + 1)].to_bits() != v.to_bits() {
                    return Err(fail(case, "unmerged coefficient changed"));
                }
            }
        }
        // Displacement identity.
        let scores = s.score_column(rank);
        let l = s.loading(rank);
        for r in 0..n {
            for c in 0..=d {
                let lhs = s.approximation(rank)[(r, c)] - s.approximation(rank - 1)[(r, c)];
                let rhs = scores[r] / std::f64::consts::SQRT_2 * l[c];
                if (lhs - rhs).abs() > 1e-12 {
                    return Err(fail(case, format!("displacement {lhs} vs {rhs} at rank {rank}")));
                }
            }
        }
        // Loadings: zero sum, +1/-1 parts for disjoint supports.
        if l.iter().sum::<f64>().abs() > 1e-12 {
            return Err(fail(case, "loading does not sum to zero"));
        }
        let pos: f64 = l.iter().filter(|v| **v > 0.0).sum();
        let neg: f64 = l.iter().filter(|v| **v < 0.0).sum();
        if (pos - 1.0).abs() > 1e-12 || (neg + 1.0).abs() > 1e-12 {
            return Err(fail(case, format!("loading parts {pos} / {neg}")));
        }
        // Optimality across pairs.
        for (a, b) in psa_s::vertex_pairs(rank) {
            let (_, other) = psa_s::pair_fit(hi, a, b);
            if m.rss > other + 1e-12 {
                return Err(fail(case, format!("pair ({a},{b}) rss {other} beats chosen {}", m.rss)));
            }
        }
        checks += 5;
    }

    // PSA-O.
    let o = psa_o::fit(&ds, &PsaoOptions::default()).map_err(|e| fail(case, e))?;
    report.pole_samples += o.poles().len();
    for rank in 0..=d {
        let v = o.orthant_vertex_set(rank).to_matrix();
        let gram = v.transpose() * &v;
        let err = (gram - DMatrix::<f64>::identity(rank + 1, rank + 1)).abs().max();
        if err > 1e-12 {
            return Err(fail(case, format!("rank {rank} basis off orthonormal by {err}")));
        }
        if v.min() < -1e-12 {
            return Err(fail(case, "negative orthant vertex entry"));
        }
        for i in 0..n {
            Composition::new(row(o.simplex_approximation(rank), i))
                .map_err(|e| fail(case, format!("PSA-O rank {rank} row {i}: {e}")))?;
        }
        checks += 2;
    }
    for rank in 1..=d {
        let scores = o.score_column(rank);
        let u = &o.merge(rank).removed_direction;
        for i in 0..n {
            if o.poles().iter().any(|p| p.rank_from == rank && p.sample == i) {
                continue;
            }
            let hi = SphericalPoint::new(row(o.spherical_approximation(rank), i)).map_err(|e| fail(case, e))?;
            let lo = SphericalPoint::new(row(o.spherical_approximation(rank - 1), i)).map_err(|e| fail(case, e))?;
            let dist = geodesic_distance(&hi, &lo);
            if (scores[i].abs() - dist).abs() > 1e-12 {
                return Err(fail(case, format!("|score| {} vs distance {dist}", scores[i].abs())));
            }
            // Idempotence of the projection.
            let (p, _) = project_to_suborthant(hi.as_slice(), u).map_err(|e| fail(case, e))?;
            let (p2, s2) = project_to_suborthant(&p, u).map_err(|e| fail(case, e))?;
            let moved = p.iter().zip(&p2).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            if moved > 1e-12 || s2.abs() > 1e-12 {
                return Err(fail(case, format!("projection not idempotent: moved {moved}, score {s2}")));
            }
            checks += 2;
        }
    }

    // Scale invariance of the orthant map.
    let scale = rng.random_range(0.01..100.0);
    let scaled = psa_o::fit_rows(&(ds.values() * scale), &PsaoOptions::default()).map_err(|e| fail(case, e))?;
    for rank in 1..=d {
        let (a, b) = (o.merge(rank), scaled.merge(rank));
        if a.merged_pair != b.merged_pair || a.alpha != b.alpha {
            return Err(fail(case, "rescaling the rows changed the merges"));
        }
        let gap = (o.scores() - scaled.scores()).abs().max();
        if gap > 1e-12 {
            return Err(fail(case, format!("rescaling moved scores by {gap}")));
        }
    }
    checks += 1;

    report.checks += checks;
    report.cases += 1;
    Ok(())
}

pub fn check(cases: usize, seed: u64) -> Result<Report, String> {
    let mut rng = data::rng(seed);
    let mut report = Report::default();
    for case in 0..cases {
        check_case(&mut rng, case, &mut report)?;
    }
    Ok(report)
}
