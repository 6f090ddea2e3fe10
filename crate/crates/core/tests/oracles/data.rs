use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use subsimplex_core::Dataset;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Flat-Dirichlet rows with each entry independently zeroed with probability
/// `zero_prob`. Every row keeps at least one positive entry.
pub fn random_rows(rng: &mut impl Rng, n: usize, parts: usize, zero_prob: f64) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| loop {
            let raw: Vec<f64> = (0..parts)
                .map(|_| {
                    let g: f64 = Exp1.sample(rng);
                    if rng.random::<f64>() < zero_prob {
                        0.0
                    } else {
                        g
                    }
                })
                .collect();
            let s: f64 = raw.iter().sum();
            if s > 0.0 {
                break raw.into_iter().map(|v| v / s).collect();
            }
        })
        .collect()
}

pub fn random_dataset(rng: &mut impl Rng, n: usize, parts: usize, zero_prob: f64) -> Dataset {
    Dataset::from_rows(&random_rows(rng, n, parts, zero_prob)).expect("rows are compositions")
}

pub fn to_rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}
