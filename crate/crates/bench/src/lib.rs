//! Benchmark inputs shared by the criterion targets.

use subsimplex_core::synth::{append_noise_parts, example1_clusters, generate_clusters, NoiseSpec, DEFAULT_SD};
use subsimplex_core::Dataset;

/// The four-cluster data set with every cluster scaled by `factor`, and
/// `noise` extra parts appended.
pub fn clusters(factor: usize, noise: usize, seed: u64) -> Dataset {
    let sizes = subsimplex_core::synth::DEFAULT_SIZES.map(|s| s * factor);
    let base = generate_clusters(&example1_clusters(sizes, DEFAULT_SD), seed).expect("valid clusters");
    if noise == 0 {
        base
    } else {
        append_noise_parts(&base, NoiseSpec { columns: noise, sd: DEFAULT_SD }, seed).expect("valid noise")
    }
}
