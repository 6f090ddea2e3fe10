//! Seeded generators for the two simulated studies: four Gaussian clusters
//! near the edges of the 2-simplex, and the same data padded with three
//! pure-noise parts.
//!
//! Randomness comes from ChaCha8 seeded with `seed_from_u64`. Cluster draws
//! use stream 0 and the appended noise parts use stream 1, so the first three
//! parts of the noisy data set coincide with the cluster data set for the
//! same seed. Draws are taken row by row, part by part.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::dataset::{default_labels, Dataset, MetaColumn};
use crate::error::{Error, Result};
use crate::simplex::Composition;

pub const CLUSTER_STREAM: u64 = 0;
pub const NOISE_STREAM: u64 = 1;

pub const DEFAULT_SD: f64 = 0.04;

/// Default cluster sizes for the four centers.
pub const DEFAULT_SIZES: [usize; 4] = [5, 10, 10, 5];

pub const CENTERS: [[f64; 3]; 4] = [[0.05, 0.05, 0.9], [0.05, 0.9, 0.05], [0.9, 0.05, 0.05], [0.25, 0.7, 0.05]];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSpec {
    pub center: Composition,
    pub count: usize,
    /// Standard deviation of the isotropic Gaussian noise.
    pub sd: f64,
}

impl ClusterSpec {
    pub fn validate(&self) -> Result<()> {
        if self.count < 1 {
            return Err(Error::InvalidParameter("cluster needs at least one point".into()));
        }
        if !(self.sd >= 0.0 && self.sd.is_finite()) {
            return Err(Error::InvalidParameter(format!("invalid sd {}", self.sd)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub columns: usize,
    pub sd: f64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self { columns: 3, sd: DEFAULT_SD }
    }
}

pub fn example1_clusters(sizes: [usize; 4], sd: f64) -> Vec<ClusterSpec> {
    CENTERS
        .iter()
        .zip(sizes)
        .map(|(c, count)| ClusterSpec {
            center: Composition::new(c.to_vec()).expect("centers are compositions"),
            count,
            sd,
        })
        .collect()
}

fn normal(sd: f64) -> Result<Normal<f64>> {
    Normal::new(0.0, sd).map_err(|e| Error::InvalidParameter(e.to_string()))
}

/// Clips at zero and rescales to unit sum. A row clipped to all zeros is
/// redrawn.
fn clip_and_close(mut draw: impl FnMut() -> Vec<f64>) -> Vec<f64> {
    loop {
        let row: Vec<f64> = draw().into_iter().map(|v| v.max(0.0)).collect();
        let s: f64 = row.iter().sum();
        if s > 0.0 {
            return row.into_iter().map(|v| v / s).collect();
        }
    }
}

/// Points around each center, clipped at zero and renormalized, labelled
/// with a 1-based `cluster` metadata column.
pub fn generate_clusters(clusters: &[ClusterSpec], seed: u64) -> Result<Dataset> {
    let first = clusters.first().ok_or(Error::EmptyDataset)?;
    let dim = first.center.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(CLUSTER_STREAM);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (k, cluster) in clusters.iter().enumerate() {
        cluster.validate()?;
        if cluster.center.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: cluster.center.len() });
        }
        let noise = normal(cluster.sd)?;
        for _ in 0..cluster.count {
            rows.push(clip_and_close(|| {
                cluster.center.as_slice().iter().map(|c| c + noise.sample(&mut rng)).collect()
            }));
            labels.push((k + 1).to_string());
        }
    }
    Dataset::from_rows(&rows)?.with_metadata(MetaColumn { name: "cluster".into(), values: labels })
}

/// Appends `noise.columns` parts drawn from `N(0, sd^2)` to every row, clips
/// and renormalizes. Existing metadata is kept.
pub fn append_noise_parts(base: &Dataset, noise: NoiseSpec, seed: u64) -> Result<Dataset> {
    let dist = normal(noise.sd)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(NOISE_STREAM);
    let rows: Vec<Vec<f64>> = (0..base.n_samples())
        .map(|i| {
            let head = base.row(i);
            let tail: Vec<f64> = (0..noise.columns).map(|_| dist.sample(&mut rng)).collect();
            clip_and_close(|| head.iter().copied().chain(tail.iter().copied()).collect())
        })
        .collect();
    let mut labels = base.column_labels().to_vec();
    labels.extend(default_labels(base.n_parts() + noise.columns).into_iter().skip(base.n_parts()));
    let values = nalgebra::DMatrix::from_fn(rows.len(), labels.len(), |i, j| rows[i][j]);
    let mut out = Dataset::new(values, labels)?;
    for m in base.row_metadata() {
        out = out.with_metadata(m.clone())?;
    }
    Ok(out)
}

pub fn generate_example1(seed: u64) -> Result<Dataset> {
    generate_clusters(&example1_clusters(DEFAULT_SIZES, DEFAULT_SD), seed)
}

pub fn generate_example2(seed: u64) -> Result<Dataset> {
    append_noise_parts(&generate_example1(seed)?, NoiseSpec::default(), seed)
}
