//! Baseline methods: Euclidean PCA, power-transform PCA and log-ratio PCA.

pub mod pca;
pub mod transforms;

pub use pca::{pca, sorted_eigen, PcaResult};
pub use transforms::{
    alr, alr_inverse, clr, clr_inverse, helmert_submatrix, ilr, ilr_inverse, power_transform, zero_replace,
    TransformKind, TransformSpec, ZeroReplacement,
};
