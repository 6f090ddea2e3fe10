//! Principal subsimplex analysis (PSA) of compositional data.
//!
//! Two backwards decompositions into nested subsimplices are provided:
//! [`psa_s`] works directly on the simplex with mass-preserving projections,
//! [`psa_o`] works on the unit nonnegative orthant with geodesic projections.
//! [`benchmarks`] holds the PCA family they are usually compared with and
//! [`synth`] the simulated data sets.

pub mod benchmarks;
pub mod dataset;
pub mod error;
pub mod psa_o;
pub mod psa_s;
pub mod simplex;
pub mod synth;

pub use dataset::{Dataset, MetaColumn};
pub use error::{Error, Result};
pub use psa_o::{OrthantMergeRecord, PsaoDecomposition, PsaoOptions};
pub use psa_s::{MergeRecord, PsaDecomposition};
pub use simplex::{
    barycentric_coordinates, geodesic_distance, orthant_to_simplex, simplex_to_orthant, Composition, OrthantVertexSet,
    SimplexVertexSet, SphericalPoint,
};
