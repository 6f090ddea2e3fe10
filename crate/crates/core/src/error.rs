use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dataset has no rows")]
    EmptyDataset,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid composition: {0}")]
    InvalidComposition(String),

    #[error("negative entry {value} at row {row}, column {column}")]
    NegativeEntry { row: usize, column: usize, value: f64 },

    #[error("row {row} sums to {sum}, outside tolerance of unit sum")]
    RowSumOutOfTolerance { row: usize, sum: f64 },

    #[error("vertices are not affinely independent")]
    AffinelyDependent,

    #[error("vertices are not orthonormal and nonnegative")]
    NotOrthonormal,

    #[error("point does not lie in the simplex spanned by the basis (residual {residual:e})")]
    NotInSimplex { residual: f64 },

    #[error("basis already has a single vertex")]
    RankZero,

    #[error("invalid vertex pair ({i}, {j}) for rank {rank}")]
    InvalidPair { i: usize, j: usize, rank: usize },

    #[error("merge ratio {0} outside [0, 1]")]
    InvalidAlpha(f64),

    #[error("no sample has mass on vertex pair ({i}, {j})")]
    DegeneratePair { i: usize, j: usize },

    #[error("merged vertex has zero norm")]
    DegenerateRatio,

    #[error("point is parallel to the removed direction; projection undefined")]
    PoleSingularity,

    #[error("rank {rank} is outside 1..={max}")]
    InvalidRank { rank: usize, max: usize },

    #[error("mode of variation leaves the simplex (min entry {min_entry:e})")]
    OutOfSimplex { min_entry: f64 },

    #[error("great-circle point leaves the nonnegative orthant (min entry {min_entry:e})")]
    OutOfOrthant { min_entry: f64 },

    #[error("log-ratio transform requires strictly positive entries (row {row}, column {column})")]
    NonPositiveEntry { row: usize, column: usize },

    #[error("matrix has no nonzero entry")]
    AllZeroMatrix,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// Validation errors concern the shape or content of the input;
    /// everything else is a numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::EmptyDataset
                | Error::DimensionMismatch { .. }
                | Error::InvalidComposition(_)
                | Error::NegativeEntry { .. }
                | Error::RowSumOutOfTolerance { .. }
                | Error::InvalidPair { .. }
                | Error::InvalidAlpha(_)
                | Error::InvalidRank { .. }
                | Error::InvalidParameter(_)
                | Error::NonPositiveEntry { .. }
                | Error::AllZeroMatrix
        )
    }
}
