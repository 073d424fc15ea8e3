use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("degenerate constraint row {row}: zero normal vector")]
    DegenerateRow { row: usize },

    #[error("the set {{x : Ax <= b}} is empty")]
    EmptySet,

    #[error("a V-polytope needs at least one vertex")]
    NoVertices,

    #[error("ball radius must be positive, got {0}")]
    NonPositiveRadius(f64),

    #[error("the origin is not in the interior of the dynamics set: {0}")]
    OriginNotInterior(String),

    #[error("operation needs dimension <= {max}, set has dimension {dim}")]
    UnsupportedDimension { dim: usize, max: usize },

    #[error("unsupported scale: {0}")]
    UnsupportedScale(String),

    #[error("unsupported combination: {0}")]
    UnsupportedCombination(String),

    #[error("target set must be bounded for this operation")]
    UnboundedTarget,

    #[error("dynamics set must be bounded for this operation")]
    UnboundedDynamics,

    #[error("dynamics set must be symmetric for this operation")]
    NonSymmetricDynamics,

    #[error("generalized projection is empty: the infimum is not attained")]
    ProjectionEmpty,

    #[error("point lies on the boundary; the operation is defined off the boundary only")]
    BoundaryPoint,

    #[error("normal cone is trivial; the sphere slice is empty")]
    ZeroCone,

    #[error("polyhedron is not pointed: no vertex representation exists")]
    NotPointed,

    #[error("LP did not converge within the iteration cap")]
    LpDidNotConverge,

    #[error("bracket growth cap exceeded while searching for an enclosing scale")]
    BracketCap,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("internal numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
