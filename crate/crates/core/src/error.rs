use thiserror::Error;

use crate::combinat::EdgePair;
use crate::leg_algebra::Block;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("width d={d} is outside the supported range (1..={max})")]
    WidthTooLarge { d: usize, max: usize },

    #[error("enumeration for d={d} exceeded the node budget of {budget}")]
    NodeBudgetExceeded { d: usize, budget: u64 },

    #[error("invalid width d={0}")]
    InvalidWidth(usize),

    #[error("edge ({i},{j}) is not an edge of K_{n}")]
    InvalidEdge { i: usize, j: usize, n: usize },

    #[error("vertices ({x},{y},{z}) do not form an ordered triangle of K_{n}")]
    InvalidTriangle {
        x: usize,
        y: usize,
        z: usize,
        n: usize,
    },

    #[error("malformed partition: {0}")]
    MalformedPartition(String),

    #[error("partition is not homogeneous and cycle-free")]
    NotHomogeneousCycleFree,

    #[error("triangle ({x},{y},{z}) admits {found} involution candidates, expected exactly one")]
    InvolutionNotUnique {
        x: usize,
        y: usize,
        z: usize,
        found: usize,
    },

    #[error("partition is not in the sign table")]
    UnknownPartition,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("column {0} is not a standard basis vector")]
    NotBasisMatrix(EdgePair),

    #[error("matrix is not S2-triangular")]
    NotTriangular,

    #[error("matrix is not S2-upper triangular")]
    NotUpper,

    #[error("no closed value of det^S2(E_d) is known for d={0} (only d <= 10)")]
    FastPathUnavailable(usize),

    #[error("zero pivot: leading principal minor of order {order} vanishes")]
    ZeroPivot { order: usize },

    #[error(
        "zero pivot in leg submatrix {block}: leading principal minor of order {order} vanishes"
    )]
    LegZeroPivot { block: Block, order: usize },

    #[error("zero S2-diagonal entry at center column {0}")]
    ZeroDiagonal(EdgePair),

    #[error("parse error: {0}")]
    Parse(String),
}
