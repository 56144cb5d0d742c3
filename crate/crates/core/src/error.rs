use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty vector or matrix")]
    Empty,

    #[error("matrix data has {len} entries, not a square of side {dim}")]
    NotSquare { dim: usize, len: usize },

    #[error("non-finite entry at index {0}")]
    NonFinite(usize),

    #[error("vector is not normalized: norm {norm}")]
    NotUnit { norm: f64 },

    #[error("matrix is not Hermitian: ||A - A^H|| = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("vectors are not orthonormal: worst deviation {deviation:e}")]
    NotOrthonormal { deviation: f64 },

    #[error("invalid tolerance {0}")]
    InvalidTolerance(f64),

    #[error("invalid spin quantum number: {0}")]
    InvalidSpin(String),

    #[error("direction is not a unit vector: |a| = {norm}")]
    InvalidDirection { norm: f64 },

    #[error("magnetic quantum number {value} is out of range for j = {j}")]
    QuantumNumberOutOfRange { j: String, value: String },

    #[error("no eigenvalue of the operator matches {target} (closest {closest})")]
    NoMatchingEigenvalue { target: f64, closest: f64 },

    #[error("eigenvalue match for {0} is ambiguous")]
    AmbiguousEigenvalue(f64),

    #[error("recursion closing residual {residual:e} exceeds tolerance for a = {direction:?}, h = {h}")]
    RecursionFailed { direction: [f64; 3], h: String, residual: f64 },

    #[error("matrix is not special unitary: {0}")]
    NotSpecialUnitary(String),
    #[error("not a proper rotation: {0}")]
    NotRotation(String),

    #[error("invalid e-variable: {0}")]
    InvalidEVariable(String),

    #[error("coarse-graining map is undefined at value {0}")]
    MapUndefined(f64),

    #[error("coarse values {0} and {1} are distinct but closer than the separation tolerance")]
    IllPosedCoarseValues(f64, f64),

    #[error("class index {index} out of range ({count} classes)")]
    ClassIndexOutOfRange { index: usize, count: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("group closure exceeded {0} elements")]
    GroupTooLarge(usize),

    #[error("element is not in the group")]
    NotInGroup,

    #[error("Hilbert space has dimension {0}; at least 2 is required")]
    HilbertDimensionTooSmall(usize),

    #[error("invalid group word: {0}")]
    InvalidWord(String),

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    #[error("serialization: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;
