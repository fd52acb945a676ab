use alloc::string::String;
use thiserror::Error;

/// Errors raised when constructing or validating matrices.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("vertex count must be positive")]
    Empty,
    #[error("matrix data holds {actual} entries, expected {expected}")]
    ShapeMismatch { expected: usize, actual: usize },
    #[error("distance at ({row}, {col}) is NaN")]
    NaN { row: usize, col: usize },
    #[error("predecessor at ({row}, {col}) is {value}, out of range or equal to an endpoint")]
    BadPredecessor { row: usize, col: usize, value: u32 },
    #[error("invalid generator parameters: {0}")]
    InvalidSpec(&'static str),
    #[error("vertex count {0} exceeds the supported maximum")]
    TooLarge(usize),
}

/// Errors raised while decoding matrix files.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("bad magic bytes, expected \"APSP\"")]
    BadMagic,
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u16),
    #[error("unknown element type code {0}")]
    UnknownDType(u8),
    #[error("reserved header byte is {0}, expected 0")]
    BadReserved(u8),
    #[error("header truncated: {0} bytes")]
    TruncatedHeader(usize),
    #[error("payload holds {actual} bytes, expected {expected}")]
    SizeMismatch { expected: u64, actual: u64 },
    #[error("element type mismatch: file holds {found}, expected {expected}")]
    DTypeMismatch {
        expected: &'static str,
        found: &'static str,
    },
    #[error("NaN payload at ({row}, {col})")]
    NaNPayload { row: usize, col: usize },
    #[error("invalid predecessor payload at ({row}, {col})")]
    BadPredecessor { row: usize, col: usize },
    #[error("CSV line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error("CSV export is limited to n <= {max}, got {n}")]
    CsvTooLarge { n: usize, max: usize },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Errors in a blocked-solve configuration.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanError {
    #[error("tile size {tb} does not divide n = {n}; pad the matrix with pad_to_multiple first")]
    TileDoesNotDivide { n: usize, tb: usize },
    #[error("tile size must be positive")]
    ZeroTile,
    #[error("worker count must be positive")]
    ZeroThreads,
    #[error("no candidate tile sizes given")]
    NoCandidates,
}

/// Errors raised by the independent oracles.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("negative edge weight at ({row}, {col}) is outside Dijkstra's domain")]
    NegativeWeight { row: usize, col: usize },
    #[error("shape mismatch: input n = {input}, solution n = {solution}")]
    ShapeMismatch { input: usize, solution: usize },
}

/// Failures while expanding a path from a predecessor matrix.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("vertex {vertex} repeats while expanding ({from}, {to})")]
    Cycle { from: usize, to: usize, vertex: usize },
    #[error("expansion of ({from}, {to}) exceeded {limit} vertices")]
    TooDeep { from: usize, to: usize, limit: usize },
    #[error("predecessor of ({row}, {col}) is {value}, not a valid intermediate")]
    BadIntermediate { row: usize, col: usize, value: u32 },
    #[error("segment ({row}, {col}) has no predecessor but no direct input edge either")]
    MissingEdge { row: usize, col: usize },
    #[error("vertex index out of range: ({row}, {col}) with n = {n}")]
    OutOfRange { row: usize, col: usize, n: usize },
}
