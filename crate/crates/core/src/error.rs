use thiserror::Error;

/// Reason a mesh file failed to parse. Line numbers are 1-based.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeshParseError {
    #[error("line {line}: malformed header, expected `{expected} <count>`")]
    MalformedHeader { line: usize, expected: &'static str },
    #[error("line {line}: malformed record: {reason}")]
    MalformedRecord { line: usize, reason: String },
    #[error("line {line}: node index out of range ({index} not in 1..={count})")]
    NodeIndexOutOfRange { line: usize, index: usize, count: usize },
    #[error("line {line}: record id {found} out of sequence, expected {expected}")]
    IdOutOfSequence { line: usize, found: usize, expected: usize },
    #[error("line {line}: tetrahedron has repeated vertex {index}")]
    RepeatedVertex { line: usize, index: usize },
    #[error("line {line}: tetrahedron has zero volume")]
    ZeroVolume { line: usize },
    #[error("unexpected end of input: {0}")]
    UnexpectedEof(&'static str),
    #[error("line {line}: trailing content after the last tetrahedron")]
    TrailingContent { line: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeshError {
    #[error(transparent)]
    Parse(#[from] MeshParseError),
    #[error("tet {tet}: node index {index} out of range for {count} nodes")]
    NodeIndexOutOfRange { tet: usize, index: usize, count: usize },
    #[error("tet {tet}: repeated vertex {index}")]
    RepeatedVertex { tet: usize, index: usize },
    #[error("tet {tet}: degenerate (zero or near-zero volume)")]
    Degenerate { tet: usize },
    #[error("invalid generator parameter: {0}")]
    InvalidParameter(String),
    #[error("mesh is not conforming: {0}")]
    NonConforming(String),
    #[error("non-finite node coordinate at node {0}")]
    NonFinite(usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MaterialError {
    #[error("singular {0} tensor")]
    Singular(&'static str),
    #[error("malformed complex number `{0}`")]
    MalformedComplex(String),
    #[error("unknown material preset `{0}`")]
    UnknownPreset(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("problem size {size} exceeds dense limit {limit}; use a coarser mesh or raise solver.dense_limit")]
    DenseLimitExceeded { size: usize, limit: usize },
    #[error("dense eigensolver failed: {0}")]
    Backend(String),
    #[error("null space of the constraint matrix is empty")]
    EmptyNullspace,
    #[error("invalid solver parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Material(#[from] MaterialError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReferenceError {
    #[error("unknown reference experiment `{0}`")]
    UnknownExperiment(String),
}
