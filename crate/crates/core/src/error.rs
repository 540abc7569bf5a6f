use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("qubit index {index} out of range for {n_qubits} qubit(s)")]
    IndexOutOfRange { index: usize, n_qubits: usize },

    #[error("repeated qubit index {0}")]
    RepeatedIndex(usize),

    #[error("matrix is not hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (smallest eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("matrix is not a projector")]
    NotProjector,

    #[error("matrix is not unitary")]
    NotUnitary,

    #[error("trace is {0}, expected 1")]
    TraceNotOne(f64),

    #[error("vector norm is {0}, expected 1")]
    NotNormalized(f64),

    #[error("non-finite matrix entry")]
    NonFinite,

    #[error("zero vector")]
    ZeroVector,

    #[error("weights sum to {0}, expected 1")]
    WeightSum(f64),

    #[error("negative weight {0}")]
    NegativeWeight(f64),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("basis vectors {0} and {1} are not orthonormal")]
    NotOrthonormal(usize, usize),

    #[error("projectors {0} and {1} are not orthogonal")]
    NotOrthogonal(usize, usize),

    #[error("projectors do not sum to the identity (deviation {0:e})")]
    IncompleteContext(f64),

    #[error("Kraus family is not trace preserving (deviation {0:e})")]
    NotTracePreserving(f64),

    #[error("value {value} outside [0, 1] beyond tolerance")]
    ProbabilityOutOfRange { value: f64 },

    #[error("probability parameter {0} outside [0, 1]")]
    BadProbability(f64),

    #[error("unknown gate `{0}`")]
    UnknownGate(String),

    #[error("gate `{gate}` acts on {expected} qubit(s), got {found} target(s)")]
    Arity {
        gate: String,
        expected: usize,
        found: usize,
    },

    #[error("observable spectrum is not in {{-1, +1}} (eigenvalue {0})")]
    Spectrum(f64),

    #[error("projector family is not informationally complete (rank {rank} of {needed})")]
    RankDeficient { rank: usize, needed: usize },

    #[error("intensities are inconsistent (residual {0:e})")]
    Inconsistent(f64),

    #[error("{n_qubits} qubits exceeds the supported maximum of {max}")]
    TooManyQubits { n_qubits: usize, max: usize },

    #[error("unbound atom `{0}`")]
    UnboundAtom(String),

    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        kind: ParseErrorKind,
        message: String,
    },
}

/// Category of a circuit or formula parse failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    UnknownGate,
    Arity,
    RepeatedTarget,
    IndexOutOfRange,
    MeasureNotLast,
    BadValue,
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self::parse_kind(ParseErrorKind::Syntax, line, column, message)
    }

    pub(crate) fn parse_kind(
        kind: ParseErrorKind,
        line: usize,
        column: usize,
        message: impl Into<String>,
    ) -> Self {
        Error::Parse {
            line,
            column,
            kind,
            message: message.into(),
        }
    }
}
