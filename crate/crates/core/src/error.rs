use thiserror::Error;

/// Errors raised by lattice construction, field algebra and the integrators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("odd order {0}: -I is not a group element")]
    OddOrderNoMinusI(usize),
    #[error("unknown symmetry descriptor `{0}`")]
    UnknownSpec(String),
    #[error("no integer expression with |coefficient| <= {bound} for orbit vector {vector:?}; raise the relation bound")]
    RelationSearchExhausted { bound: i64, vector: Vec<f64> },
    #[error("vector {0:?} has no bounded integer coordinates in this module")]
    NotRepresentable(Vec<f64>),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("active mode set is empty beyond the zero mode")]
    EmptyActiveSet,
    #[error("mode {0:?} is not in the active set")]
    InactiveMode(Vec<i64>),
    #[error("fields live on different active sets")]
    MismatchedActiveSets,
    #[error("imaginary residue {0:e} exceeds tolerance; field is not Hermitian")]
    ImaginaryResidue(f64),
    #[error("operation only supported for d = 2 (got d = {0})")]
    DimensionUnsupported(usize),
    #[error("ball radius {radius} exceeds truncation cap {k_max}")]
    BallExceedsTruncation { radius: f64, k_max: f64 },
    #[error("direct convolution needs {0} triples per mode, above the guard")]
    TooLarge(usize),
    #[error("non-finite coefficient at t = {0}")]
    NonFiniteState(f64),
    #[error("no interior minimum of the dispersion determinant")]
    NoBracket,
    #[error("trajectory never enters the absorbing ball (last sample t = {0})")]
    NeverEnters(f64),
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: bad value for `{key}`: {message}")]
    BadValue { line: usize, key: String, message: String },
    #[error("missing required key `{0}`")]
    MissingKey(String),
    #[error("snapshot format version {found}, expected {expected}")]
    FormatVersionMismatch { found: String, expected: u32 },
    #[error("corrupt snapshot: {0}")]
    CorruptPayload(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
