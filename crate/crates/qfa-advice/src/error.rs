use thiserror::Error;

/// Errors raised by machine construction, validation, and simulation.
#[derive(Debug, Error)]
pub enum QfaError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix for symbol {symbol:?} is not unitary (max defect {defect:.3e})")]
    NonUnitary { symbol: String, defect: f64 },
    #[error("unknown symbol {0:?}")]
    UnknownSymbol(String),
    #[error("track length mismatch: upper {upper}, lower {lower}")]
    TrackLengthMismatch { upper: usize, lower: usize },
    #[error("advice undefined at length {0}")]
    AdviceUndefined(usize),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid amplitudes: {0}")]
    InvalidAmplitudes(String),
    #[error("invalid machine: {0}")]
    InvalidMachine(String),
    #[error("length cap exceeded: input length {len} > cap {cap}")]
    CapExceeded { len: usize, cap: usize },
    #[error("epsilon out of range: {0}")]
    EpsilonOutOfRange(f64),
    #[error("argument out of range: {0}")]
    ArgumentOutOfRange(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("horizon too large: {0}")]
    HorizonTooLarge(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, QfaError>;
