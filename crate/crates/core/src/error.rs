use std::path::PathBuf;

/// Errors raised by the simulator and its file formats.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("bit length n={0} is odd; only even n is supported")]
    OddBitLength(u32),
    #[error("bit length n={n} is outside the supported range 2..={cap}")]
    BitLengthOutOfRange { n: u32, cap: u32 },
    #[error("value {value} is out of range for a {bits}-bit register")]
    ValueOutOfRange { value: usize, bits: u32 },
    #[error("stage index j={j} is out of range for n={n} (expected j < {})", n / 2)]
    StageOutOfRange { j: usize, n: u32 },
    #[error("prefix length {len} is invalid for n={n} (must be even and at most n)")]
    BadPrefixLength { len: u32, n: u32 },
    #[error("table is not a bijection on [0, 2^{n}): {reason}")]
    NotBijective { n: u32, reason: String },
    #[error("affine matrix is singular over GF(2)")]
    SingularMatrix,
    #[error("invalid family parameters: {0}")]
    FamilyParams(String),
    #[error("dimension mismatch: expected (n={expected_n}, k={expected_k}), found (n={found_n}, k={found_k})")]
    DimensionMismatch {
        expected_n: u32,
        expected_k: u32,
        found_n: u32,
        found_k: u32,
    },
    #[error("set error: {0}")]
    InvalidSet(String),
    #[error("vector is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("invalid pseudo-identity parameters: {0}")]
    PseudoIdentityParams(String),
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("config error: {0}")]
    Config(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
