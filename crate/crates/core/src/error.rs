use thiserror::Error;

/// Everything that can go wrong across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty window")]
    EmptyWindow,
    #[error("site {index} holds {value}, expected 0 or 1")]
    NonBinarySite { index: i64, value: u8 },
    #[error("path increment at index {index} is {step}, expected +1 or -1")]
    NonUnitIncrement { index: i64, step: i64 },
    #[error("path window [{start}, {end}] does not contain the origin or S_0 != 0")]
    PathNotAnchored { start: i64, end: i64 },
    #[error("{particles} particles on {n} sites is density exactly 1/2; the dynamics are not defined")]
    DensityAtHalf { n: usize, particles: usize },
    #[error("{particles} particles on {n} sites exceeds density 1/2; the dynamics are not defined")]
    DensityAboveHalf { n: usize, particles: usize },
    #[error("operation needs a {expected} configuration, got {found}")]
    WrongBoundary { expected: &'static str, found: &'static str },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("N = {n} exceeds the enumeration cutoff {cutoff}")]
    EnumerationCutoff { n: usize, cutoff: usize },
    #[error("expected probability of cell {cell} is zero but the cell was observed")]
    ZeroExpectedCell { cell: usize },
    #[error("distributions live on different supports")]
    MismatchedSupport,
    #[error("path has drift {drift} over one period; the past maximum is unbounded")]
    NonPositiveDrift { drift: f64 },
    #[error("time {t} lies outside the path window [{first}, {last}]")]
    OutsideWindow { t: f64, first: f64, last: f64 },
    #[error("no local maximum at or after 0 inside the window")]
    NoLocalMaximum,
    #[error("malformed path: {0}")]
    MalformedPath(String),
    #[error("rejection acceptance rate {rate:.3e} fell below the floor {floor:.3e}")]
    AcceptanceFloor { rate: f64, floor: f64 },
    #[error("buffer could not be certified below {tolerance:.1e} (bound {bound:.3e})")]
    Uncertified { tolerance: f64, bound: f64 },
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
