use thiserror::Error;

/// Errors raised by the library. Each message starts with a stable
/// snake_case kind followed by a colon, so callers can parse it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("level_mismatch: {0} vs {1}")]
    LevelMismatch(i64, i64),
    #[error("negative_level: {0}")]
    NegativeLevel(i64),
    #[error("no_dominant_representative: weight ({0},{1},{2})")]
    NoDominantRepresentative(i64, i64, i64),
    #[error("not_dominant: weight ({0},{1},{2})")]
    NotDominant(i64, i64, i64),
    #[error("not_invertible: {0}")]
    NotInvertible(String),
    #[error("domain: {0}")]
    Domain(String),
    #[error("invalid_point: {0}")]
    InvalidPoint(String),
    #[error("inadmissible: {0}")]
    Inadmissible(String),
    #[error("parity_mismatch: {0}")]
    ParityMismatch(String),
    #[error("resonance_obstruction: weight ({0},{1},{2})")]
    ResonanceObstruction(i64, i64, i64),
    #[error("out_of_bounds: {0}")]
    OutOfBounds(String),
    #[error("parse: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
