use thiserror::Error;

use crate::seqexpr::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("invalid piece condition `{0}`")]
    InvalidCondition(String),

    #[error("`otherwise` must be the final piece of `{0}`")]
    OtherwiseNotLast(String),

    #[error("no piece of `{sequence}` matches n = {n}")]
    NoMatchingPiece { sequence: String, n: i64 },

    #[error("`{sequence}` evaluates to a non-finite value at n = {n}")]
    NonFiniteValue { sequence: String, n: i64 },

    #[error("a_{0} = 0")]
    ZeroA(i64),

    #[error("estimated radii collapse: r = {r} >= R = {big_r}")]
    RadiiCollapse { r: f64, big_r: f64 },

    #[error("window [{min}, {max}] must satisfy min < 0 < max")]
    InvalidWindow { min: i64, max: i64 },

    #[error("invalid norm exponent p = {0}; expected p >= 1 or \"c0\"")]
    InvalidExponent(f64),

    #[error("expected a {expected} vector, got a {found} vector")]
    WrongBasis {
        expected: &'static str,
        found: &'static str,
    },

    #[error("vector of length {len} does not fit the window of size {size}")]
    LengthMismatch { len: usize, size: usize },

    #[error("expansion of z^{nu} does not decay before the window edge")]
    WindowExhausted { nu: i64 },

    #[error("norm series for z^{nu} diverges")]
    DivergentSeries { nu: i64 },

    #[error("|z| = {modulus} lies outside the annulus ({r}, {big_r})")]
    OutsideAnnulus { modulus: f64, r: f64, big_r: f64 },

    #[error("weight alpha_{0} vanishes")]
    ZeroWeight(i64),

    #[error("window needs at least {needed} indices below zero, has {have}")]
    WindowTooSmall { needed: i64, have: i64 },

    #[error("power must be at least 1, got {0}")]
    InvalidPower(i64),

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    /// Errors caused by the user's input rather than by the numerics.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Parse(_)
                | Error::InvalidCondition(_)
                | Error::OtherwiseNotLast(_)
                | Error::NoMatchingPiece { .. }
                | Error::NonFiniteValue { .. }
                | Error::ZeroA(_)
                | Error::RadiiCollapse { .. }
                | Error::InvalidWindow { .. }
                | Error::InvalidExponent(_)
                | Error::LengthMismatch { .. }
                | Error::WindowTooSmall { .. }
                | Error::InvalidPower(_)
                | Error::Config(_)
        )
    }
}
