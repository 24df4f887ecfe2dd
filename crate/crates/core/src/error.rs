use alloc::string::String;

/// Errors raised by constructors and evaluators in this crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("cannot normalize the zero vector")]
    ZeroVector,

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// A parameter lies outside the domain where the quantity is defined.
    #[error("{param} = {value} is outside the domain {expected}")]
    Domain {
        param: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("point at projective distance {distance} lies outside the cap of radius {sigma}")]
    OutsideCap { distance: f64, sigma: f64 },

    #[error("invalid radial profile: {0}")]
    Profile(String),

    #[error("non-finite input")]
    NonFinite,

    #[error("{0} did not converge")]
    NotConverged(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn domain(param: &'static str, value: f64, expected: &'static str) -> Error {
    Error::Domain {
        param,
        value,
        expected,
    }
}
