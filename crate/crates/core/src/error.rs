use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    Domain(String),
    /// Quadrature could not reach the requested tolerance.
    Quadrature { requested: f64, achieved: f64 },
    /// A threshold of the staged construction could not be met.
    Threshold { name: String, detail: String },
    /// An internal consistency check of a construction failed.
    Construction(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn threshold(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Threshold {
            name: name.into(),
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Quadrature {
                requested,
                achieved,
            } => write!(
                f,
                "quadrature did not converge: requested {requested:e}, achieved {achieved:e}"
            ),
            Error::Threshold { name, detail } => write!(f, "threshold {name} not met: {detail}"),
            Error::Construction(msg) => write!(f, "construction failed: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
