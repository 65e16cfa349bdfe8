use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument violates the documented precondition.
    InvalidParameter(String),
    /// A computation produced a value outside its mathematical range
    /// (e.g. a significantly negative eigenvalue of a covariance).
    NumericalFailure(String),
    /// The eigen-spectrum makes the partial-fraction expansion
    /// ill-conditioned or undefined.
    DegenerateSpectrum(String),
    /// A moment generating function was evaluated at one of its poles.
    PoleEvaluation { s_re: f64, s_im: f64 },
    /// The quantity is not defined at this point of its domain.
    Domain(String),
    /// A Monte Carlo estimate saw no outage events where at least one is needed.
    InsufficientSamples { n_samples: u64 },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for errors caused by bad input rather than by the numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::InvalidParameter(_) | Error::Domain(_))
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::NumericalFailure(msg) => write!(f, "numerical failure: {msg}"),
            Error::DegenerateSpectrum(msg) => write!(f, "degenerate spectrum: {msg}"),
            Error::PoleEvaluation { s_re, s_im } => {
                write!(f, "moment generating function evaluated at a pole (s = {s_re}{s_im:+}j)")
            }
            Error::Domain(msg) => write!(f, "outside domain: {msg}"),
            Error::InsufficientSamples { n_samples } => write!(
                f,
                "no outage events observed in {n_samples} samples; increase the sample count"
            ),
        }
    }
}

impl core::error::Error for Error {}
