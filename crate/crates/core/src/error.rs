use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("conversion not defined: {0}")]
    ConversionNotDefined(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("format error at line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("validation error in `{field}`: {message}")]
    Validation { field: String, message: String },

    #[error("omega = {omega:e} a.u. lies within {window:e} of the resonance at {resonance:e} a.u.")]
    PoleProximity {
        omega: f64,
        resonance: f64,
        window: f64,
    },

    #[error("temperature {temperature} K is outside the tabulated range [{min}, {max}] K of `{material}`")]
    Extrapolation {
        material: String,
        temperature: f64,
        min: f64,
        max: f64,
    },

    #[error(
        "quadrature did not converge within {panels} panels: estimate {estimate:e}, error {error:e}"
    )]
    Convergence {
        estimate: f64,
        error: f64,
        panels: usize,
    },

    #[error("integrand failed at omega = {omega:e} a.u.: {source}")]
    Integrand {
        omega: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(
        "strict validity violated at T = {temperature} K: thermal window reaches x = {reach:.2} \
         below the lowest resonance at {resonance:e} a.u. (need x >= {required}); use a broadened policy"
    )]
    Validity {
        temperature: f64,
        resonance: f64,
        reach: f64,
        required: f64,
    },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Process exit status for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self.root() {
            Error::Validation { .. } | Error::Format { .. } | Error::Extrapolation { .. } => 2,
            Error::Validity { .. } => 3,
            _ => 1,
        }
    }

    /// Strips integrand wrappers and returns the innermost error.
    pub fn root(&self) -> &Error {
        match self {
            Error::Integrand { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
