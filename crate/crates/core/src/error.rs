use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A configuration or argument violated its documented range.
    #[error("invalid `{field}`: {reason}")]
    Validation { field: String, reason: String },

    /// A scenario file contained a key the schema does not know.
    #[error("unknown key `{key}` in [{section}]{}", suggestion_suffix(.suggestion))]
    UnknownKey {
        section: String,
        key: String,
        suggestion: Option<String>,
    },

    /// Text input could not be parsed.
    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    /// A sequence was handed to an operator expecting another layer.
    #[error("expected {expected} layer, got {actual}")]
    LayerMismatch {
        expected: &'static str,
        actual: &'static str,
    },

    /// Enumeration would exceed the configured size cap.
    #[error("product alphabet of {required} outcomes exceeds cap {cap}")]
    Capacity { required: u128, cap: usize },

    /// Sampler produced no pair with positive distance.
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("missing feature `{0}` in feature record")]
    MissingFeature(&'static str),

    #[error("i/o error: {0}")]
    Io(String),
}

fn suggestion_suffix(s: &Option<String>) -> String {
    match s {
        Some(k) => format!(" (did you mean `{k}`?)"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
