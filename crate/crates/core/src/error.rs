use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report.
///
/// Variants that originate in source text carry a byte offset into the text
/// that was handed to the failing entry point.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed ring_prop at byte {offset}: {reason}")]
    MalformedRingProp { offset: usize, reason: String },

    #[error("unsupported carrier type `{carrier}`: only integer types form an exact ring")]
    UnsupportedCarrier { carrier: String },

    #[error("invalid ring: {reason}")]
    InvalidRing { reason: String },

    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("not a polynomial at byte {offset}: {reason}")]
    NonPolynomial { offset: usize, reason: String },

    #[error("the polynomial variable appears in an exponent at byte {offset}")]
    VariableInExponent { offset: usize },

    #[error("empty expression")]
    EmptyExpression,

    #[error("expression uses a second variable `{name}`; only univariate polynomials are supported")]
    Multivariate { name: String },

    #[error("degree {degree} exceeds the supported maximum of {max}")]
    DegreeTooLarge { degree: usize, max: usize },

    #[error("pragma at byte {offset} is not followed by an annotated function definition: {reason}")]
    OrphanPragma { offset: usize, reason: String },

    #[error("duplicate `{kind}` pragma at byte {offset}")]
    DuplicatePragma { offset: usize, kind: String },

    #[error("unbalanced braces at byte {offset}")]
    UnbalancedBraces { offset: usize },

    #[error("function `{function}`: {reason}")]
    VariableSelection { function: String, reason: String },

    #[error("invalid evaluation DAG: {reason}")]
    InvalidDag { reason: String },

    #[error("no value bound for `{name}`")]
    UnboundName { name: String },

    #[error("exhaustive domain of {points} points exceeds the cap of {cap}")]
    DomainTooLarge { points: u128, cap: u128 },

    #[error("unsupported width {bits}; expected 8, 16, 32 or 64")]
    UnsupportedWidth { bits: u32 },

    #[error("signature mismatch: {reason}")]
    SignatureMismatch { reason: String },

    #[error("no annotated functions found")]
    NoAnnotatedFunctions,

    #[error("unsupported degree {degree} (maximum {max})")]
    UnsupportedDegree { degree: usize, max: usize },

    #[error("scheme list is empty")]
    EmptySchemeList,

    #[error("iteration count must be at least 1")]
    InvalidIterations,

    #[error("unknown scheme `{name}`")]
    UnknownScheme { name: String },
}

impl Error {
    /// Byte offset into the originating text, if the error has one.
    pub fn offset(&self) -> Option<usize> {
        match self {
            Error::MalformedRingProp { offset, .. }
            | Error::Syntax { offset, .. }
            | Error::NonPolynomial { offset, .. }
            | Error::VariableInExponent { offset }
            | Error::OrphanPragma { offset, .. }
            | Error::DuplicatePragma { offset, .. }
            | Error::UnbalancedBraces { offset } => Some(*offset),
            _ => None,
        }
    }

    /// Shift the carried offset by `base`. Used when a sub-slice was parsed.
    pub(crate) fn rebased(mut self, base: usize) -> Self {
        match &mut self {
            Error::MalformedRingProp { offset, .. }
            | Error::Syntax { offset, .. }
            | Error::NonPolynomial { offset, .. }
            | Error::VariableInExponent { offset }
            | Error::OrphanPragma { offset, .. }
            | Error::DuplicatePragma { offset, .. }
            | Error::UnbalancedBraces { offset } => *offset += base,
            _ => {}
        }
        self
    }

    /// Stable numeric code, shared with the C ABI.
    pub fn code(&self) -> i32 {
        match self {
            Error::MalformedRingProp { .. } => 10,
            Error::UnsupportedCarrier { .. } => 11,
            Error::InvalidRing { .. } => 12,
            Error::Syntax { .. } => 20,
            Error::NonPolynomial { .. } => 21,
            Error::VariableInExponent { .. } => 22,
            Error::EmptyExpression => 23,
            Error::Multivariate { .. } => 24,
            Error::DegreeTooLarge { .. } => 25,
            Error::OrphanPragma { .. } => 30,
            Error::DuplicatePragma { .. } => 31,
            Error::UnbalancedBraces { .. } => 32,
            Error::VariableSelection { .. } => 33,
            Error::InvalidDag { .. } => 40,
            Error::UnboundName { .. } => 50,
            Error::DomainTooLarge { .. } => 51,
            Error::UnsupportedWidth { .. } => 52,
            Error::SignatureMismatch { .. } => 60,
            Error::NoAnnotatedFunctions => 61,
            Error::UnsupportedDegree { .. } => 62,
            Error::EmptySchemeList => 63,
            Error::InvalidIterations => 64,
            Error::UnknownScheme { .. } => 65,
        }
    }
}

/// 1-based line and column (in bytes) of `offset` within `text`.
pub fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let before = &text.as_bytes()[..offset];
    let line = before.iter().filter(|&&b| b == b'\n').count() + 1;
    let col = match before.iter().rposition(|&b| b == b'\n') {
        Some(nl) => offset - nl,
        None => offset + 1,
    };
    (line, col)
}
