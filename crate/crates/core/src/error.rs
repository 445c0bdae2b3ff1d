use std::fmt;

use thiserror::Error;

/// Location-annotated syntax error from the formula parser.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub message: String,
    pub line: usize,
    pub column: usize,
    /// 1-based index of the offending token.
    pub token: usize,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "syntax error at token {} (line {}, column {}): {}",
            self.token, self.line, self.column, self.message
        )
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("relation `{name}` has arity {expected} but was applied to {found} terms")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("unknown constant `{0}`")]
    UnknownConstant(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("invalid signature: {0}")]
    InvalidSignature(String),
    #[error("invalid structure: {0}")]
    InvalidStructure(String),
    #[error("invalid formula: {0}")]
    InvalidFormula(String),
    #[error("InconsistentType: the base set has no realizations")]
    InconsistentType,
    #[error("InsufficientCodes: {formulas} formulas need at least two elements, universe has {universe}")]
    InsufficientCodes { universe: usize, formulas: usize },
    #[error("search space overflow in {what}: {size} exceeds the bound {bound}")]
    SearchOverflow {
        what: &'static str,
        size: u128,
        bound: u128,
    },
    #[error("size {size} exceeds the configured cap {cap}")]
    CapExceeded { size: u128, cap: u128 },
    #[error("invalid multi-order: {0}")]
    InvalidMultiOrder(String),
    #[error("not an embedding: {0}")]
    NotEmbedding(String),
    #[error("position {position} is out of range for order {order} (at most {max})")]
    PositionOutOfRange {
        order: usize,
        position: usize,
        max: usize,
    },
    #[error("pattern length {0} is odd")]
    OddLength(usize),
    #[error("empty sequence")]
    EmptySequence,
    #[error("duplicate point {0}")]
    DuplicatePoint(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("json: {0}")]
    Json(String),
}

impl Error {
    /// True for errors caused by a configured search or size bound rather
    /// than by malformed input.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::SearchOverflow { .. } | Error::CapExceeded { .. })
    }

    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse(_) => "ParseError",
            Error::UnknownRelation(_) => "UnknownRelation",
            Error::ArityMismatch { .. } => "ArityMismatch",
            Error::UnknownConstant(_) => "UnknownConstant",
            Error::UnknownElement(_) => "UnknownElement",
            Error::UnboundVariable(_) => "UnboundVariable",
            Error::InvalidSignature(_) => "InvalidSignature",
            Error::InvalidStructure(_) => "InvalidStructure",
            Error::InvalidFormula(_) => "InvalidFormula",
            Error::InconsistentType => "InconsistentType",
            Error::InsufficientCodes { .. } => "InsufficientCodes",
            Error::SearchOverflow { .. } => "SearchOverflow",
            Error::CapExceeded { .. } => "CapExceeded",
            Error::InvalidMultiOrder(_) => "InvalidMultiOrder",
            Error::NotEmbedding(_) => "NotEmbedding",
            Error::PositionOutOfRange { .. } => "PositionOutOfRange",
            Error::OddLength(_) => "OddLength",
            Error::EmptySequence => "EmptySequence",
            Error::DuplicatePoint(_) => "DuplicatePoint",
            Error::Unsupported(_) => "Unsupported",
            Error::Json(_) => "Json",
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
