use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every domain failure of the toolchain. Each variant carries a stable
/// `E_*` code (see [`Error::code`]) that the CLI prints verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("E_EMPTY_DIRECTIONS: the direction set is empty")]
    EmptyDirections,
    #[error("E_BAD_DIRECTION: {0}")]
    BadDirection(String),
    #[error("E_BAD_NODE: node {0} does not exist")]
    BadNode(usize),
    #[error("E_LIMIT: {0}")]
    Limit(String),

    #[error("E_DECODE_CYCLE: list walk exceeded {0} steps")]
    DecodeCycle(usize),
    #[error("E_DECODE_CODE: node {node} carries code {code} which maps to no symbol")]
    DecodeCode { node: usize, code: String },
    #[error("E_DECODE_BIT: node {node}, direction {dir} points neither to itself nor to the origin")]
    DecodeBit { node: usize, dir: char },

    #[error("E_PARSE: {0}")]
    Parse(String),
    #[error("E_SCHEMA: {0}")]
    Schema(String),

    #[error("E_SYNTAX: line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("E_LINE_NUMBER: line {line}: explicit number {found} but instruction is number {expected}")]
    LineNumber { line: usize, expected: usize, found: usize },
    #[error("E_BAD_PATH: line {line}, column {col}: `_` inside path token `{token}`")]
    BadPath { line: usize, col: usize, token: String },

    #[error("E_PROGRAM: {0}")]
    Program(String),

    #[error("E_UNBOUND_VAR: variable {0} is not quantified")]
    UnboundVar(String),
    #[error("E_DOUBLE_QUANT: variable {0} is quantified twice")]
    DoubleQuant(String),
    #[error("E_TOO_LARGE: {0}")]
    TooLarge(String),
    #[error("E_ALPHABET: {0}")]
    Alphabet(String),
    #[error("E_TOO_MANY_SYMBOLS: {0} bit directions needed, at most {1} available")]
    TooManySymbols(usize, usize),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::EmptyDirections => "E_EMPTY_DIRECTIONS",
            Error::BadDirection(_) => "E_BAD_DIRECTION",
            Error::BadNode(_) => "E_BAD_NODE",
            Error::Limit(_) => "E_LIMIT",
            Error::DecodeCycle(_) => "E_DECODE_CYCLE",
            Error::DecodeCode { .. } => "E_DECODE_CODE",
            Error::DecodeBit { .. } => "E_DECODE_BIT",
            Error::Parse(_) => "E_PARSE",
            Error::Schema(_) => "E_SCHEMA",
            Error::Syntax { .. } => "E_SYNTAX",
            Error::LineNumber { .. } => "E_LINE_NUMBER",
            Error::BadPath { .. } => "E_BAD_PATH",
            Error::Program(_) => "E_PROGRAM",
            Error::UnboundVar(_) => "E_UNBOUND_VAR",
            Error::DoubleQuant(_) => "E_DOUBLE_QUANT",
            Error::TooLarge(_) => "E_TOO_LARGE",
            Error::Alphabet(_) => "E_ALPHABET",
            Error::TooManySymbols(..) => "E_TOO_MANY_SYMBOLS",
        }
    }
}
