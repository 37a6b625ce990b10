use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("supports do not align: {0}")]
    Alignment(String),

    #[error("{name} = {value} is outside {domain}")]
    OutOfDomain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("unsupported parameter {name} = {value}: {reason}")]
    Unsupported {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("missing field `{0}`")]
    MissingField(&'static str),

    #[error("infeasible parameters: {reason} (constraint value {constraint})")]
    Infeasible { reason: String, constraint: f64 },

    #[error("impossible measurement: {0}")]
    ImpossibleMeasurement(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("bisection did not converge within {0} iterations")]
    BisectionCap(usize),

    #[error("enumeration budget exceeded: {needed} datasets > {budget}")]
    EnumerationBudget { needed: u128, budget: u128 },

    #[error("losses are continuous; declare a quantization grid")]
    Unquantized,

    #[error("loss {value} at index {index} is outside [0, 1]")]
    LossRange { index: usize, value: f64 },

    #[error("identity violated: {0}")]
    IdentityViolation(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
