use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("duplicate variable name `{0}`")]
    DuplicateName(String),

    #[error("variable `{name}` has {got} coefficients, system has {expected} bases")]
    LengthMismatch {
        name: String,
        expected: usize,
        got: usize,
    },

    #[error("base `{name}` has negative variance {variance}")]
    NegativeVariance { name: String, variance: f64 },

    #[error("unknown variable `{0}`")]
    UnknownName(String),

    #[error("covariance of {{{}}} is singular (pivot {pivot:e})", subset.join(", "))]
    Singular { subset: Vec<String>, pivot: f64 },

    #[error("mutual information evaluated to {value:e} bits, below the -1e-9 floor")]
    NegativeInformation { value: f64 },

    #[error("cannot decompose states: {0} has zero variance; use the independent-state fast path")]
    ZeroDivisorVariance(&'static str),

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("helper power violated: P0' = P0 - beta^2 Q = {p0_prime} < 0")]
    PowerViolation { p0_prime: f64 },

    #[error("beta = {beta} outside [-{bound}, {bound}]")]
    BetaOutOfRange { beta: f64, bound: f64 },

    #[error("regime gate violated ({regime}): {detail}")]
    RegimeGate {
        regime: &'static str,
        detail: String,
    },

    #[error("invalid power split P1' = {common}, P1'' = {private} for P1 = {total}")]
    InvalidSplit {
        common: f64,
        private: f64,
        total: f64,
    },

    #[error("coefficient system is singular: (P1+1)(P2+1) - ab P1 P2 = {det:e} at ab = {ab}")]
    SingularCoefficients { det: f64, ab: f64 },

    #[error("objective returned a non-finite value {value} at {at:?}")]
    NonFinite { value: f64, at: Vec<f64> },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
