//! Error type shared by every module of the crate.

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The integrand returned NaN or an infinity.
    #[error("integrand is not finite at t = {at} (value {value})")]
    NonFiniteEvaluation { at: f64, value: f64 },

    #[error("panel budget exceeded: {evaluations} evaluations against a cap of {cap}")]
    PanelBudgetExceeded { evaluations: usize, cap: usize },

    /// A tail truncation was requested without a positive mass floor.
    #[error("no decay certificate: q0 = {q0} must be positive")]
    NoDecay { q0: f64 },

    #[error("syntax error at position {position}: expected {}", expected.join(" or "))]
    SyntaxError {
        position: usize,
        expected: Vec<String>,
    },

    #[error("unknown catalog coefficient '{0}'")]
    UnknownName(String),

    /// The local mass of q never reaches 2 before `d_max`.
    #[error("mass deficit at x = {x}: mass {mass} < 2 on a half-width of {d_max}")]
    MassDeficit { x: f64, d_max: f64, mass: f64 },

    #[error("no bracket found starting from {from} within a horizon of {horizon}")]
    BracketFailure { from: f64, horizon: f64 },

    #[error("coefficient is not certified solvable: {0}")]
    NotSolvable(String),

    #[error("coefficient '{0}' carries no split q = q1 + q2")]
    NoSplit(String),

    #[error("coefficient '{0}' carries no auxiliary weight s(x)")]
    NoWeight(String),

    #[error("right-hand side has zero norm ({norm:e})")]
    ZeroRhs { norm: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Stable identifier used in serialized failure records.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NonFiniteEvaluation { .. } => "NonFiniteEvaluation",
            Error::PanelBudgetExceeded { .. } => "PanelBudgetExceeded",
            Error::NoDecay { .. } => "NoDecay",
            Error::SyntaxError { .. } => "SyntaxError",
            Error::UnknownName(_) => "UnknownName",
            Error::MassDeficit { .. } => "MassDeficit",
            Error::BracketFailure { .. } => "BracketFailure",
            Error::NotSolvable(_) => "NotSolvable",
            Error::NoSplit(_) => "NoSplit",
            Error::NoWeight(_) => "NoWeight",
            Error::ZeroRhs { .. } => "ZeroRHS",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }

    /// True for failures raised by the quadrature layer.
    pub fn is_quadrature_failure(&self) -> bool {
        matches!(
            self,
            Error::NonFiniteEvaluation { .. } | Error::PanelBudgetExceeded { .. }
        )
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
