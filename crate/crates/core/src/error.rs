use std::path::PathBuf;

use crate::expr::ParseError;

/// Failure raised by a single function evaluation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("`{node}` evaluated to a non-finite value")]
    NonFinite { node: String },
    #[error("division by zero in `{node}`")]
    DivisionByZero { node: String },
    #[error("negative base raised to a non-integer exponent in `{node}`")]
    ComplexPower { node: String },
    #[error("variable `y` is not bound in a one-variable context")]
    UnboundVariable,
    #[error("distance `{label}` returned a negative value {value}")]
    NegativeDistance { label: String, value: f64 },
    #[error("{0}")]
    Callback(String),
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("evaluation failed at {at}: {source}")]
    Eval {
        at: String,
        #[source]
        source: EvalError,
    },
    /// `step` is the 0-based index of the map application whose result left
    /// the domain.
    #[error("orbit of {start} left the domain at step {step} (value {value})")]
    DomainEscape { start: f64, step: usize, value: f64 },
    #[error("while checking pair ({}, {}): {source}", crate::format::fmt_real(*x), crate::format::fmt_real(*y))]
    Pair {
        x: f64,
        y: f64,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("unknown builtin `{name}`; valid names: ex31, ex32, ex32phi, linear(c), absdiff, powdiff(p)")]
    UnknownBuiltin { name: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("trace too short for rate estimation: {len} iterates, need at least 16")]
    TraceTooShort { len: usize },
    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn eval_at1(x: f64, source: EvalError) -> Self {
        Error::Eval {
            at: format!("x = {}", crate::format::fmt_real(x)),
            source,
        }
    }

    pub(crate) fn eval_at2(x: f64, y: f64, source: EvalError) -> Self {
        Error::Eval {
            at: format!(
                "(x, y) = ({}, {})",
                crate::format::fmt_real(x),
                crate::format::fmt_real(y)
            ),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
