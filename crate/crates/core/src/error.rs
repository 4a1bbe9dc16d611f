use std::fmt;

use thiserror::Error;

/// Dimension ranges on which the closed forms and threshold pipelines are valid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Guard {
    /// Any product handled by the crate: at most three circles, `1 <= n <= 7`.
    Product,
    /// Profile of a single circle times Euclidean space: `2 <= n <= 7`.
    CircleProfile,
    /// Euclidean profile of `R^m`: `2 <= m <= 9`.
    Euclidean,
    /// Two-torus threshold pipeline: `k = 2`, `2 <= n <= 5`.
    TwoTorus,
    /// Ball/cylinder crossing of `T^2 x R`: `k = 2`, `n = 1`.
    TwoTorusLine,
    /// Three-torus threshold pipeline: `k = 3`, `2 <= n <= 4`.
    ThreeTorus,
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Guard::Product => "products need at most 3 circle factors and 1 <= n <= 7",
            Guard::CircleProfile => "the circle-times-Euclidean profile needs 2 <= n <= 7",
            Guard::Euclidean => "the Euclidean profile is supported for 2 <= m <= 9",
            Guard::TwoTorus => "the two-torus threshold pipeline needs k = 2 and 2 <= n <= 5",
            Guard::TwoTorusLine => "the ball/cylinder crossing of T^2 x R needs k = 2 and n = 1",
            Guard::ThreeTorus => "the three-torus threshold pipeline needs k = 3 and 2 <= n <= 4",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("guard violated: {guard} ({detail})")]
    Guard { guard: Guard, detail: String },

    #[error("no convergence solving for {what} after {iterations} iterations; last bracket [{lo:e}, {hi:e}]")]
    Convergence {
        what: String,
        iterations: usize,
        lo: f64,
        hi: f64,
    },

    #[error("consistency error: {0}")]
    Consistency(String),

    #[error("residual {residual:e} exceeds bound {bound:e} at root {root:e}")]
    Residual { root: f64, residual: f64, bound: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A solver error raised while computing a named constant.
    #[error("computing {constant}: {source}")]
    Constant {
        constant: &'static str,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn guard(guard: Guard, detail: impl Into<String>) -> Self {
        Error::Guard {
            guard,
            detail: detail.into(),
        }
    }

    /// Innermost error, looking through [`Error::Constant`] wrappers.
    pub fn root_cause(&self) -> &Error {
        match self {
            Error::Constant { source, .. } => source.root_cause(),
            e => e,
        }
    }

    /// True for failures of an iterative solve or of a structural assumption
    /// behind one.
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self.root_cause(),
            Error::Convergence { .. } | Error::Consistency(_) | Error::Residual { .. }
        )
    }
}

pub(crate) trait WithConstant<T> {
    fn constant(self, name: &'static str) -> Result<T>;
}

impl<T> WithConstant<T> for Result<T> {
    fn constant(self, name: &'static str) -> Result<T> {
        self.map_err(|e| match e {
            e @ Error::Guard { .. } => e,
            e => Error::Constant {
                constant: name,
                source: Box::new(e),
            },
        })
    }
}
