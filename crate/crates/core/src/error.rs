use thiserror::Error;

/// Errors raised by the engine.
///
/// `Integrity` is reserved for mathematical self-checks that fail; every other
/// variant is a caller or environment problem.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("field context mismatch: F_{left} vs F_{right}")]
    ContextMismatch { left: u64, right: u64 },

    #[error("integrity check `{check}` failed: {detail}")]
    Integrity { check: String, detail: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("series coefficient z^{exponent} requested beyond precision {prec}")]
    BeyondPrecision { exponent: i64, prec: i64 },

    #[error(
        "T_0 tail may reach the principal part: pole budget {budget} >= v(T_0) = {t0_valuation}; \
         expand with an explicit T_0 precision"
    )]
    T0Relevant { budget: i64, t0_valuation: i64 },

    #[error("no solution of u^q - u = target within bound {bound:?}")]
    NoSolution { bound: Vec<u32> },

    #[error("prolongation failed at level {level} ({generator})")]
    Prolongation { level: usize, generator: String },

    #[error("class {class}: conductor {found} on sampled line {line} differs from representative {expected}")]
    ClassInconstancy {
        class: String,
        line: String,
        expected: u64,
        found: u64,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn integrity(check: &str, detail: impl Into<String>) -> Self {
        Error::Integrity {
            check: check.to_string(),
            detail: detail.into(),
        }
    }

    pub fn is_integrity(&self) -> bool {
        matches!(
            self,
            Error::Integrity { .. } | Error::ClassInconstancy { .. } | Error::Prolongation { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
