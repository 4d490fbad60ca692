use thiserror::Error;

/// Errors raised by the model code and by the CLI plumbing around it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument fell outside the domain of a function.
    #[error("domain error: {name} = {value} ({reason})")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// A parameter bundle violates one of its invariants.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// The single-variable reduction needs the two scaling exponents to match.
    #[error("exponents must be equal for the single-variable reduction (alpha = {alpha}, beta = {beta})")]
    UnequalExponents { alpha: f64, beta: f64 },

    /// The closed-form derivative only holds where the token optimum is interior.
    #[error("token optimum is not interior at n = {n} (unclamped t* = {t_star})")]
    NonInteriorTokens { n: f64, t_star: f64 },

    /// The coarse scan kept finding its maximum on the edge of the range.
    #[error("profit maximum lies on the scan boundary at n = {n} (range [{lo}, {hi}])")]
    ScanBoundary { n: f64, lo: f64, hi: f64 },

    #[error("no sign change on [{lo}, {hi}]: {context}")]
    NoBracket {
        lo: f64,
        hi: f64,
        context: &'static str,
    },

    #[error("did not converge after {iterations} iterations: {context}")]
    NoConvergence {
        iterations: usize,
        context: &'static str,
    },

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::Domain {
            name,
            value,
            reason: "must be positive and finite",
        })
    }
}

pub(crate) fn non_negative(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::Domain {
            name,
            value,
            reason: "must be non-negative and finite",
        })
    }
}
