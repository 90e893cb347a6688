use thiserror::Error;

/// Errors raised by the laboratory's operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("capacity exceeded: {what} = {value} is above the cap {cap}")]
    Capacity { what: &'static str, value: u64, cap: u64 },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("{n} is outside the factorizable range (table covers [{lo}, {hi}], fallback up to {fallback})")]
    OutOfRange { n: u64, lo: u64, hi: u64, fallback: u64 },

    #[error("series diverges: Re(s) = {sigma} must exceed 1 in convergent mode")]
    Divergence { sigma: f64 },

    #[error("zero denominator: {0}")]
    ZeroDenominator(String),

    #[error("infeasible minimization: {0}")]
    Infeasible(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("unknown function family `{0}`")]
    UnknownFunction(String),

    #[error("parameter `{name}` has modulus {modulus}, outside the unit disc")]
    OutsideUnitDisc { name: String, modulus: f64 },

    #[error("{count} sign changes found in the window; at most one is allowed")]
    MultipleSignChanges { count: usize },

    #[error("sandwich violated: M = {m}, N = {n}")]
    SandwichViolated { m: f64, n: f64 },

    #[error("zero of L on the sample grid at t = {t}")]
    ZeroOnGrid { t: f64 },

    #[error("hypothesis not satisfied: {0}")]
    HypothesisUnmet(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error("cache format: {0}")]
    CacheFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }
}
