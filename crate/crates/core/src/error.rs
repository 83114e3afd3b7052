use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("Markov relation is not mixing: {0}")]
    NonMixing(String),

    /// Exact or interval arithmetic could not separate the objects asked for.
    #[error("insufficient resolution: {0}")]
    Resolution(String),

    #[error("tolerance {tol:e} unreachable (best width {achieved:e} at depth {depth})")]
    ToleranceUnreachable {
        tol: f64,
        achieved: f64,
        depth: usize,
    },

    #[error("strips do not overlap")]
    EmptyOverlap,

    #[error("rectangle mismatch: image in R{image}, domain in R{domain}")]
    RectangleMismatch { image: usize, domain: usize },

    #[error("cone condition violated: {0}")]
    ConeViolation(String),

    #[error("strip does not cross its parabolic tongue: {0}")]
    CrossingViolation(String),

    #[error("composition would pass through the fold more than once")]
    MultipleFolds,

    #[error("missing certified derivative ranges")]
    MissingRanges,

    #[error("compatibility condition fails at index {index}: eps {eps:e} >= |Q| {q:e}")]
    CompatibilityViolation { index: usize, eps: f64, q: f64 },

    #[error("budget of {cap} exceeded: {what}")]
    BudgetExceeded { cap: usize, what: String },
}

impl Error {
    /// Budget and resolution failures are "ran out of room" errors; the rest
    /// are input problems.
    pub fn is_resource_limit(&self) -> bool {
        matches!(
            self,
            Error::Resolution(_)
                | Error::ToleranceUnreachable { .. }
                | Error::BudgetExceeded { .. }
        )
    }
}
