use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("{what}: {value} is outside the domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// The sample is degenerate (e.g. all observations equal) and the
    /// estimator is undefined.
    #[error("degenerate data: {0}")]
    Degenerate(&'static str),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A score inverse was evaluated outside the declared score range.
    #[error("score inverse evaluated at {value}, outside the score range ({lo}, {hi})")]
    ScoreRange { value: f64, lo: f64, hi: f64 },

    /// No member of the family reaches the requested score.
    #[error("score {0} is unattainable within the family")]
    Unattainable(f64),

    #[error("index for arm {0} is NaN")]
    NanIndex(usize),

    #[error("the arm set is empty")]
    NoArms,
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: impl Into<f64>, domain: &'static str) -> Self {
        Error::Domain {
            what,
            value: value.into(),
            domain,
        }
    }
}
