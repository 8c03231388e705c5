use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate arc: {0}")]
    DegenerateArc(String),

    #[error("jet of order {requested} requested but the provider supports at most {available}")]
    InsufficientJetOrder { requested: usize, available: usize },

    #[error("|phi'(t)| = {speed:e} at t = {t} is below the admissibility threshold")]
    NonAdmissiblePoint { t: f64, speed: f64 },

    #[error("quadrature did not converge within {panels} panels (last change {last_change:e})")]
    NoConvergence { panels: usize, last_change: f64 },

    #[error("nodes {i} and {j} are too close (gap {gap:e})")]
    NodesTooClose { i: usize, j: usize, gap: f64 },

    #[error("parameters {t1} and {t2} are in the confluence region; use the confluent value")]
    ConfluenceRegion { t1: f64, t2: f64 },

    #[error("unsupported order: {0}")]
    UnsupportedOrder(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("constant estimate for k = {k} is unstable: refinement delta {delta:e} vs estimate {estimate:e}")]
    EstimationUnstable { k: usize, estimate: f64, delta: f64 },

    #[error("division by a jet with vanishing constant term")]
    SingularJet,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
