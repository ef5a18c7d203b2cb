use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The network cannot support the requested step (e.g. too few candidate targets).
    #[error("structural error: {0}")]
    Structural(String),

    #[error("invalid seed network: {0}")]
    InvalidSeed(String),

    #[error(
        "likelihood factor {value} is not positive at record {index} \
         (k={k}, e_prev={e_prev}, n_prev={n_prev}, alpha={alpha})"
    )]
    NonPositiveFactor {
        index: usize,
        k: u64,
        e_prev: u64,
        n_prev: u64,
        alpha: f64,
        value: f64,
    },

    #[error("sample log carries no information about alpha: {0}")]
    NoInformation(String),

    #[error("sample log is empty")]
    EmptyLog,

    #[error("EM objective decreased by {drop:e} at iteration {iteration}")]
    EmDivergence { iteration: usize, drop: f64 },

    #[error("support truncated at {limit} bins still holds {tail_mass:e} of mass in the top bin; widen the support")]
    SupportTooSmall { limit: usize, tail_mass: f64 },

    #[error("unsupported regime: {0}")]
    Unsupported(String),

    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(source_name: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            source_name: source_name.into(),
            line,
            message: message.into(),
        }
    }

    /// True for failures of the filesystem or stream rather than of the data.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io(_))
    }
}
