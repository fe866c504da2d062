use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Strict (unsmoothed) KL divergence where `p` has mass at a duration `q` never observed.
    #[error("KL divergence undefined: reference distribution has no mass at duration {duration}")]
    DivergenceUndefined { duration: usize },

    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(String),

    #[error("process diverged at step {step}: {detail}")]
    Generation { step: usize, detail: String },

    #[error("surrogate {index}: statistic undefined after {attempts} attempts ({source})")]
    SurrogateExhausted {
        index: usize,
        attempts: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("too many malformed rows: {malformed} of {total}")]
    MalformedInput { malformed: usize, total: usize },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Short machine-readable tag for error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::InsufficientData(_) => "insufficient_data",
            Error::DivergenceUndefined { .. } => "divergence_undefined",
            Error::UndefinedCorrelation(_) => "undefined_correlation",
            Error::Generation { .. } => "generation",
            Error::SurrogateExhausted { .. } => "surrogate_exhausted",
            Error::MalformedInput { .. } => "malformed_input",
            Error::Csv(_) => "csv",
            Error::Io { .. } => "io",
        }
    }
}
