use thiserror::Error;

/// Errors raised by the planning library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The tolerance cannot be met even by a collocated noisy sample.
    #[error("infeasible tolerance: delta {delta} must exceed the noise floor {noise_floor} and stay below sigma0^2 {sigma0_sq}")]
    InfeasibleTolerance {
        delta: f64,
        noise_floor: f64,
        sigma0_sq: f64,
    },

    /// The Gram matrix could not be factored.
    #[error("singular kriging system: {0}")]
    SingularSystem(String),

    /// The exact TSP oracle was asked for too many vertices.
    #[error("instance of {n} points exceeds the exact solver limit of {limit}")]
    SizeLimit { n: usize, limit: usize },

    #[error("invalid environment: {0}")]
    InvalidEnvironment(String),

    /// A configuration file or command-line value could not be used.
    #[error("config error: {0}")]
    Config(String),

    /// A produced plan failed its own check.
    #[error("verification failed: {0}")]
    Verification(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
