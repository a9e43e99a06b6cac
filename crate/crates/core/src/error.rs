use thiserror::Error;

/// Errors produced by the toolkit.
///
/// Variants split into two families: input/validation problems and numerical
/// failures. The CLI maps them to exit codes 1 and 2 respectively.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("kernel singularity: {0}")]
    Singularity(String),

    #[error("unsupported operation: {0}")]
    UnsupportedOperation(String),

    #[error("noise operator is ill-conditioned (min eigenvalue {min:e}, max eigenvalue {max:e})")]
    IllConditionedNoise { min: f64, max: f64 },

    #[error("degenerate spectrum: all values are zero")]
    DegenerateSpectrum,

    #[error("insufficient resolution: {0}")]
    Resolution(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("no channel: every gain is zero")]
    NoChannel,

    #[error("problem size {requested} exceeds the cap of {cap}")]
    Size { requested: usize, cap: usize },

    #[error("decomposition failed: {0}")]
    Decomposition(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Singularity(_)
                | Error::IllConditionedNoise { .. }
                | Error::DegenerateSpectrum
                | Error::Decomposition(_)
                | Error::NoChannel
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
