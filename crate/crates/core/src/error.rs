use thiserror::Error;

/// Errors produced by the simulator and the experiment layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("position {x} is outside the lattice ({detail})")]
    Range { x: i64, detail: String },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error(
        "amplitude {magnitude:e} reached the line boundary at site {site}; enlarge the lattice"
    )]
    BoundaryViolation { site: usize, magnitude: f64 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("Kraus set is not complete: max deviation {deviation:e}")]
    ChannelIntegrity { deviation: f64 },

    #[error("invalid run specification: {0}")]
    InvalidSpec(String),

    #[error("numerical integrity violated at step {step}: {detail}")]
    NumericalIntegrity { step: usize, detail: String },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("config error at `{key}`: {message}")]
    Validation { key: String, message: String },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn validation(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            key: key.into(),
            message: message.into(),
        }
    }

    /// Process exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Range { .. }
            | Error::Shape(_)
            | Error::Parameter(_)
            | Error::InvalidSpec(_)
            | Error::Capacity(_)
            | Error::Validation { .. } => 2,
            Error::BoundaryViolation { .. }
            | Error::ChannelIntegrity { .. }
            | Error::NumericalIntegrity { .. } => 3,
            Error::Io(_) | Error::Csv(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
