use thiserror::Error;

/// Errors produced while building or running a Poisson solver experiment.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("eigenvalue {lambda} overflows {width} bits after amplification by 2^{f}")]
    Overflow { lambda: f64, f: u32, width: u32 },

    #[error("encoded eigenvalues collide ({0}); increase f or the register width")]
    Collision(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("post-selection probability {0:e} is too small to renormalize")]
    DegeneratePostselection(f64),

    #[error("no successful shots out of {0}; increase the shot count")]
    EmptyResult(u64),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code used by the command-line runner.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Resource(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
