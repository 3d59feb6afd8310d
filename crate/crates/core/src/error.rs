use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid material law: {0}")]
    Material(String),

    #[error("matrix `{name}` is singular or ill-conditioned (condition estimate {condition:.3e})")]
    IllConditioned { name: String, condition: f64 },

    #[error("system has a zero-energy mode; null vector dominated by {dominant}")]
    RigidMode { dominant: String, null_vector: Vec<f64> },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("iterative solver stalled after {iterations} iterations (relative residual {residual:.3e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
