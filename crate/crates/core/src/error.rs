use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("series did not converge after {terms} terms (partial value {partial})")]
    Convergence { partial: f64, terms: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("iteration stagnated: residual norm {residual_norm} but its image under the forward operator vanishes")]
    Stagnation { residual_norm: f64 },

    #[error("internal error: {0}")]
    Internal(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
