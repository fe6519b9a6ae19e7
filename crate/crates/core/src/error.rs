//! Error taxonomy shared by every module.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid static configuration (grid sizes, solver setup, config files).
    #[error("configuration error: {0}")]
    Config(String),
    /// Invalid argument to an operation.
    #[error("argument error: {0}")]
    Argument(String),
    /// A scale is not representable on the grid (too-small epsilon, too-large block index).
    #[error("resolution error: {0}")]
    Resolution(String),
    /// A mollifier would wrap around the torus.
    #[error("domain-wrap error: {0}")]
    DomainWrap(String),
    /// Operands live on different grids.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    /// A mathematical precondition of the operation does not hold.
    #[error("precondition error: {0}")]
    Precondition(String),
    /// Pieces that must originate from one source do not match.
    #[error("consistency error: {0}")]
    Consistency(String),
    /// A multiplier symbol is undefined or ill-formed at a needed mode.
    #[error("symbol error: {0}")]
    Symbol(String),
    /// The mollification scale exceeds the test-function support margin.
    #[error("support-margin error: {0}")]
    SupportMargin(String),
    /// Time step violates the hard CFL bound.
    #[error("CFL violation: {0}")]
    Cfl(String),
    /// Non-finite values appeared during time stepping.
    #[error("numerical blow-up at step {step}: {detail}")]
    Blowup { step: usize, detail: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}
