use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("truncation order n_max = {0} is too small")]
    TruncationOrder(usize),

    #[error("truncation deficit {deficit:.3e} exceeds tolerance {tol:.1e} at n_max = {n_max}")]
    Truncation { deficit: f64, tol: f64, n_max: usize },

    #[error("invalid coherent label: {0}")]
    InvalidLabel(String),

    #[error("photon number {n} out of range 0..={n_max}")]
    PhotonNumberOutOfRange { n: usize, n_max: usize },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("odd cat state is undefined at alpha = 0")]
    OddCatAtOrigin,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("displacement headroom violated: {0}")]
    Headroom(String),

    #[error("residual has vanished (norm^2 = {0:.3e}); nothing to maximize")]
    VanishedResidual(f64),

    #[error("no maximizer found above floor; internal search failure")]
    NoMaximizer,

    #[error("ancilla tag index {index} out of range 1..={max}")]
    TagOutOfRange { index: usize, max: usize },

    #[error("unitary simulation disagrees with greedy recursion by {0:.3e}; increase n_max")]
    TruncationConsistency(f64),

    #[error("captured weight is zero")]
    ZeroCapturedWeight,

    #[error("projected trace collapsed to {0:.3e}")]
    TraceCollapse(f64),

    #[error("invalid mixture weights: {0}")]
    InvalidWeights(String),

    #[error("P density normalization deficit {deficit:.3e} exceeds tolerance {tol:.1e}")]
    Normalization { deficit: f64, tol: f64 },

    #[error("singular P function: {0}")]
    SingularP(String),

    #[error("beam-splitter ancilla must have a classical P density")]
    NonclassicalAncilla,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
