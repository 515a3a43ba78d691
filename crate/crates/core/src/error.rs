use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("bias current |I_b| = {bias:e} A is not below 2 I_c = {limit:e} A; the phase minimum does not exist")]
    BiasAboveCritical { bias: f64, limit: f64 },

    #[error("bias flux Phi_b/Phi_0 = {ratio} is not an even number of flux quanta (tolerance {tolerance:e})")]
    BiasFluxOffLattice { ratio: f64, tolerance: f64 },

    #[error("outside the overdamped regime: {0}")]
    OutOfRegime(String),

    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("Hilbert space dimension {dim} exceeds the limit {limit}")]
    DimensionOverflow { dim: usize, limit: usize },

    #[error("{0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
