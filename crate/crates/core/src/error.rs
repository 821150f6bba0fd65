use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// An operator moved a state out of the sector it was asked to act on.
    #[error("operator term `{term}` leaks out of sector (d={d}, n_a={n_a}, n_b={n_b})")]
    SectorLeak {
        term: String,
        d: usize,
        n_a: usize,
        n_b: usize,
    },

    /// The generator of an evolution is not hermitian on its sector.
    #[error("operator is not hermitian on the sector (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    /// Evolution changed the norm beyond tolerance.
    #[error("unitarity defect {defect:.3e} exceeds tolerance {tolerance:.1e}")]
    Unitarity { defect: f64, tolerance: f64 },

    /// A state expected to be normalized is not.
    #[error("state is not normalized (norm {norm:.15})")]
    NotNormalized { norm: f64 },

    /// The spectrum has too few nonzero Schmidt coefficients for the request.
    #[error("Schmidt rank {rank} is too small for N = {n}")]
    RankDeficient { rank: usize, n: usize },

    /// A scenario produced an internally inconsistent decomposition.
    #[error("completeness defect {defect:.3e} exceeds tolerance {tolerance:.1e}")]
    Completeness { defect: f64, tolerance: f64 },

    /// Configuration could not be parsed or validated.
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
