use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid chain: {0}")]
    InvalidChain(String),

    #[error("invalid coupling profile: {0}")]
    InvalidProfile(String),

    #[error("momentum index {k} is outside the momentum set of an N={n} chain")]
    MomentumOutOfRange { k: i64, n: usize },

    #[error("site index {i} is outside 1..={n}")]
    SiteOutOfRange { i: usize, n: usize },

    #[error("mode k={k} is degenerate (Lambda_k = {lambda:e})")]
    DegenerateMode { k: i64, lambda: f64 },

    #[error("unsupported regime: {reason} (minimum sits at k={minimizer})")]
    UnsupportedRegime { reason: String, minimizer: i64 },

    #[error("constraint violated: sum of couplings is {sum}, expected 1")]
    NotCritical { sum: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("N={n} exceeds the dense oracle capacity of {max} qubits")]
    Capacity { n: usize, max: usize },

    #[error("oracle supports at most next-nearest-neighbour couplings, got M={m}")]
    UnsupportedInteraction { m: usize },

    #[error("eigensolver failed: {0}")]
    Solver(String),

    #[error("only {available} valid clauses exist, {requested} requested")]
    InsufficientClauses { available: usize, requested: usize },

    #[error("malformed instance: {0}")]
    Parse(String),
}
