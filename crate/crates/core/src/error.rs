use thiserror::Error;

/// Errors produced by the design and simulation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{quantity} = {value} is outside the valid range: {bound}")]
    OutOfRange {
        quantity: &'static str,
        value: f64,
        bound: String,
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("energy conservation violated: 1/pump - 1/signal - 1/idler = {residual:e} um^-1")]
    EnergyConservation { residual: f64 },

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("invalid motif: {0}")]
    InvalidMotif(String),

    #[error("{0}")]
    UnsupportedShape(String),

    #[error("the (0, 0) Fourier term is the DC level; use fill_factor instead")]
    DcTerm,

    #[error("grid of {requested} points per cell axis is too coarse; at least {minimum} are required")]
    GridTooCoarse { requested: usize, minimum: usize },

    #[error("no phase-matching solution: {0}")]
    NoSolution(String),

    #[error("empty feasible interval: {0}")]
    EmptyFeasibleInterval(String),

    #[error("period extraction failed: {0}")]
    PeriodExtraction(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("dispersion config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
