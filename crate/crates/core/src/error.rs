use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} index {index} out of range")]
    IndexOutOfRange { what: &'static str, index: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("degenerate symbol: rho = sqrt(|xi|^2 + mu^2) vanishes")]
    DegenerateSymbol,

    #[error("normal vector is not unit length (|nu| = {norm})")]
    NonUnitNormal { norm: f64 },

    #[error("frame is not orthonormal and right-handed (deviation {deviation:e})")]
    NonOrthonormalFrame { deviation: f64 },

    #[error("energy {energy} lies outside the open gap ({lower}, {upper})")]
    OutsideGap { energy: f64, lower: f64, upper: f64 },

    #[error("decay rate vanishes at the gap edge (energy {energy})")]
    GapEdge { energy: f64 },

    #[error("invalid surface: {0}")]
    InvalidSurface(String),

    #[error("empty sample set")]
    EmptySamples,

    #[error("declared partial-limit set is empty")]
    EmptyLimitSet,

    #[error("interaction limit missing at infinity direction {index}")]
    MissingGammaLimit { index: usize },

    #[error("ill-conditioned transmission constraint (condition number {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("eigensolver failure: {0}")]
    EigenSolver(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
