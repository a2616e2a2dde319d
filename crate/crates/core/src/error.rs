use thiserror::Error;

/// Errors raised by constructors and numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("the whole circle is not an admissible set")]
    WholeCircle,
    #[error("cantor depth {depth} makes arc lengths underflow ({length:e} < 1e-300)")]
    DepthUnderflow { depth: usize, length: f64 },
    #[error("sequence is not summable: {0}")]
    DivergentSequence(String),
    #[error("point lies on the set; its complementary component is undefined")]
    PointOnSet,
    #[error("untrusted regime: distance {distance:e} is below the trusted floor {floor:e}")]
    Untrusted { distance: f64, floor: f64 },
    #[error("quadrature did not converge (estimated error {error:e})")]
    NonConvergence { error: f64 },
    #[error("h does not satisfy the divergence condition: {0}")]
    GaugeIntegrable(String),
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, LabError>;
