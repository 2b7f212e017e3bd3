use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid window half-width {0}; must be at least 1")]
    InvalidWindow(usize),

    #[error("window mismatch: {left} vs {right}")]
    WindowMismatch { left: usize, right: usize },

    #[error("invalid coefficient {re}+{im}i: modulus must be < 1")]
    InvalidCoefficient { re: f64, im: f64 },

    #[error("index {0} outside the domain of this formula")]
    OutOfDomain(i64),

    #[error("model does not define a coefficient or coin at index {0}")]
    IncompleteModel(i64),

    #[error("phase at flat index {0} is not unimodular")]
    NonUnimodularPhase(i64),

    #[error("brute force refuses n = {n} (limit {limit}); use the density or transform engine")]
    BruteForceLimit { n: usize, limit: usize },

    #[error("path enumeration refuses n = {n} (limit {limit})")]
    EnumerationLimit { n: usize, limit: usize },

    #[error("walk reached the window boundary (mass {mass:e} at step {step}); enlarge the window")]
    LightConeViolation { step: usize, mass: f64 },

    #[error("probability {value:e} at r = {r} is below the positivity tolerance")]
    NegativeProbability { r: usize, value: f64 },

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("moment sequence is not positive definite at order {0}")]
    InvalidMeasure(usize),

    #[error("not enough coefficients: need {need}, have {have}")]
    TooFewCoefficients { need: usize, have: usize },
}

impl Error {
    pub(crate) fn coefficient(z: num_complex::Complex64) -> Self {
        Error::InvalidCoefficient { re: z.re, im: z.im }
    }
}
