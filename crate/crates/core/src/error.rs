use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid element: {0}")]
    InvalidElement(String),
    #[error("invalid algebra instance: {0}")]
    InvalidInstance(String),
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("element with delay terms has no value at the point at infinity")]
    EvaluationAtInfinityUndefined,
    #[error("boundary point and element live on different domains")]
    DomainMismatch,
    #[error("sampled curves are on different grids")]
    GridMismatch,
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("curve passes through the origin (|f| = {modulus:e} at theta = {theta})")]
    CurveThroughZero { theta: f64, modulus: f64 },
    #[error("winding number could not be resolved near theta = {theta}")]
    NonResolvableWinding { theta: f64 },
    #[error("element is not invertible on the boundary (min |f| = {min_modulus:e})")]
    NotInvertible { min_modulus: f64 },
    #[error("almost-periodic part is not invertible (min |f_AP| = {min_modulus:e})")]
    ApNotInvertible { min_modulus: f64 },
    #[error("element vanishes on the circle of radius {0}")]
    NotInvertibleOnCircle(f64),
    #[error("annulus winding numbers did not stabilize: {0:?}")]
    IndexNotStabilized(Vec<i64>),
    #[error("index variant does not match the algebra instance")]
    VariantMismatch,
    #[error("coprime factorization carries no Bezout witnesses")]
    MissingWitness,
    #[error("factors are not coprime: {0}")]
    NotCoprime(String),
    #[error("Bezout system could not be solved: {0}")]
    SolveFailed(String),
    #[error("element is not a unit of the stable ring")]
    NotAUnit,
    #[error("spectral factorization failed: {0}")]
    SpectralFactorizationFailed(String),
    #[error("factor norm sqrt(|n|^2 + |d|^2) vanishes at theta = {theta}")]
    DegenerateDenominator { theta: f64 },
    #[error("factorization is not normalized (residual {0:e})")]
    NotNormalized(f64),
    #[error("controller does not stabilize the plant")]
    NotStabilizing,
}

pub type Result<T> = std::result::Result<T, Error>;
