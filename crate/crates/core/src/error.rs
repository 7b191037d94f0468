use thiserror::Error;

/// Everything that can go wrong inside the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("null rotation requires lambda != 0")]
    ZeroLambda,
    #[error("similarity scale must be nonzero")]
    ZeroScale,
    #[error("curve-level operations require mu > 0, got {0}")]
    NonPositiveScale(f64),
    #[error("frame is not pseudo-orthonormal (Gram deviation {deviation:e})")]
    NotPseudoOrthonormal { deviation: f64 },
    #[error("frame is not positively oriented")]
    WrongOrientation,
    #[error("matrix is not a null rotation (structural deviation {deviation:e})")]
    NotNullRotation { deviation: f64 },
    #[error("tangent is not null at t={t} (|g'.g'|/|g'|^2 = {ratio:e})")]
    NotNullCurve { t: f64, ratio: f64 },
    #[error("acceleration is null or timelike at t={t}")]
    DegenerateAcceleration { t: f64 },
    #[error("derivatives are linearly dependent at t={t} (singular value ratio {ratio:e})")]
    NotCartan { t: f64, ratio: f64 },
    #[error("torsion vanishes at t={t}")]
    ZeroTorsion { t: f64 },
    #[error("parameter {t} outside [{min}, {max}]")]
    OutOfRange { t: f64, min: f64, max: f64 },
    #[error("need at least {need} samples, got {got}")]
    InsufficientSamples { got: usize, need: usize },
    #[error("parameter values must be strictly increasing (index {index})")]
    NonMonotone { index: usize },
    #[error("array lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("frame drift {drift:e} exceeds bound {bound:e} at sigma={sigma}")]
    DriftExceeded { drift: f64, bound: f64, sigma: f64 },
    #[error("sigma={sigma} is outside the shape-curvature domain or the curvature is not finite there")]
    DomainError { sigma: f64 },
    #[error("quadrature weight overflowed at sigma={sigma}")]
    QuadratureError { sigma: f64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("signatures overlap by {overlap} but {required} is required")]
    InsufficientOverlap { overlap: f64, required: f64 },
    #[error("recovered similarity mismatches by {mismatch:e} (relative to curve scale)")]
    RecoveryInconsistent { mismatch: f64 },
}

impl Error {
    /// Stable machine-readable name, used by the CLI error line.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NonFinite(_) => "NonFinite",
            Error::ZeroLambda => "ZeroLambda",
            Error::ZeroScale => "ZeroScale",
            Error::NonPositiveScale(_) => "NonPositiveScale",
            Error::NotPseudoOrthonormal { .. } => "NotPseudoOrthonormal",
            Error::WrongOrientation => "WrongOrientation",
            Error::NotNullRotation { .. } => "NotNullRotation",
            Error::NotNullCurve { .. } => "NotNullCurve",
            Error::DegenerateAcceleration { .. } => "DegenerateAcceleration",
            Error::NotCartan { .. } => "NotCartan",
            Error::ZeroTorsion { .. } => "ZeroTorsion",
            Error::OutOfRange { .. } => "OutOfRange",
            Error::InsufficientSamples { .. } => "InsufficientSamples",
            Error::NonMonotone { .. } => "NonMonotone",
            Error::LengthMismatch(..) => "LengthMismatch",
            Error::DriftExceeded { .. } => "DriftExceeded",
            Error::DomainError { .. } => "DomainError",
            Error::QuadratureError { .. } => "QuadratureError",
            Error::InvalidParams(_) => "InvalidParams",
            Error::InsufficientOverlap { .. } => "InsufficientOverlap",
            Error::RecoveryInconsistent { .. } => "RecoveryInconsistent",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
