use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ToricError {
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("fan is not complete: {0}")]
    NotComplete(String),
    #[error("cone {0} is not simplicial")]
    NotSimplicial(usize),
    #[error("not a fan: {0}")]
    NotAFan(String),
    #[error("coefficient {value} on ray {ray} is out of range for this mode")]
    CoefficientOutOfRange { ray: usize, value: String },
    #[error("pair is not projective")]
    NotProjective,
    #[error("vector lies outside the support of the fan")]
    OutsideSupport,
    #[error("cone {0:?} is not a cone of the fan")]
    ConeNotInFan(Vec<usize>),
    #[error("divisor has a negative coefficient on ray {0}")]
    NegativeDivisor(usize),
    #[error("divisor is not nef")]
    NotNef,
    #[error("divisor is not ample")]
    NotAmple,
    #[error("divisor is not big")]
    NotBig,
    #[error("pair is not klt: {0}")]
    NotKlt(String),
    #[error("the region is unbounded")]
    Unbounded,
    #[error("point is not in the interior of the cone")]
    NotInterior,
    #[error("selected class has degree zero (flop)")]
    ZeroDegree,
    #[error("selected class has positive degree")]
    PositiveDegree,
    #[error("selected wall is not an extremal class")]
    NotExtremal,
    #[error("budget of {0} steps exceeded")]
    BudgetExceeded(usize),
    #[error("operation requires pair mode")]
    WrongMode,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("hypothesis violated at index {0}")]
    HypothesisViolated(usize),
    #[error("difficulty vectors have different lengths")]
    LengthMismatch,
    #[error("unknown formula {0}")]
    UnknownFormula(String),
    #[error("parameter outside the formula's domain: {0}")]
    DomainError(String),
    #[error("value too large to represent: {0}")]
    Unrepresentable(String),
    #[error("not log Fano: {0}")]
    NotLogFano(String),
}

impl From<crate::geom::GeomError> for ToricError {
    fn from(e: crate::geom::GeomError) -> Self {
        match e {
            crate::geom::GeomError::RankMismatch { expected, found } => ToricError::RankMismatch { expected, found },
            crate::geom::GeomError::Unbounded => ToricError::Unbounded,
            crate::geom::GeomError::Empty => ToricError::Invalid("empty polytope".into()),
        }
    }
}

pub type Result<T> = std::result::Result<T, ToricError>;
