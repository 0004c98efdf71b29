use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ray {index} is not primitive (gcd of entries != 1) or is zero")]
    NonPrimitiveRay { index: usize },
    #[error("cone {cone:?} has linearly dependent generators")]
    NotSimplicial { cone: Vec<usize> },
    #[error("cones {first:?} and {second:?} do not meet along a common face")]
    FaceConditionViolated { first: Vec<usize>, second: Vec<usize> },
    #[error("ray {index} is listed twice")]
    DuplicateRay { index: usize },
    #[error("cone {0:?} does not belong to the fan")]
    ConeNotInFan(Vec<usize>),
    #[error("image of source cone {0:?} is not contained in any target cone")]
    ConeImageNotContained(Vec<usize>),
    #[error("operation requires a smooth complete fan")]
    RequiresSmoothComplete,
    #[error("operation requires a smooth fan")]
    RequiresSmooth,
    #[error("operation requires a complete fan")]
    RequiresComplete,
    #[error("maximal cone {0:?} is not full-dimensional")]
    NonFullDimensionalCone(Vec<usize>),
    #[error("divisor is not effective (or is zero where a nonzero divisor is required)")]
    DNotEffective,
    #[error("filtration for ray {ray} is not decreasing")]
    NotDecreasing { ray: usize },
    #[error("filtrations admit no common adapted basis on cone {0:?}")]
    IncompatibleOnCone(Vec<usize>),
    #[error("objects live on different fans")]
    FanMismatch,
    #[error("restriction produced inconsistent data: {0}")]
    RestrictionInconsistent(String),
    #[error("bundle is not certified split")]
    NotCertifiedSplit,
    #[error("endomorphism has repeated eigenvalues")]
    EigenvaluesNotDistinct,
    #[error("eigenvalue blocks could not be resolved over Q")]
    IrrationalEigenvalues,
    #[error("stable base locus did not stabilize within k_max = {k_max}")]
    SblocNotStabilized { k_max: u32 },
    #[error("cd(X \\ D) is unavailable: support of D is not all rays and no assertion was given")]
    CdUnavailable,
    #[error("line bundle is not nef")]
    RequiresNef,
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("missing context: {0}")]
    MissingContext(String),
    #[error("factor dimension {0} is smaller than 2")]
    FactorTooSmall(usize),
    #[error("unknown catalog entry `{0}`")]
    UnknownCatalogEntry(String),
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("validation error in `{name}`: {reason}")]
    Validation { name: String, reason: String },
    #[error("line {line}: {source}")]
    Located { line: usize, source: Box<Error> },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
