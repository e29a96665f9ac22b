use thiserror::Error;

/// Errors raised by the geometric and algebraic routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("vector is not lightlike (x·x = {0:e})")]
    NotLightlike(f64),
    #[error("lightlike vector is past-directed")]
    PastDirected,
    #[error("wedge generators are parallel")]
    ParallelGenerators,
    #[error("wedge is not in normal form W[ℓ₂₊, ℓ, d]")]
    NotNormalForm,
    #[error("wedges are not disjoint")]
    NotDisjoint,
    #[error("matrix is not a Lorentz transformation (deviation {0:e})")]
    NotLorentz(f64),
    #[error("element is not in the restricted group")]
    NotRestricted,
    #[error("1 − Λ is singular (condition number {0:e})")]
    SingularOneMinusLambda(f64),
    #[error("lightlike direction is not a generator of the wedge")]
    NotCharacteristicDirection,
    #[error("determinant {0} differs from 1")]
    NotUnimodular(String),
    #[error("hyperplane is not a boundary of the given wedge")]
    NotBoundary,
    #[error("image family direction is ambiguous")]
    AmbiguousFamilyDirection,
    #[error("image normals are degenerate (condition number {0:e})")]
    DegenerateNormals(f64),
    #[error("reconstructed map is not conformal (deviation {0:e})")]
    NotConformal(f64),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("oracle is inconsistent: {0}")]
    OracleInconsistent(String),
    #[error("oracle has no entry for the queried wedge")]
    OutOfDomain,
    #[error("sign of the image point is undetermined")]
    SignUndetermined,
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("dimension {0} exceeds the supported maximum")]
    DimensionTooLarge(usize),
    #[error("state vector is not cyclic and separating")]
    NotCyclicSeparating,
    #[error("family contains redundant members {0} and {1}")]
    RedundantMember(usize, usize),
    #[error("group closure exceeded {0} elements")]
    ClosureCapExceeded(usize),
    #[error("index set size {0} is too large for enumeration")]
    SizeTooLarge(usize),
    #[error("invalid permutation family: {0}")]
    InvalidFamily(String),
}

pub type Result<T> = std::result::Result<T, Error>;
