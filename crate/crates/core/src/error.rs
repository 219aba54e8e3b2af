use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("elements belong to different algebras")]
    DescriptorMismatch,
    #[error("matrix is not in the algebra (residual {residual:.3e})")]
    NotInAlgebra { residual: f64 },
    #[error("matrix violates the group relations (residual {residual:.3e})")]
    GroupRelation { residual: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("input is too close to the boundary: {0}")]
    BoundaryUnstable(String),
    #[error("element is not elliptic")]
    NotElliptic,
    #[error("element is not in the basic component")]
    OutsideBasic,
    #[error("alcove is empty")]
    EmptyAlcove,
    #[error("vector is not in the lattice")]
    NotInLattice,
    #[error("the two routes disagree: {0}")]
    RouteDisagreement(String),
    #[error("ill-conditioned: {0}")]
    IllConditioned(String),
    #[error("curve step {index} is inconsistent (residual {residual:.3e})")]
    StepConsistency { index: usize, residual: f64 },
    #[error("no sign change on the search interval")]
    NoSignChange,
    #[error("invalid input: {0}")]
    Invalid(String),
}
