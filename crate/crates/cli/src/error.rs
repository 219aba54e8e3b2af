use elliptica_core::Error;
use std::fmt;

/// Command failure, carrying the process exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Malformed input or an element outside the command's domain. Exit 1.
    Invalid(String),
    /// The answer changes under perturbations at tolerance level. Exit 2.
    Boundary(String),
    /// Anything else. Exit 3.
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Boundary(_) => 2,
            CliError::Failed(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(m) => write!(f, "invalid input: {m}"),
            CliError::Boundary(m) => write!(f, "boundary unstable: {m}"),
            CliError::Failed(m) => write!(f, "failed: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::BoundaryUnstable(_) => CliError::Boundary(e.to_string()),
            Error::Invalid(_)
            | Error::NotInAlgebra { .. }
            | Error::GroupRelation { .. }
            | Error::DescriptorMismatch
            | Error::Unsupported(_)
            | Error::EmptyAlcove
            | Error::NotInLattice
            | Error::NotElliptic
            | Error::OutsideBasic => CliError::Invalid(e.to_string()),
            _ => CliError::Failed(e.to_string()),
        }
    }
}
