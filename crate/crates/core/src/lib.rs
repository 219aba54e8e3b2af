//! Elliptic and stably elliptic elements of hermitian matrix Lie groups.
//!
//! The crate works with concrete matrix realizations of `sl(2,R)`, `sp(2n,R)`
//! and `su(p,q)`. It classifies group elements as elliptic or stably elliptic,
//! labels the connected components of the stably elliptic set by alcoves of the
//! restricted root system, and evaluates the invariant cone, the time function
//! `tau` and the homogeneous quasimorphism on these groups.

pub mod algebra;
pub mod components;
pub mod cone;
pub mod ellipticity;
pub mod error;
pub mod linalg;
pub mod quasimorphism;
pub mod sample;
pub mod spectral;
pub mod structure;
pub mod tol;

pub use algebra::{Algebra, AlgebraElement, Family, GroupElement, LieAlgebra};
pub use error::{Error, Result};
pub use tol::Tolerances;
