//! Exact and floating-point computations for invariant hyper-Hermitian
//! geometry on Lie algebras: forms and metrics, Chevalley–Eilenberg
//! differentials, Hermitian and HKT structures, connections and curvature,
//! the 8-dimensional strong-HKT structure identities, and a catalog of
//! reference structures.

pub mod catalog;
pub mod check;
pub mod complexform;
pub mod curvature;
pub mod hermitian;
pub mod liealg;
pub mod linalg;
pub mod multilinear;
pub mod par;
pub mod quaternionic;
pub mod scalar;
pub mod structure8;
pub mod verify;

pub use scalar::{Exact, Float, Scalar};
