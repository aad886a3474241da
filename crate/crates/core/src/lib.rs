//! Higher Poisson brackets on resolvents of graded Poisson ideals.
//!
//! The crate builds the minimal-model resolvent of `S/I` slice by slice, runs
//! the perturbation recursion for the Maurer–Cartan element `π` in the
//! Schouten algebra of multiderivations, and evaluates the derived higher
//! brackets together with the obstruction tensors `Z`, `𝒜` and the
//! Maurer–Cartan residue.

#![allow(clippy::needless_range_loop)]

pub mod algebra;
pub mod catalog;
pub mod error;
pub mod linalg;
pub mod perturbation;
pub mod poisson;
pub mod resolvent;
pub mod scalar;
pub mod schouten;
pub mod verify;

pub use algebra::{parse, serialize, DerivativeSide, Monomial, Polynomial, Var, VariableTable};
pub use error::{Error, Result};
pub use scalar::Scalar;
