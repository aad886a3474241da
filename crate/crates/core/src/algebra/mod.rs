//! Graded supercommutative polynomial arithmetic.

mod monomial;
mod parse;
mod polynomial;
mod var;

pub use monomial::{normalize_monomial, Derivative, Monomial};
pub use parse::{parse, parse_with_warnings, serialize};
pub use polynomial::{DerivativeSide, Polynomial};
pub use var::{Var, VariableDescriptor, VariableTable};
