//! Exact symbolic machinery for linear even and odd Poisson brackets built
//! from Lie algebra structure constants, and for the Grassmann differential
//! operators that close into a finite-dimensional Lie superalgebra.
//!
//! All arithmetic is exact over Q(√2, √3).

pub mod brackets;
pub mod error;
pub mod liealg;
pub mod operators;
pub mod scalars;
pub mod superpoly;

pub use error::{Error, Result};
pub use scalars::{Rational, Scalar};
pub use superpoly::{parse_expression, Family, Parity, SuperMonomial, SuperPolynomial, VariableId};
