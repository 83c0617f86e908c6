//! Exact polynomial arithmetic over the rationals and matrices of polynomials.

mod matrix;
mod parse;
mod polynomial;
mod rational;
mod var;

pub use matrix::{DimensionError, PolyMatrix};
pub use parse::{identifiers, parse_polynomial, ParseError};
pub(crate) use parse::{lex, Parser, Tok};
pub use polynomial::{Monomial, Polynomial};
pub use rational::{ParseRationalError, Rational};
pub use var::{fresh_scope, natural_cmp, VarId, VarKind};
