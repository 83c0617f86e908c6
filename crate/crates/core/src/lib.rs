//! Synthesis of simple numeric loops from polynomial equality invariants.
//!
//! The unknown loop is modelled as a first-order linear recurrence system
//! `X_{n+1} = B X_n, X_0 = A` with symbolic `A` and `B`. Fixing the
//! multiplicities of the eigenvalues of `B` yields a symbolic closed form,
//! and the requirement that the invariant holds for every `n` becomes a
//! finite set of polynomial equations and disequations over the unknowns.
//! That constraint problem is handed to an SMT solver; every model is turned
//! back into a concrete loop and checked by exact unrolling.
//!
//! Module map:
//!
//! - [`poly`]: exact polynomials, matrices, characteristic polynomials.
//! - [`recurrence`]: recurrence and closed-form templates, partitions, permutations.
//! - [`pcp`]: the constraint problem and its clause families.
//! - [`smt`]: SMT-LIB encoding, solver processes, model parsing.
//! - [`verify`]: the exact unrolling oracle.
//! - [`synth`]: the search over configurations.
//! - [`cli`]: invariant syntax, rendering and the command-line front end.

pub mod cli;
pub mod pcp;
pub mod poly;
pub mod recurrence;
pub mod smt;
pub mod synth;
pub mod verify;

pub use poly::{Monomial, PolyMatrix, Polynomial, Rational, VarId, VarKind};
