//! Exact-arithmetic shifted Poisson algebra of a finite-dimensional cochain
//! complex, tree-sum homotopy transfer of L-infinity structures, minimal
//! models with Chevalley-Eilenberg obstruction classes, gauge machinery, and
//! higher derived brackets.
//!
//! Everything algebraic runs over exact rationals; there is no floating point
//! anywhere and all identities are checked with zero tolerance.

pub mod bracket;
pub mod complex;
pub mod corpus;
pub mod equiv;
pub mod error;
pub mod json;
pub mod matrix;
pub mod oracle;
pub mod symalg;
pub mod transfer;
pub mod trees;

pub use bracket::{big_bracket, ShiftedLieContext, TPoly};
pub use complex::{koszul_sign, Complex, GradedMap, HomotopyEquivalence};
pub use error::{Error, Result};
pub use matrix::{Matrix, Rat};
pub use symalg::{Element, Generator, Monomial, Side};
