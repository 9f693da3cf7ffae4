//! A know-how knowledge-base engine over layered many-sorted algebras.
//!
//! A [`model::DomainModel`] stacks signature layers Σ⁰…Σⁿ over a system of
//! finite scales. Level-1 symbols are the unknowns of every task; level 0
//! and levels ≥ 2 carry stored facts (the know-how). Formulas are
//! quantifier-free and may use higher-order variables ranging over reified
//! symbols. A solution interprets the level-1 symbols so that every formula
//! is true under every variable assignment.
//!
//! [`solver::solve`] finds solutions by forward chaining and re-checks them;
//! [`semantics::oracle_solutions`] enumerates them by brute force.

pub mod demo;
pub mod formula;
pub mod knowhow;
pub mod lex;
pub mod model;
pub mod par;
pub mod semantics;
pub mod solver;
pub mod validation;
pub mod value;
pub mod workspace;
