//! Quantifier-free higher-order formulas: syntax, text form and sort checking.

mod ast;
mod check;
mod parser;
mod render;

pub use ast::{ArithOp, Formula, Literal, RelOp, Term};
pub use check::{check_formula, check_objective, Sort, TFormula, TTerm, TypeError, TypedFormula};
pub use parser::{parse_formula, parse_formula_tokens, parse_term, parse_term_tokens, FormulaError};
pub use render::{render_formula, render_term};

use crate::model::{Scale, SymbolDecl, VariableDecl};
use crate::value::Name;

/// Name resolution needed to parse and check formulas.
pub trait Schema {
    fn order(&self) -> u8;
    fn symbol(&self, name: &str) -> Option<&SymbolDecl>;
    fn variable(&self, name: &str) -> Option<&VariableDecl>;
    fn scale(&self, name: &str) -> Option<&Scale>;
    /// The enumerated scale that contains `value`.
    fn enum_scale(&self, value: &str) -> Option<Name>;
}
