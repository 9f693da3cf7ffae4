//! The algebraic data model: scales, layered signatures, interpretations,
//! carriers and assembled domain models.

mod domain;
mod draft;
mod error;
mod interp;
mod scale;
mod signature;

pub use domain::{assemble, audit_draft, CarrierSet, DomainModel, DraftSchema, IssueClass, ModelIssue};
pub use draft::{CriterionSource, FactEntry, FactOrigin, FormulaSource, KnowHowSource, ModelDraft, TaskSource};
pub use error::ModelError;
pub use interp::Interp;
pub(crate) use scale::quote;
pub use scale::{Scale, ScaleKind, ScaleSystem};
pub use signature::{CarrierRef, Signature, SignatureLayer, SymbolDecl, SymbolKind, SymbolShape, VarShape, VariableDecl};

/// Highest supported model order.
pub const MAX_ORDER: u8 = 3;
