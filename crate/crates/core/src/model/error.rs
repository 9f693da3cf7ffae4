use thiserror::Error;

use crate::value::Name;

/// Errors raised while building or assembling a domain model.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("scale `{0}` is already defined")]
    DuplicateScale(Name),
    #[error("scale `{0}` has no values")]
    EmptyScale(Name),
    #[error("scale `{scale}` has bad bounds: {reason}")]
    BadBounds { scale: Name, reason: String },
    #[error("symbol `{symbol}` refers to unknown scale `{scale}`")]
    UnknownScale { symbol: Name, scale: Name },
    #[error("name `{0}` is already in use")]
    NameClash(Name),
    #[error("symbol `{symbol}` at layer {layer} refers to symbols of layer {referenced}")]
    ForwardLayerRef { symbol: Name, layer: u8, referenced: u8 },
    #[error("symbol `{symbol}`: {reason}")]
    BadDeclaration { symbol: Name, reason: String },
    #[error("symbol `{symbol}` is declared at layer {layer} but the model order is {order}")]
    LayerBeyondOrder { symbol: Name, layer: u8, order: u8 },
    #[error("model order {0} is outside 1..={max}", max = crate::model::MAX_ORDER)]
    OrderOutOfRange(u8),
    #[error("variable `{name}`: {reason}")]
    BadVariable { name: Name, reason: String },
    #[error("interpretation supplied for level-1 symbol `{0}`; level-1 symbols are the unknowns")]
    FactAtLevelOne(Name),
    #[error("fact refers to undeclared symbol `{0}`")]
    UnknownSymbol(Name),
    #[error("formula `{formula}` does not typecheck: {reason}")]
    TypecheckFailed { formula: String, reason: String },
    #[error("fact `{fact}` is not pertinent: {reason}")]
    PertinencyFailed { fact: String, reason: String },
    #[error("task `{task}`: {reason}")]
    BadTask { task: Name, reason: String },
    #[error("level {level} is outside 0..={order}")]
    LevelOutOfRange { level: u8, order: u8 },
}
