//! The fact master: know-how tables, their compilation into level-2 facts
//! and bridge formulas, and decision feedback.

mod compile;
mod table;

pub use compile::{
    add_facts, bridge_variable, compile_knowhow, ingest_feedback, knowhow_symbol, precedent_symbol, DecisionRecord,
    DeltaSummary, KnowHowBinding, KnowHowError, ModelDelta, VERDICT_SCALE,
};
pub use table::{Column, KnowHowTable, TableError};
