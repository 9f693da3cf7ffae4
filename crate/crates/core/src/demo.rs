//! Desk-scale end-milling knowledge pack.
//!
//! A base model (scales, unknowns, a regime catalogue and the tasks `life`
//! and `time`) plus eleven know-how tables compiled on top of it, each
//! through its own order-2 bridge formula. The numbers are synthetic; the
//! pack exists to exercise the engine, not to advise on machining.

use thiserror::Error;

use crate::formula::Schema;
use crate::knowhow::{KnowHowBinding, KnowHowTable, TableError};
use crate::model::DomainModel;
use crate::value::{Name, Value};
use crate::workspace::{load_model, LoadError, Workspace, WorkspaceError};

pub const BASE_MODEL: &str = include_str!("../demo/base.model");

/// Table texts in compilation order.
pub const TABLES: [&str; 11] = [
    include_str!("../demo/rec_angle.table"),
    include_str!("../demo/helix.table"),
    include_str!("../demo/coating.table"),
    include_str!("../demo/coolant.table"),
    include_str!("../demo/substrate.table"),
    include_str!("../demo/speed.table"),
    include_str!("../demo/feed.table"),
    include_str!("../demo/engagement.table"),
    include_str!("../demo/depth.table"),
    include_str!("../demo/life.table"),
    include_str!("../demo/time.table"),
];

/// The unknowns a pack task takes as inputs.
pub const INPUTS: [&str; 3] = ["workpiece_material", "hardness_band", "flute_count"];

/// Named tasks shipped with the pack.
pub const TASKS: [&str; 2] = ["life", "time"];

#[derive(Debug, Error)]
pub enum DemoError {
    #[error("base model: {0}")]
    Base(#[from] LoadError),
    #[error("table {index}: {error}")]
    Table { index: usize, error: TableError },
    #[error("table `{0}` names no class")]
    NoClass(Name),
    #[error(transparent)]
    Workspace(#[from] WorkspaceError),
}

/// Load the base model and compile every table into it.
pub fn build_demo() -> Result<Workspace, DemoError> {
    let mut ws = Workspace::new(load_model(BASE_MODEL)?)?;
    for (index, text) in TABLES.iter().enumerate() {
        let table = KnowHowTable::parse(text).map_err(|error| DemoError::Table { index, error })?;
        let class = table.class.clone().ok_or_else(|| DemoError::NoClass(table.id.clone()))?;
        let binding = KnowHowBinding::declared(&table);
        ws.add_knowhow(table, &binding, &class)?;
    }
    Ok(ws)
}

/// Every combination of input values, in carrier order.
pub fn input_sweep(model: &DomainModel) -> Vec<Vec<(Name, Value)>> {
    let mut combos: Vec<Vec<(Name, Value)>> = vec![Vec::new()];
    for input in INPUTS {
        let Some(carrier) = model.symbol(input).and_then(|d| d.result.as_ref()) else { continue };
        let values = model.carrier_values(carrier);
        combos = combos
            .into_iter()
            .flat_map(|c| {
                values.iter().map(move |v| {
                    let mut next = c.clone();
                    next.push((crate::value::name(input), v.clone()));
                    next
                })
            })
            .collect();
    }
    combos
}
