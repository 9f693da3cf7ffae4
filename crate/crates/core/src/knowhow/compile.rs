//! Compilation of know-how tables and decision records into model deltas.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::table::KnowHowTable;
use crate::formula::Schema;
use crate::model::{
    assemble, CarrierRef, DomainModel, FactEntry, FactOrigin, FormulaSource, KnowHowSource, ModelError, Scale,
    ScaleKind, SymbolDecl, SymbolKind, SymbolShape, VarShape, VariableDecl,
};
use crate::value::{name, Name, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KnowHowError {
    #[error("scale mismatch: {0}")]
    ScaleMismatch(String),
    #[error("table id `{0}` is already in the model")]
    DuplicateTableId(Name),
    #[error("result column `{0}` has no target constant")]
    UnboundResultColumn(Name),
    #[error("condition column `{column}` has no unambiguous input constant; candidates: {candidates:?}")]
    UnboundConditionColumn { column: Name, candidates: Vec<Name> },
    #[error("class `{class}` already bridges to `{existing}`, cannot also bridge to `{target}`")]
    ClassConflict { class: Name, existing: Name, target: Name },
    #[error("`{0}` is not a unary class of reified symbols")]
    NotAClass(Name),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Additions to a model, applied atomically by [`add_facts`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ModelDelta {
    pub scales: Vec<Scale>,
    pub symbols: Vec<SymbolDecl>,
    pub variables: Vec<VariableDecl>,
    pub facts: Vec<FactEntry>,
    pub formulas: Vec<String>,
    pub sources: Vec<KnowHowSource>,
}

impl ModelDelta {
    pub fn is_empty(&self) -> bool {
        self.scales.is_empty()
            && self.symbols.is_empty()
            && self.variables.is_empty()
            && self.facts.is_empty()
            && self.formulas.is_empty()
            && self.sources.is_empty()
    }

    /// Facts that record class membership (a class predicate over one symbol).
    pub fn class_memberships(&self) -> impl Iterator<Item = &FactEntry> {
        self.facts.iter().filter(|f| f.value.is_none() && f.args.len() == 1 && matches!(f.args[0], Value::Sym(_)))
    }

    pub fn summary(&self) -> DeltaSummary {
        DeltaSummary {
            scales: self.scales.iter().map(|s| s.name().clone()).collect(),
            symbols: self.symbols.iter().map(|s| s.name.clone()).collect(),
            facts: self.facts.len(),
            formulas: self.formulas.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeltaSummary {
    pub scales: Vec<Name>,
    pub symbols: Vec<Name>,
    pub facts: usize,
    pub formulas: Vec<String>,
}

/// Which Σ¹ constants a table talks about.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KnowHowBinding {
    /// Result column → output constant. Every result column needs one.
    pub results: BTreeMap<Name, Name>,
    /// Condition column → input constant. Missing entries resolve to the
    /// only Σ¹ constant on the column's scale.
    pub conditions: BTreeMap<Name, Name>,
}

impl KnowHowBinding {
    /// The bindings a table file declares, split by column role.
    pub fn declared(table: &KnowHowTable) -> Self {
        let role = |cols: &[super::table::Column]| -> BTreeMap<Name, Name> {
            cols.iter().filter_map(|c| table.bind.get(&c.name).map(|t| (c.name.clone(), t.clone()))).collect()
        };
        KnowHowBinding { results: role(&table.results), conditions: role(&table.conditions) }
    }

    pub fn results(pairs: &[(&str, &str)]) -> Self {
        KnowHowBinding {
            results: pairs.iter().map(|(c, t)| (name(c), name(t))).collect(),
            conditions: BTreeMap::new(),
        }
    }
}

pub fn knowhow_symbol(table: &str, column: &str) -> Name {
    name(&format!("kh_{table}_{column}"))
}

pub fn bridge_variable(class: &str, target: &str) -> Name {
    name(&format!("kh_f_{class}_{target}"))
}

fn sigma1_constant<'m>(model: &'m DomainModel, symbol: &str) -> Option<&'m SymbolDecl> {
    model.symbol(symbol).filter(|d| d.layer == 1 && d.kind == SymbolKind::Const)
}

fn result_scale(d: &SymbolDecl) -> Option<&Name> {
    match d.result.as_ref()? {
        CarrierRef::Scale(s) => Some(s),
        CarrierRef::Symbols(_) => None,
    }
}

fn check_value(model: &DomainModel, scale: &Name, v: &Value, at: &str) -> Result<(), KnowHowError> {
    let s = model
        .scales()
        .get(scale)
        .ok_or_else(|| KnowHowError::ScaleMismatch(format!("{at}: scale `{scale}` does not exist")))?;
    if s.contains(v) {
        Ok(())
    } else {
        Err(KnowHowError::ScaleMismatch(format!("{at}: {v} is not on scale {scale}")))
    }
}

/// Compile a table into level-2 symbols, row facts, class memberships and
/// (once per class and target) the order-2 bridge formula
/// `Class(f^2) -> f^2(inputs...) = target`.
pub fn compile_knowhow(
    model: &DomainModel,
    table: &KnowHowTable,
    binding: &KnowHowBinding,
    class: &str,
) -> Result<ModelDelta, KnowHowError> {
    if model.sources().contains_key(&table.id) {
        return Err(KnowHowError::DuplicateTableId(table.id.clone()));
    }
    table.check_rows().map_err(|e| KnowHowError::ScaleMismatch(e.to_string()))?;
    let class = name(class);
    let mut delta = ModelDelta::default();

    // Inputs for the condition columns.
    let mut inputs = Vec::new();
    for col in &table.conditions {
        let input = match binding.conditions.get(&col.name) {
            Some(i) => i.clone(),
            None => {
                let candidates: Vec<Name> = model
                    .sigma1()
                    .filter(|d| d.kind == SymbolKind::Const && result_scale(d) == Some(&col.scale))
                    .map(|d| d.name.clone())
                    .collect();
                match candidates.as_slice() {
                    [one] => one.clone(),
                    _ => return Err(KnowHowError::UnboundConditionColumn { column: col.name.clone(), candidates }),
                }
            }
        };
        let decl = sigma1_constant(model, &input)
            .ok_or_else(|| KnowHowError::ScaleMismatch(format!("condition target `{input}` is not a level-1 constant")))?;
        if result_scale(decl) != Some(&col.scale) {
            return Err(KnowHowError::ScaleMismatch(format!(
                "condition column `{}` is on {} but `{input}` is on {}",
                col.name,
                col.scale,
                decl.result.as_ref().map(ToString::to_string).unwrap_or_default()
            )));
        }
        inputs.push(input);
    }

    match model.symbol(&class) {
        Some(d) if !(d.layer == 2 && d.kind == SymbolKind::Pred && d.args == [CarrierRef::Symbols(2)]) => {
            return Err(KnowHowError::NotAClass(class));
        }
        Some(_) => {}
        None => delta.symbols.push(SymbolDecl::predicate(&class, 2, vec![CarrierRef::Symbols(2)])),
    }

    let arg_scales: Vec<CarrierRef> = table.conditions.iter().map(|c| CarrierRef::Scale(c.scale.clone())).collect();
    let mut symbols = Vec::new();
    for (ci, col) in table.results.iter().enumerate() {
        let target = binding.results.get(&col.name).ok_or_else(|| KnowHowError::UnboundResultColumn(col.name.clone()))?;
        let decl = sigma1_constant(model, target)
            .ok_or_else(|| KnowHowError::ScaleMismatch(format!("result target `{target}` is not a level-1 constant")))?;
        if result_scale(decl) != Some(&col.scale) {
            return Err(KnowHowError::ScaleMismatch(format!(
                "result column `{}` is on {} but `{target}` is on {}",
                col.name,
                col.scale,
                decl.result.as_ref().map(ToString::to_string).unwrap_or_default()
            )));
        }
        let symbol = knowhow_symbol(&table.id, &col.name);
        delta.symbols.push(SymbolDecl::function(&symbol, 2, arg_scales.clone(), CarrierRef::Scale(col.scale.clone())));
        for (ri, row) in table.rows.iter().enumerate() {
            let at = format!("table {} row {}", table.id, ri + 1);
            for (c, v) in table.conditions.iter().zip(row) {
                check_value(model, &c.scale, v, &at)?;
            }
            let v = &row[table.conditions.len() + ci];
            check_value(model, &col.scale, v, &at)?;
            delta.facts.push(FactEntry {
                level: 2,
                symbol: symbol.clone(),
                args: row[..table.conditions.len()].to_vec(),
                value: Some(v.clone()),
                origin: Some(FactOrigin { table: table.id.clone(), row: ri + 1 }),
            });
        }
        delta.facts.push(FactEntry {
            level: 2,
            symbol: class.clone(),
            args: vec![Value::Sym(symbol.clone())],
            value: None,
            origin: None,
        });
        symbols.push(symbol);

        // One bridge per (class, target); a class bridges each shape to one target.
        let shape = SymbolShape { kind: SymbolKind::Func, args: arg_scales.clone(), result: Some(CarrierRef::Scale(col.scale.clone())) };
        let bridge_of_shape = |v: &VariableDecl| v.order == 2 && v.shape == VarShape::Symbol(shape.clone());
        let prefix = format!("kh_f_{class}_");
        let existing = model
            .variables()
            .values()
            .chain(&delta.variables)
            .find(|v| v.name.starts_with(&prefix) && bridge_of_shape(v))
            .map(|v| v.name[prefix.len()..].to_string());
        match existing {
            Some(t) if t.as_str() == target.as_ref() => {}
            Some(t) => {
                return Err(KnowHowError::ClassConflict { class, existing: name(&t), target: target.clone() });
            }
            None => {
                let var = bridge_variable(&class, target);
                let args: Vec<&str> = inputs.iter().map(|n| n.as_ref()).collect();
                let call = if args.is_empty() { format!("{var}^2") } else { format!("{var}^2({})", args.join(", ")) };
                delta.formulas.push(format!("{class}({var}^2) -> {call} = {target}"));
                delta.variables.push(VariableDecl::higher_order(&var, 2, shape));
            }
        }
    }
    delta.sources.push(KnowHowSource {
        id: table.id.clone(),
        title: table.title.clone(),
        usage: table.usage.clone(),
        provenance: table.provenance.clone(),
        symbols,
    });
    Ok(delta)
}

/// Apply a delta, producing a new model. The input model is untouched and
/// nothing is applied unless the whole result assembles.
pub fn add_facts(model: &DomainModel, delta: &ModelDelta) -> Result<DomainModel, KnowHowError> {
    let mut draft = model.draft().clone();
    for s in &delta.scales {
        match draft.scales.get(s.name()) {
            Some(existing) if existing == s => {}
            Some(_) => return Err(ModelError::DuplicateScale(s.name().clone()).into()),
            None => draft.scales.insert(s.clone())?,
        }
    }
    for d in &delta.symbols {
        if draft.signature.get(&d.name).is_some() || draft.variables.contains_key(&d.name) {
            return Err(ModelError::NameClash(d.name.clone()).into());
        }
        draft.signature.insert_unchecked(d.clone());
    }
    for v in &delta.variables {
        match draft.variables.get(&v.name) {
            Some(existing) if existing == v => {}
            Some(_) => return Err(ModelError::NameClash(v.name.clone()).into()),
            None => {
                draft.variables.insert(v.name.clone(), v.clone());
            }
        }
    }
    draft.facts.extend(delta.facts.iter().cloned());
    for f in &delta.formulas {
        if !draft.formulas.iter().any(|g| g.text.trim() == f.trim()) {
            draft.formulas.push(FormulaSource::new(f.clone()));
        }
    }
    for s in &delta.sources {
        if draft.sources.contains_key(&s.id) {
            return Err(KnowHowError::DuplicateTableId(s.id.clone()));
        }
        draft.sources.insert(s.id.clone(), s.clone());
    }
    draft.order = draft.order.max(delta.symbols.iter().map(|d| d.layer).max().unwrap_or(0));
    Ok(assemble(draft)?)
}

/// A decision taken with the system and the user's verdict on it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionRecord {
    pub task: Name,
    pub inputs: BTreeMap<Name, Value>,
    pub outputs: BTreeMap<Name, Value>,
    pub accepted: bool,
    /// Seconds since the Unix epoch.
    #[serde(default)]
    pub timestamp: u64,
    #[serde(default)]
    pub comment: String,
}

pub const VERDICT_SCALE: &str = "Verdict";

pub fn precedent_symbol(task: &str) -> Name {
    name(&format!("precedent_{task}"))
}

/// Decompose a decision into one tuple of the task's precedent relation
/// `precedent_<task>(inputs..., outputs..., verdict)`. Never emits formulas.
pub fn ingest_feedback(model: &DomainModel, record: &DecisionRecord) -> Result<ModelDelta, KnowHowError> {
    let mut delta = ModelDelta::default();
    let verdict = Scale::new(VERDICT_SCALE, ScaleKind::Enumerated(vec![name("accepted"), name("rejected")]), None)?;
    if model.scales().get(VERDICT_SCALE).is_none_or(|s| *s != verdict) {
        delta.scales.push(verdict);
    }
    let mut carriers = Vec::new();
    let mut args = Vec::new();
    for (symbol, v) in record.inputs.iter().chain(&record.outputs) {
        let decl = model.symbol(symbol).filter(|d| d.layer <= 1 && d.kind == SymbolKind::Const).ok_or_else(|| {
            ModelError::PertinencyFailed {
                fact: format!("{symbol} = {v}"),
                reason: format!("`{symbol}` is not an object constant of layer 0 or 1"),
            }
        })?;
        let carrier = decl.result.clone().expect("constants have a result");
        let v = model.resolve_value(&carrier, v);
        if !model.carrier_values(&carrier).contains(&v) {
            return Err(ModelError::PertinencyFailed {
                fact: format!("{symbol} = {v}"),
                reason: format!("{v} is not on {carrier}"),
            }
            .into());
        }
        carriers.push(carrier);
        args.push(v);
    }
    carriers.push(CarrierRef::Scale(name(VERDICT_SCALE)));
    args.push(Value::enumerated(if record.accepted { "accepted" } else { "rejected" }));
    let relation = precedent_symbol(&record.task);
    match model.symbol(&relation) {
        Some(d) if d.layer == 2 && d.kind == SymbolKind::Pred && d.args == carriers => {}
        Some(_) => return Err(ModelError::NameClash(relation).into()),
        None => delta.symbols.push(SymbolDecl::predicate(&relation, 2, carriers)),
    }
    delta.facts.push(FactEntry { level: 2, symbol: relation, args, value: None, origin: None });
    Ok(delta)
}
