//! Assembled, checked domain models.

use std::collections::{BTreeMap, BTreeSet};

use sha2::{Digest, Sha256};

use super::draft::{FactEntry, FactOrigin, KnowHowSource, ModelDraft, TaskSource};
use super::{
    CarrierRef, Interp, ModelError, Scale, ScaleKind, ScaleSystem, Signature, SymbolDecl, SymbolKind, VarShape,
    VariableDecl, MAX_ORDER,
};
use crate::formula::{check_formula, parse_formula, FormulaError, Schema, TypeError, TypedFormula};
use crate::value::{Name, Value};

/// What kind of defect an audit issue is; drives diagnostic codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum IssueClass {
    /// Off-scale or non-reified fact values.
    Pertinency,
    /// Reference to an undeclared symbol or scale.
    Undeclared,
    /// Any other structural or typing defect.
    Structure,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelIssue {
    pub class: IssueClass,
    pub error: ModelError,
    pub location: String,
    pub witness: Option<String>,
}

/// Name resolution over an unchecked draft.
pub struct DraftSchema<'a> {
    draft: &'a ModelDraft,
    enum_index: BTreeMap<Name, Name>,
}

impl<'a> DraftSchema<'a> {
    pub fn new(draft: &'a ModelDraft) -> Self {
        DraftSchema { draft, enum_index: enum_index(&draft.scales) }
    }
}

fn enum_index(scales: &ScaleSystem) -> BTreeMap<Name, Name> {
    let mut index = BTreeMap::new();
    for s in scales.iter() {
        if let ScaleKind::Enumerated(values) = s.kind() {
            for v in values {
                index.entry(v.clone()).or_insert_with(|| s.name().clone());
            }
        }
    }
    index
}

impl Schema for DraftSchema<'_> {
    fn order(&self) -> u8 {
        self.draft.order
    }

    fn symbol(&self, name: &str) -> Option<&SymbolDecl> {
        self.draft.signature.get(name)
    }

    fn variable(&self, name: &str) -> Option<&VariableDecl> {
        self.draft.variables.get(name)
    }

    fn scale(&self, name: &str) -> Option<&Scale> {
        self.draft.scales.get(name)
    }

    fn enum_scale(&self, value: &str) -> Option<Name> {
        self.enum_index.get(value).cloned()
    }
}

/// Parse and check one formula source against a draft.
pub(crate) fn compile_formula(
    index: usize,
    text: &str,
    schema: &impl Schema,
) -> Result<TypedFormula, (IssueClass, ModelError)> {
    let parsed = parse_formula(text, schema).map_err(|e| {
        let class = match e {
            FormulaError::UnknownIdentifier { .. } => IssueClass::Undeclared,
            _ => IssueClass::Structure,
        };
        (class, ModelError::TypecheckFailed { formula: text.to_string(), reason: e.to_string() })
    })?;
    check_formula(index, &parsed, schema).map_err(|e| {
        let class = match e {
            TypeError::Unknown(_) => IssueClass::Undeclared,
            _ => IssueClass::Structure,
        };
        (class, ModelError::TypecheckFailed { formula: text.to_string(), reason: e.to_string() })
    })
}

fn decl_class(e: &ModelError) -> IssueClass {
    match e {
        ModelError::UnknownScale { .. } | ModelError::UnknownSymbol(_) => IssueClass::Undeclared,
        _ => IssueClass::Structure,
    }
}

/// Check every component of a draft and report all defects found, in
/// check order: order, names, declarations, variables, facts, formulas.
pub fn audit_draft(draft: &ModelDraft) -> Vec<ModelIssue> {
    let mut issues = Vec::new();
    let mut push = |class, error, location: String, witness: Option<String>| {
        issues.push(ModelIssue { class, error, location, witness });
    };
    if draft.order == 0 || draft.order > MAX_ORDER {
        push(IssueClass::Structure, ModelError::OrderOutOfRange(draft.order), "model".into(), None);
        return issues;
    }

    // Scale, symbol, variable and enumerated-value names are pairwise disjoint.
    let mut seen: BTreeSet<Name> = BTreeSet::new();
    let mut claim = |n: &Name, what: &str, push: &mut dyn FnMut(IssueClass, ModelError, String, Option<String>)| {
        if !seen.insert(n.clone()) {
            push(IssueClass::Structure, ModelError::NameClash(n.clone()), format!("{what} {n}"), None);
        }
    };
    for s in draft.scales.iter() {
        claim(s.name(), "scale", &mut push);
    }
    for s in draft.scales.iter() {
        if let ScaleKind::Enumerated(values) = s.kind() {
            for v in values {
                claim(v, "value", &mut push);
            }
        }
    }
    for d in draft.signature.symbols() {
        claim(&d.name, "symbol", &mut push);
    }
    for v in draft.variables.values() {
        claim(&v.name, "variable", &mut push);
    }

    for d in draft.signature.symbols() {
        let location = format!("symbol {}", d.name);
        if d.layer > draft.order {
            push(
                IssueClass::Structure,
                ModelError::LayerBeyondOrder { symbol: d.name.clone(), layer: d.layer, order: draft.order },
                location.clone(),
                None,
            );
        }
        if let Err(e) = d.check_form().and_then(|_| d.check_refs(&draft.scales)) {
            push(decl_class(&e), e, location, None);
        }
    }
    for v in draft.variables.values() {
        if let Err(e) = v.check(&draft.scales, draft.order) {
            push(decl_class(&e), e, format!("variable {}", v.name), None);
        }
    }

    let mut tables: BTreeMap<(Name, Vec<Value>), Option<Value>> = BTreeMap::new();
    for fact in &draft.facts {
        let location = format!("fact {}", fact.describe());
        let witness = Some(fact.describe());
        let Some(decl) = draft.signature.get(&fact.symbol) else {
            push(IssueClass::Undeclared, ModelError::UnknownSymbol(fact.symbol.clone()), location, witness);
            continue;
        };
        if decl.layer == 1 || fact.level == 1 {
            push(IssueClass::Structure, ModelError::FactAtLevelOne(fact.symbol.clone()), location, witness);
            continue;
        }
        let not_pertinent = |reason: String| ModelError::PertinencyFailed { fact: fact.describe(), reason };
        if decl.layer != fact.level {
            let reason = format!("`{}` is declared at layer {}, not {}", decl.name, decl.layer, fact.level);
            push(IssueClass::Structure, not_pertinent(reason), location, witness);
            continue;
        }
        let shape_ok = match decl.kind {
            SymbolKind::Const => fact.args.is_empty() && fact.value.is_some(),
            SymbolKind::Func => fact.args.len() == decl.arity() && fact.value.is_some(),
            SymbolKind::Pred => fact.args.len() == decl.arity() && fact.value.is_none(),
        };
        if !shape_ok {
            let reason = format!("does not match the declaration `{}`", decl.describe());
            push(IssueClass::Structure, not_pertinent(reason), location, witness);
            continue;
        }
        let positions = decl.args.iter().zip(&fact.args).chain(decl.result.iter().zip(fact.value.iter()));
        let mut pertinent = true;
        for (carrier, value) in positions {
            if let Err(reason) = value_fits(draft, carrier, value) {
                push(IssueClass::Pertinency, not_pertinent(reason), location.clone(), witness.clone());
                pertinent = false;
                break;
            }
        }
        if !pertinent {
            continue;
        }
        let key = (fact.symbol.clone(), fact.args.clone());
        match tables.get(&key) {
            Some(previous) if *previous != fact.value => {
                let reason = "the function already maps these arguments to another value".to_string();
                push(IssueClass::Pertinency, not_pertinent(reason), location, witness);
            }
            _ => {
                tables.insert(key, fact.value.clone());
            }
        }
    }

    let schema = DraftSchema::new(draft);
    for (i, f) in draft.formulas.iter().enumerate() {
        if let Err((class, e)) = compile_formula(i, &f.text, &schema) {
            push(class, e, format!("formula {}", i + 1), Some(f.text.clone()));
        }
    }
    issues
}

/// Whether `value` belongs to the carrier of an argument or result position.
fn value_fits(draft: &ModelDraft, carrier: &CarrierRef, value: &Value) -> Result<(), String> {
    match carrier {
        CarrierRef::Scale(s) => {
            let scale = draft.scales.get(s).ok_or_else(|| format!("scale `{s}` does not exist"))?;
            if scale.contains(value) {
                Ok(())
            } else {
                Err(format!("{value} is not on scale {s}"))
            }
        }
        CarrierRef::Symbols(j) => {
            let name = match value {
                Value::Sym(n) | Value::Enum(n) => n,
                Value::Num(_) => return Err(format!("{value} is not a reified symbol")),
            };
            match draft.signature.get(name) {
                Some(d) if d.layer <= *j => Ok(()),
                _ => Err(format!("{value} is not a reified symbol of layer <= {j}")),
            }
        }
    }
}

/// An immutable, fully checked domain model.
#[derive(Clone, Debug)]
pub struct DomainModel {
    draft: ModelDraft,
    enum_index: BTreeMap<Name, Name>,
    facts: BTreeMap<Name, Interp>,
    origins: BTreeMap<(Name, Vec<Value>), FactOrigin>,
    formulas: Vec<TypedFormula>,
    hash: String,
}

/// Check a draft and build the model; fails with the first defect found.
pub fn assemble(mut draft: ModelDraft) -> Result<DomainModel, ModelError> {
    normalize_facts(&mut draft);
    if let Some(issue) = audit_draft(&draft).into_iter().next() {
        return Err(issue.error);
    }
    let schema = DraftSchema::new(&draft);
    let formulas = draft
        .formulas
        .iter()
        .enumerate()
        .map(|(i, f)| compile_formula(i, &f.text, &schema).map_err(|(_, e)| e))
        .collect::<Result<Vec<_>, _>>()?;
    let enum_index = enum_index(&draft.scales);
    let mut facts: BTreeMap<Name, Interp> = BTreeMap::new();
    let mut origins = BTreeMap::new();
    for d in draft.signature.symbols().filter(|d| d.layer != 1) {
        if d.kind == SymbolKind::Func {
            facts.insert(d.name.clone(), Interp::Func(BTreeMap::new()));
        } else if d.kind == SymbolKind::Pred {
            facts.insert(d.name.clone(), Interp::Pred(BTreeSet::new()));
        }
    }
    for fact in &draft.facts {
        match facts.get_mut(&fact.symbol) {
            Some(Interp::Func(t)) => {
                t.insert(fact.args.clone(), fact.value.clone().expect("checked"));
            }
            Some(Interp::Pred(t)) => {
                t.insert(fact.args.clone());
            }
            _ => {
                facts.insert(fact.symbol.clone(), Interp::Const(fact.value.clone().expect("checked")));
            }
        }
        if let Some(o) = &fact.origin {
            origins.insert((fact.symbol.clone(), fact.args.clone()), o.clone());
        }
    }
    let hash = hex::encode(Sha256::digest(crate::workspace::save_draft(&draft).as_bytes()));
    let model = DomainModel { draft, enum_index, facts, origins, formulas, hash };
    for task in model.draft.tasks.values() {
        crate::solver::TaskSpec::from_source(&model, task)
            .map_err(|e| ModelError::BadTask { task: task.name.clone(), reason: e.to_string() })?;
    }
    Ok(model)
}

/// Resolve identifiers in positions whose carrier is a symbol domain, and
/// sort facts into a canonical order.
fn normalize_facts(draft: &mut ModelDraft) {
    let signature = &draft.signature;
    for fact in &mut draft.facts {
        let Some(decl) = signature.get(&fact.symbol) else { continue };
        let positions = decl.args.iter().zip(fact.args.iter_mut()).chain(decl.result.iter().zip(fact.value.iter_mut()));
        for (carrier, value) in positions {
            if let (CarrierRef::Symbols(_), Value::Enum(n)) = (carrier, &*value) {
                *value = Value::Sym(n.clone());
            }
        }
    }
}

/// A level's carrier: scale values, then reified symbols by name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CarrierSet {
    pub level: u8,
    pub values: Vec<Value>,
}

impl DomainModel {
    pub fn draft(&self) -> &ModelDraft {
        &self.draft
    }

    pub fn into_draft(self) -> ModelDraft {
        self.draft
    }

    pub fn order(&self) -> u8 {
        self.draft.order
    }

    pub fn scales(&self) -> &ScaleSystem {
        &self.draft.scales
    }

    pub fn signature(&self) -> &Signature {
        &self.draft.signature
    }

    pub fn variables(&self) -> &BTreeMap<Name, VariableDecl> {
        &self.draft.variables
    }

    pub fn formulas(&self) -> &[TypedFormula] {
        &self.formulas
    }

    pub fn sources(&self) -> &BTreeMap<Name, KnowHowSource> {
        &self.draft.sources
    }

    pub fn tasks(&self) -> &BTreeMap<Name, TaskSource> {
        &self.draft.tasks
    }

    pub fn fact_entries(&self) -> &[FactEntry] {
        &self.draft.facts
    }

    /// Content hash of the canonical serialization.
    pub fn hash(&self) -> &str {
        &self.hash
    }

    /// Stored interpretation of a level-0 or level-≥2 symbol.
    pub fn fact(&self, symbol: &str) -> Option<&Interp> {
        self.facts.get(symbol)
    }

    pub fn origin(&self, symbol: &str, args: &[Value]) -> Option<&FactOrigin> {
        self.origins.get(&(crate::value::name(symbol), args.to_vec()))
    }

    /// Know-how table that introduced `symbol`, if any.
    pub fn source_of(&self, symbol: &str) -> Option<&KnowHowSource> {
        self.draft.sources.values().find(|s| s.symbols.iter().any(|n| n.as_ref() == symbol))
    }

    /// Level-1 symbols (the unknowns), by name.
    pub fn sigma1(&self) -> impl Iterator<Item = &SymbolDecl> {
        self.draft.signature.layer(1).into_iter().flat_map(|l| l.symbols.values())
    }

    pub fn carrier_of(&self, level: u8) -> Result<CarrierSet, ModelError> {
        if level > self.order() {
            return Err(ModelError::LevelOutOfRange { level, order: self.order() });
        }
        let mut values = Vec::new();
        let mut seen = BTreeSet::new();
        for s in self.scales().iter() {
            for v in s.values() {
                if seen.insert(v.clone()) {
                    values.push(v);
                }
            }
        }
        let mut symbols: Vec<&Name> = Vec::new();
        if level >= 1 {
            symbols.extend(self.reified_objects());
        }
        for l in 1..level {
            if let Some(layer) = self.signature().layer(l) {
                symbols.extend(layer.symbols.keys());
            }
        }
        symbols.sort();
        values.extend(symbols.into_iter().map(|n| Value::Sym(n.clone())));
        Ok(CarrierSet { level, values })
    }

    fn reified_objects(&self) -> impl Iterator<Item = &Name> {
        self.signature()
            .layer(0)
            .into_iter()
            .flat_map(|l| l.symbols.values())
            .filter(|d| d.kind == SymbolKind::Const)
            .map(|d| &d.name)
    }

    /// Values a variable ranges over, in deterministic order. Higher-order
    /// variables range over shape-matching Σ⁰ object constants and Σ¹..Σᵏ symbols.
    pub fn variable_range(&self, var: &VariableDecl) -> Vec<Value> {
        match &var.shape {
            VarShape::Scale(s) => self.scales().get(s).map(Scale::values).unwrap_or_default(),
            VarShape::Symbol(shape) => {
                let mut out: Vec<Value> = self
                    .signature()
                    .symbols()
                    .filter(|d| {
                        let level_ok = (1..=var.order).contains(&d.layer) || (d.layer == 0 && d.kind == SymbolKind::Const);
                        level_ok && d.shape() == *shape
                    })
                    .map(|d| Value::Sym(d.name.clone()))
                    .collect();
                out.sort();
                out
            }
        }
    }

    /// Values of a carrier position (scale values, or reified symbols).
    pub fn carrier_values(&self, carrier: &CarrierRef) -> Vec<Value> {
        match carrier {
            CarrierRef::Scale(s) => self.scales().get(s).map(Scale::values).unwrap_or_default(),
            CarrierRef::Symbols(j) => {
                let mut out: Vec<Value> = self
                    .signature()
                    .symbols()
                    .filter(|d| d.layer <= *j)
                    .map(|d| Value::Sym(d.name.clone()))
                    .collect();
                out.sort();
                out
            }
        }
    }

    /// Parse a value written as text against a carrier (`12`, `carbon_steel`,
    /// `rec_angle`).
    pub fn resolve_value(&self, carrier: &CarrierRef, text: &Value) -> Value {
        match (carrier, text) {
            (CarrierRef::Symbols(_), Value::Enum(n)) => Value::Sym(n.clone()),
            _ => text.clone(),
        }
    }
}

impl Schema for DomainModel {
    fn order(&self) -> u8 {
        self.draft.order
    }

    fn symbol(&self, name: &str) -> Option<&SymbolDecl> {
        self.draft.signature.get(name)
    }

    fn variable(&self, name: &str) -> Option<&VariableDecl> {
        self.draft.variables.get(name)
    }

    fn scale(&self, name: &str) -> Option<&Scale> {
        self.draft.scales.get(name)
    }

    fn enum_scale(&self, value: &str) -> Option<Name> {
        self.enum_index.get(value).cloned()
    }
}
