//! Layered signatures: symbol declarations per abstraction level, plus the
//! declared higher-order variables.

use std::collections::BTreeMap;
use std::fmt;

use super::{ModelError, ScaleSystem};
use crate::value::{name, Name};

/// Sort of a symbol: objective (constant), functional or predicate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolKind {
    Const,
    Func,
    Pred,
}

impl SymbolKind {
    pub fn keyword(self) -> &'static str {
        match self {
            SymbolKind::Const => "const",
            SymbolKind::Func => "func",
            SymbolKind::Pred => "pred",
        }
    }
}

/// What an argument or result position ranges over.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CarrierRef {
    Scale(Name),
    /// Reified symbols declared at the given layer.
    Symbols(u8),
}

impl fmt::Display for CarrierRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CarrierRef::Scale(s) => f.write_str(s),
            CarrierRef::Symbols(j) => write!(f, "symbols {j}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolDecl {
    pub name: Name,
    pub layer: u8,
    pub kind: SymbolKind,
    pub args: Vec<CarrierRef>,
    pub result: Option<CarrierRef>,
}

impl SymbolDecl {
    pub fn constant(symbol: &str, layer: u8, result: CarrierRef) -> Self {
        SymbolDecl { name: name(symbol), layer, kind: SymbolKind::Const, args: vec![], result: Some(result) }
    }

    pub fn function(symbol: &str, layer: u8, args: Vec<CarrierRef>, result: CarrierRef) -> Self {
        SymbolDecl { name: name(symbol), layer, kind: SymbolKind::Func, args, result: Some(result) }
    }

    pub fn predicate(symbol: &str, layer: u8, args: Vec<CarrierRef>) -> Self {
        SymbolDecl { name: name(symbol), layer, kind: SymbolKind::Pred, args, result: None }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    /// Shape used to match against higher-order variable declarations.
    pub fn shape(&self) -> SymbolShape {
        SymbolShape { kind: self.kind, args: self.args.clone(), result: self.result.clone() }
    }

    /// Declaration text in model-file syntax, e.g. `func rec_angle(Material) : AngleDeg`.
    pub fn describe(&self) -> String {
        let mut out = format!("{} {}", self.kind.keyword(), self.name);
        if self.kind != SymbolKind::Const {
            let args: Vec<String> = self.args.iter().map(ToString::to_string).collect();
            out.push_str(&format!("({})", args.join(", ")));
        }
        if let Some(r) = &self.result {
            out.push_str(&format!(" : {r}"));
        }
        out
    }

    /// Structural checks that need no other context.
    pub fn check_form(&self) -> Result<(), ModelError> {
        let bad = |reason: &str| ModelError::BadDeclaration { symbol: self.name.clone(), reason: reason.into() };
        match self.kind {
            SymbolKind::Const if !self.args.is_empty() => Err(bad("object constants take no arguments")),
            SymbolKind::Const | SymbolKind::Func if self.result.is_none() => Err(bad("missing result carrier")),
            SymbolKind::Pred if self.result.is_some() => Err(bad("predicates have no result")),
            _ => Ok(()),
        }
    }

    /// Carrier references resolve and only cite permitted layers.
    ///
    /// Layers 0 and 1 may only cite strictly lower layers; fact layers (≥ 2)
    /// may also classify symbols of their own layer.
    pub fn check_refs(&self, scales: &ScaleSystem) -> Result<(), ModelError> {
        for r in self.args.iter().chain(self.result.iter()) {
            match r {
                CarrierRef::Scale(s) if !scales.contains(s) => {
                    return Err(ModelError::UnknownScale { symbol: self.name.clone(), scale: s.clone() })
                }
                CarrierRef::Symbols(j) => {
                    let allowed = if self.layer >= 2 { *j <= self.layer } else { *j < self.layer };
                    if !allowed {
                        return Err(ModelError::ForwardLayerRef {
                            symbol: self.name.clone(),
                            layer: self.layer,
                            referenced: *j,
                        });
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// Kind, argument carriers and result carrier of a symbol.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolShape {
    pub kind: SymbolKind,
    pub args: Vec<CarrierRef>,
    pub result: Option<CarrierRef>,
}

impl fmt::Display for SymbolShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let args: Vec<String> = self.args.iter().map(ToString::to_string).collect();
        match (self.kind, &self.result) {
            (SymbolKind::Const, Some(r)) => write!(f, "const {r}"),
            (SymbolKind::Func, Some(r)) => write!(f, "func({}) -> {r}", args.join(", ")),
            _ => write!(f, "pred({})", args.join(", ")),
        }
    }
}

/// Symbols of one abstraction level.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SignatureLayer {
    pub level: u8,
    pub symbols: BTreeMap<Name, SymbolDecl>,
}

/// All layers Σ⁰ … Σⁿ. Names are unique across layers, which keeps the
/// layers pairwise disjoint.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    layers: BTreeMap<u8, SignatureLayer>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare_symbol(&mut self, decl: SymbolDecl, scales: &ScaleSystem) -> Result<&SignatureLayer, ModelError> {
        decl.check_form()?;
        if self.get(&decl.name).is_some() || scales.contains(&decl.name) {
            return Err(ModelError::NameClash(decl.name.clone()));
        }
        decl.check_refs(scales)?;
        let level = decl.layer;
        let layer = self.layers.entry(level).or_insert_with(|| SignatureLayer { level, symbols: BTreeMap::new() });
        layer.symbols.insert(decl.name.clone(), decl);
        Ok(layer)
    }

    /// Insert without checks; used for drafts that are validated later.
    pub fn insert_unchecked(&mut self, decl: SymbolDecl) {
        let level = decl.layer;
        self.layers
            .entry(level)
            .or_insert_with(|| SignatureLayer { level, symbols: BTreeMap::new() })
            .symbols
            .insert(decl.name.clone(), decl);
    }

    pub fn remove(&mut self, symbol: &str) -> Option<SymbolDecl> {
        self.layers.values_mut().find_map(|l| l.symbols.remove(symbol))
    }

    pub fn get(&self, symbol: &str) -> Option<&SymbolDecl> {
        self.layers.values().find_map(|l| l.symbols.get(symbol))
    }

    pub fn layer(&self, level: u8) -> Option<&SignatureLayer> {
        self.layers.get(&level)
    }

    pub fn layers(&self) -> impl Iterator<Item = &SignatureLayer> {
        self.layers.values()
    }

    /// Every declaration, by layer then name.
    pub fn symbols(&self) -> impl Iterator<Item = &SymbolDecl> {
        self.layers.values().flat_map(|l| l.symbols.values())
    }
}

/// Range description of a declared variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VarShape {
    /// Order-1 variables range over one scale.
    Scale(Name),
    /// Higher-order variables range over reified symbols of this shape.
    Symbol(SymbolShape),
}

impl fmt::Display for VarShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarShape::Scale(s) => f.write_str(s),
            VarShape::Symbol(shape) => shape.fmt(f),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariableDecl {
    pub name: Name,
    pub order: u8,
    pub shape: VarShape,
}

impl VariableDecl {
    pub fn first_order(var: &str, scale: &str) -> Self {
        VariableDecl { name: name(var), order: 1, shape: VarShape::Scale(name(scale)) }
    }

    pub fn higher_order(var: &str, order: u8, shape: SymbolShape) -> Self {
        VariableDecl { name: name(var), order, shape: VarShape::Symbol(shape) }
    }

    pub fn symbol_shape(&self) -> Option<&SymbolShape> {
        match &self.shape {
            VarShape::Symbol(s) => Some(s),
            VarShape::Scale(_) => None,
        }
    }

    pub fn check(&self, scales: &ScaleSystem, model_order: u8) -> Result<(), ModelError> {
        let bad = |reason: String| ModelError::BadVariable { name: self.name.clone(), reason };
        if self.order == 0 || self.order > model_order {
            return Err(bad(format!("order {} is outside 1..={model_order}", self.order)));
        }
        match (&self.shape, self.order) {
            (VarShape::Scale(s), 1) => {
                if !scales.contains(s) {
                    return Err(ModelError::UnknownScale { symbol: self.name.clone(), scale: s.clone() });
                }
            }
            (VarShape::Symbol(shape), k) if k >= 2 => {
                for r in shape.args.iter().chain(shape.result.iter()) {
                    if let CarrierRef::Scale(s) = r {
                        if !scales.contains(s) {
                            return Err(ModelError::UnknownScale { symbol: self.name.clone(), scale: s.clone() });
                        }
                    }
                }
                let well_formed = match shape.kind {
                    SymbolKind::Const => shape.args.is_empty() && shape.result.is_some(),
                    SymbolKind::Func => shape.result.is_some(),
                    SymbolKind::Pred => shape.result.is_none(),
                };
                if !well_formed {
                    return Err(bad(format!("malformed shape `{shape}`")));
                }
            }
            (VarShape::Scale(_), _) => return Err(bad("higher-order variables need a symbol shape".into())),
            (VarShape::Symbol(_), _) => return Err(bad("order-1 variables range over a scale".into())),
        }
        Ok(())
    }

    pub fn describe(&self) -> String {
        format!("{} : order {} : {}", self.name, self.order, self.shape)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ScaleKind;

    fn scales() -> ScaleSystem {
        let mut s = ScaleSystem::new();
        s.define_scale("AngleDeg", ScaleKind::Integer { lo: 0, hi: 45, step: 1 }, None).unwrap();
        s.define_scale("Material", ScaleKind::Enumerated(vec![name("carbon_steel")]), None).unwrap();
        s
    }

    #[test]
    fn declares_constants_and_functions() {
        let scales = scales();
        let mut sig = Signature::new();
        let layer = sig
            .declare_symbol(SymbolDecl::constant("edge_angle", 1, CarrierRef::Scale(name("AngleDeg"))), &scales)
            .unwrap();
        assert_eq!(layer.symbols.len(), 1);
        let f = SymbolDecl::function("rec_angle", 2, vec![CarrierRef::Scale(name("Material"))], CarrierRef::Scale(name("AngleDeg")));
        let layer = sig.declare_symbol(f, &scales).unwrap();
        assert_eq!(layer.level, 2);
        assert_eq!(sig.get("rec_angle").unwrap().kind, SymbolKind::Func);
    }

    #[test]
    fn rejects_forward_layer_references() {
        let scales = scales();
        let mut sig = Signature::new();
        let f = SymbolDecl::function("f", 1, vec![CarrierRef::Symbols(1)], CarrierRef::Scale(name("AngleDeg")));
        assert!(matches!(sig.declare_symbol(f, &scales), Err(ModelError::ForwardLayerRef { .. })));
        let g = SymbolDecl::predicate("g", 2, vec![CarrierRef::Symbols(3)]);
        assert!(matches!(sig.declare_symbol(g, &scales), Err(ModelError::ForwardLayerRef { .. })));
        let class = SymbolDecl::predicate("Class", 2, vec![CarrierRef::Symbols(2)]);
        assert!(sig.declare_symbol(class, &scales).is_ok());
    }

    #[test]
    fn rejects_clashes_and_unknown_scales() {
        let scales = scales();
        let mut sig = Signature::new();
        let c = SymbolDecl::constant("x", 1, CarrierRef::Scale(name("AngleDeg")));
        sig.declare_symbol(c.clone(), &scales).unwrap();
        let mut again = c;
        again.layer = 2;
        assert!(matches!(sig.declare_symbol(again, &scales), Err(ModelError::NameClash(_))));
        let bad = SymbolDecl::constant("y", 1, CarrierRef::Scale(name("Nope")));
        assert!(matches!(sig.declare_symbol(bad, &scales), Err(ModelError::UnknownScale { .. })));
        let clash_scale = SymbolDecl::constant("Material", 1, CarrierRef::Scale(name("AngleDeg")));
        assert!(matches!(sig.declare_symbol(clash_scale, &scales), Err(ModelError::NameClash(_))));
    }

    #[test]
    fn malformed_declarations() {
        let d = SymbolDecl { name: name("p"), layer: 1, kind: SymbolKind::Pred, args: vec![], result: Some(CarrierRef::Symbols(0)) };
        assert!(d.check_form().is_err());
        let c = SymbolDecl { name: name("c"), layer: 1, kind: SymbolKind::Const, args: vec![CarrierRef::Symbols(0)], result: Some(CarrierRef::Symbols(0)) };
        assert!(c.check_form().is_err());
    }
}
