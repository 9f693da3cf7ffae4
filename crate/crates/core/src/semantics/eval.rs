//! Three-valued evaluation of typed terms and formulas.

use std::cell::RefCell;
use std::collections::BTreeMap;

use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, Zero};

use super::Truth;
use crate::formula::{ArithOp, RelOp, Schema, TFormula, TTerm};
use crate::model::{DomainModel, Interp, SymbolKind};
use crate::value::{Name, Value};

/// An interpretation of (some of) the Σ¹ symbols, plus any Σ⁰ inputs.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Candidate {
    bindings: BTreeMap<Name, Interp>,
}

impl Candidate {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_bindings(bindings: BTreeMap<Name, Interp>) -> Self {
        Candidate { bindings }
    }

    pub fn bind(&mut self, symbol: Name, interp: Interp) {
        self.bindings.insert(symbol, interp);
    }

    pub fn bind_const(&mut self, symbol: Name, value: Value) {
        self.bindings.insert(symbol, Interp::Const(value));
    }

    pub fn unbind(&mut self, symbol: &str) {
        self.bindings.remove(symbol);
    }

    pub fn get(&self, symbol: &str) -> Option<&Interp> {
        self.bindings.get(symbol)
    }

    pub fn constant(&self, symbol: &str) -> Option<&Value> {
        self.bindings.get(symbol).and_then(Interp::as_const)
    }

    pub fn is_bound(&self, symbol: &str) -> bool {
        self.bindings.contains_key(symbol)
    }

    pub fn bindings(&self) -> &BTreeMap<Name, Interp> {
        &self.bindings
    }
}

/// Values of the free variables of one formula, in name order.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Assignment {
    pub bindings: Vec<(Name, Value)>,
}

impl Assignment {
    pub fn get(&self, var: &str) -> Option<&Value> {
        self.bindings.iter().find(|(n, _)| n.as_ref() == var).map(|(_, v)| v)
    }

    pub fn describe(&self) -> String {
        if self.bindings.is_empty() {
            return "{}".into();
        }
        let parts: Vec<String> = self.bindings.iter().map(|(n, v)| format!("{n} := {v}")).collect();
        format!("{{{}}}", parts.join(", "))
    }
}

/// One lookup made while evaluating, for explanations.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Access {
    /// A stored fact of level 0 or ≥ 2. For predicates `value` is `None`
    /// and `holds` records membership.
    Fact { symbol: Name, args: Vec<Value>, value: Option<Value>, holds: bool },
    /// A Σ¹ (or input Σ⁰) binding of the candidate.
    Binding { symbol: Name, args: Vec<Value>, value: Option<Value> },
}

/// Evaluation context: model facts, a candidate and optional access log.
pub struct Evaluator<'a> {
    model: &'a DomainModel,
    candidate: &'a Candidate,
    log: Option<&'a RefCell<Vec<Access>>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(model: &'a DomainModel, candidate: &'a Candidate) -> Self {
        Evaluator { model, candidate, log: None }
    }

    pub fn with_log(model: &'a DomainModel, candidate: &'a Candidate, log: &'a RefCell<Vec<Access>>) -> Self {
        Evaluator { model, candidate, log: Some(log) }
    }

    fn record(&self, access: Access) {
        if let Some(log) = self.log {
            log.borrow_mut().push(access);
        }
    }

    /// Interpretation source for a symbol: the candidate for Σ¹ (and Σ⁰
    /// inputs), stored facts otherwise.
    fn lookup(&self, symbol: &Name) -> Option<(&Interp, bool)> {
        let layer = self.model.symbol(symbol)?.layer;
        if layer <= 1 {
            if let Some(i) = self.candidate.get(symbol) {
                return Some((i, false));
            }
            if layer == 1 {
                return None;
            }
        }
        self.model.fact(symbol).map(|i| (i, true))
    }

    fn apply(&self, symbol: &Name, args: Vec<Value>) -> Option<Value> {
        let decl = self.model.symbol(symbol)?;
        if decl.kind == SymbolKind::Pred {
            return None;
        }
        let found = self.lookup(symbol);
        let (value, from_fact) = match found {
            Some((Interp::Const(v), fact)) if args.is_empty() => (Some(v.clone()), fact),
            Some((Interp::Func(t), fact)) => (t.get(&args).cloned(), fact),
            Some((_, fact)) => (None, fact),
            None => (None, decl.layer != 1 && decl.layer != 0),
        };
        if from_fact {
            self.record(Access::Fact { symbol: symbol.clone(), args, value: value.clone(), holds: value.is_some() });
        } else {
            self.record(Access::Binding { symbol: symbol.clone(), args, value: value.clone() });
        }
        value
    }

    fn holds(&self, symbol: &Name, args: Vec<Value>) -> Truth {
        let Some(decl) = self.model.symbol(symbol) else { return Truth::Undefined };
        if decl.kind != SymbolKind::Pred {
            return Truth::Undefined;
        }
        match self.lookup(symbol) {
            Some((Interp::Pred(t), from_fact)) => {
                let holds = t.contains(&args);
                if from_fact {
                    self.record(Access::Fact { symbol: symbol.clone(), args, value: None, holds });
                } else {
                    let value = Some(Value::enumerated(if holds { "true" } else { "false" }));
                    self.record(Access::Binding { symbol: symbol.clone(), args, value });
                }
                Truth::from_bool(holds)
            }
            // Fact-level predicates are closed-world; unbound Σ¹ predicates are unknown.
            None if decl.layer >= 2 => {
                self.record(Access::Fact { symbol: symbol.clone(), args, value: None, holds: false });
                Truth::False
            }
            _ => Truth::Undefined,
        }
    }

    fn args(&self, args: &[TTerm], a: &Assignment) -> Option<Vec<Value>> {
        args.iter().map(|t| self.term(t, a)).collect()
    }

    /// Value of a term, or `None` when undefined.
    pub fn term(&self, t: &TTerm, a: &Assignment) -> Option<Value> {
        match t {
            TTerm::Lit(v) => Some(v.clone()),
            TTerm::Const(name) => self.apply(name, Vec::new()),
            TTerm::SymRef(name) => Some(Value::Sym(name.clone())),
            TTerm::VarVal(var) => match a.get(var)? {
                Value::Sym(s) => self.apply(s, Vec::new()),
                v => Some(v.clone()),
            },
            TTerm::VarRef(var) => a.get(var).cloned(),
            TTerm::Apply(f, args) => {
                let args = self.args(args, a)?;
                self.apply(f, args)
            }
            TTerm::VarApply(var, args) => {
                let f = a.get(var)?.as_symbol()?.clone();
                let args = self.args(args, a)?;
                self.apply(&f, args)
            }
            TTerm::Arith(op, l, r) => {
                let l = self.term(l, a)?;
                let r = self.term(r, a)?;
                let (l, r) = (l.as_number()?, r.as_number()?);
                let n = match op {
                    ArithOp::Add => l.checked_add(r),
                    ArithOp::Sub => l.checked_sub(r),
                    ArithOp::Mul => l.checked_mul(r),
                    ArithOp::Div if r.is_zero() => None,
                    ArithOp::Div => l.checked_div(r),
                }?;
                Some(Value::Num(n))
            }
            TTerm::Snap(scale, inner) => {
                let v = self.term(inner, a)?;
                self.model.scale(scale)?.snap(v.as_number()?)
            }
        }
    }

    pub fn formula(&self, f: &TFormula, a: &Assignment) -> Truth {
        match f {
            TFormula::Pred(p, args) => match self.args(args, a) {
                Some(args) => self.holds(p, args),
                None => Truth::Undefined,
            },
            TFormula::VarPred(var, args) => {
                let Some(p) = a.get(var).and_then(Value::as_symbol).cloned() else { return Truth::Undefined };
                match self.args(args, a) {
                    Some(args) => self.holds(&p, args),
                    None => Truth::Undefined,
                }
            }
            TFormula::Compare(op, l, r) => {
                let (Some(l), Some(r)) = (self.term(l, a), self.term(r, a)) else { return Truth::Undefined };
                compare(*op, &l, &r)
            }
            TFormula::Not(g) => self.formula(g, a).not(),
            TFormula::And(l, r) => {
                let l = self.formula(l, a);
                if l == Truth::False {
                    return l;
                }
                l.and(self.formula(r, a))
            }
            TFormula::Or(l, r) => {
                let l = self.formula(l, a);
                if l == Truth::True {
                    return l;
                }
                l.or(self.formula(r, a))
            }
            TFormula::Implies(l, r) => {
                let l = self.formula(l, a);
                if l == Truth::False {
                    return Truth::True;
                }
                l.implies(self.formula(r, a))
            }
        }
    }
}

fn compare(op: RelOp, l: &Value, r: &Value) -> Truth {
    match op {
        RelOp::Eq => Truth::from_bool(l == r),
        RelOp::Ne => Truth::from_bool(l != r),
        _ => {
            let (Some(x), Some(y)) = (l.as_number(), r.as_number()) else { return Truth::Undefined };
            Truth::from_bool(match op {
                RelOp::Lt => x < y,
                RelOp::Le => x <= y,
                RelOp::Gt => x > y,
                _ => x >= y,
            })
        }
    }
}
