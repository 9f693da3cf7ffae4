//! Sort checking. Produces the typed tree the evaluator runs on.

use std::collections::BTreeSet;

use thiserror::Error;

use super::ast::{ArithOp, Formula, Literal, RelOp, Term};
use super::Schema;
use crate::model::{CarrierRef, SymbolKind, VarShape};
use crate::value::{Name, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("sort mismatch in `{context}`: expected {expected}, found {found}")]
    SortMismatch { context: String, expected: String, found: String },
    #[error("`{context}` compares non-numeric values with an ordering operator")]
    NonNumericComparison { context: String },
    #[error("`{name}` has order {order}, beyond the model order {model}")]
    OrderExceedsModel { name: Name, order: u8, model: u8 },
    #[error("`{name}` is not a predicate and cannot stand alone as a formula")]
    NotAPredicate { name: Name },
    #[error("`{name}` takes {expected} argument(s), found {found}")]
    Arity { name: Name, expected: usize, found: usize },
    #[error("unknown identifier `{0}`")]
    Unknown(Name),
}

/// Sort of a term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sort {
    Scale(Name),
    /// Result of arithmetic or a bare numeric literal.
    Numeric,
    /// A reified symbol of at most this layer.
    Symbol(u8),
}

impl std::fmt::Display for Sort {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Sort::Scale(s) => write!(f, "scale {s}"),
            Sort::Numeric => f.write_str("a number"),
            Sort::Symbol(j) => write!(f, "a symbol of layer <= {j}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TTerm {
    Lit(Value),
    /// Value of a zero-ary symbol.
    Const(Name),
    /// The symbol itself as an object.
    SymRef(Name),
    /// Value of a first-order variable, or of the constant a const-shaped
    /// higher-order variable is bound to.
    VarVal(Name),
    /// The symbol a higher-order variable is bound to.
    VarRef(Name),
    Apply(Name, Vec<TTerm>),
    VarApply(Name, Vec<TTerm>),
    Arith(ArithOp, Box<TTerm>, Box<TTerm>),
    /// Round the exact result onto the grid of a numeric scale.
    Snap(Name, Box<TTerm>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TFormula {
    Pred(Name, Vec<TTerm>),
    VarPred(Name, Vec<TTerm>),
    Compare(RelOp, TTerm, TTerm),
    Not(Box<TFormula>),
    And(Box<TFormula>, Box<TFormula>),
    Or(Box<TFormula>, Box<TFormula>),
    Implies(Box<TFormula>, Box<TFormula>),
}

/// A checked formula of the model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypedFormula {
    pub index: usize,
    pub formula: Formula,
    pub body: TFormula,
    /// Free variables in name order; assignments enumerate in this order.
    pub free_vars: Vec<Name>,
    /// Every symbol mentioned.
    pub symbols: BTreeSet<Name>,
}

impl TypedFormula {
    pub fn text(&self) -> String {
        self.formula.to_string()
    }
}

pub fn check_formula<S: Schema + ?Sized>(index: usize, f: &Formula, schema: &S) -> Result<TypedFormula, TypeError> {
    let context = f.to_string();
    let checker = Checker { schema, context: &context };
    let body = checker.formula(f)?;
    Ok(TypedFormula {
        index,
        formula: f.clone(),
        body,
        free_vars: f.variables().into_iter().collect(),
        symbols: f.symbols(),
    })
}

/// Check a standalone objective term; numeric sorts only.
pub fn check_objective<S: Schema + ?Sized>(t: &Term, schema: &S) -> Result<TTerm, TypeError> {
    let context = t.to_string();
    let checker = Checker { schema, context: &context };
    let (tt, sort) = checker.term(t, None)?;
    if !checker.numeric(&sort) {
        return Err(checker.mismatch("a numeric objective", &sort));
    }
    Ok(tt)
}

struct Checker<'a, S: ?Sized> {
    schema: &'a S,
    context: &'a str,
}

impl<'a, S: Schema + ?Sized> Checker<'a, S> {
    fn mismatch(&self, expected: &str, found: &Sort) -> TypeError {
        TypeError::SortMismatch { context: self.context.to_string(), expected: expected.into(), found: found.to_string() }
    }

    fn numeric(&self, s: &Sort) -> bool {
        match s {
            Sort::Numeric => true,
            Sort::Scale(n) => self.schema.scale(n).is_some_and(|s| s.is_numeric()),
            Sort::Symbol(_) => false,
        }
    }

    fn formula(&self, f: &Formula) -> Result<TFormula, TypeError> {
        Ok(match f {
            Formula::Not(g) => TFormula::Not(Box::new(self.formula(g)?)),
            Formula::And(a, b) => TFormula::And(Box::new(self.formula(a)?), Box::new(self.formula(b)?)),
            Formula::Or(a, b) => TFormula::Or(Box::new(self.formula(a)?), Box::new(self.formula(b)?)),
            Formula::Implies(a, b) => TFormula::Implies(Box::new(self.formula(a)?), Box::new(self.formula(b)?)),
            Formula::Atom(t) => self.atom(t)?,
            Formula::Compare(op, a, b) => self.compare(*op, a, b)?,
        })
    }

    fn atom(&self, t: &Term) -> Result<TFormula, TypeError> {
        match t {
            Term::Sym { name, args } => {
                let decl = self.schema.symbol(name).ok_or_else(|| TypeError::Unknown(name.clone()))?;
                if decl.kind != SymbolKind::Pred {
                    return Err(TypeError::NotAPredicate { name: name.clone() });
                }
                let args = self.args(name, &decl.args, args)?;
                Ok(TFormula::Pred(name.clone(), args))
            }
            Term::Var { name, order, args } => {
                let var = self.schema.variable(name).ok_or_else(|| TypeError::Unknown(name.clone()))?;
                self.order_ok(name, *order)?;
                match var.symbol_shape() {
                    Some(shape) if shape.kind == SymbolKind::Pred => {
                        let args = self.args(name, &shape.args, args)?;
                        Ok(TFormula::VarPred(name.clone(), args))
                    }
                    _ => Err(TypeError::NotAPredicate { name: name.clone() }),
                }
            }
            _ => Err(TypeError::NotAPredicate { name: crate::value::name(&t.to_string()) }),
        }
    }

    fn compare(&self, op: RelOp, a: &Term, b: &Term) -> Result<TFormula, TypeError> {
        let (ta, sa) = self.term(a, None)?;
        let (tb, sb) = self.term(b, None)?;
        if op.is_ordering() && !(self.numeric(&sa) && self.numeric(&sb)) {
            return Err(TypeError::NonNumericComparison { context: self.context.to_string() });
        }
        let compatible = match (&sa, &sb) {
            (Sort::Symbol(_), Sort::Symbol(_)) => true,
            (Sort::Scale(x), Sort::Scale(y)) if x == y => true,
            (x, y) => self.numeric(x) && self.numeric(y),
        };
        if !compatible {
            return Err(self.mismatch(&sa.to_string(), &sb));
        }
        // Arithmetic compared against a scaled term lands on that scale's grid.
        let ta = self.snap_against(ta, &sb);
        let tb = self.snap_against(tb, &sa);
        Ok(TFormula::Compare(op, ta, tb))
    }

    fn snap_against(&self, t: TTerm, other: &Sort) -> TTerm {
        match (&t, other) {
            (TTerm::Arith(..), Sort::Scale(s)) => TTerm::Snap(s.clone(), Box::new(t)),
            _ => t,
        }
    }

    fn order_ok(&self, name: &Name, order: u8) -> Result<(), TypeError> {
        let model = self.schema.order();
        if order > model {
            return Err(TypeError::OrderExceedsModel { name: name.clone(), order, model });
        }
        Ok(())
    }

    fn args(&self, name: &Name, carriers: &[CarrierRef], args: &[Term]) -> Result<Vec<TTerm>, TypeError> {
        if carriers.len() != args.len() {
            return Err(TypeError::Arity { name: name.clone(), expected: carriers.len(), found: args.len() });
        }
        carriers
            .iter()
            .zip(args)
            .map(|(c, a)| {
                let (t, sort) = self.term(a, Some(c))?;
                self.fits(c, &sort)?;
                Ok(match (c, t) {
                    (CarrierRef::Scale(s), t @ TTerm::Arith(..)) => TTerm::Snap(s.clone(), Box::new(t)),
                    (_, t) => t,
                })
            })
            .collect()
    }

    fn fits(&self, c: &CarrierRef, sort: &Sort) -> Result<(), TypeError> {
        let ok = match (c, sort) {
            (CarrierRef::Scale(s), Sort::Scale(t)) => {
                s == t || (self.numeric(sort) && self.schema.scale(s).is_some_and(|x| x.is_numeric()))
            }
            (CarrierRef::Scale(s), Sort::Numeric) => self.schema.scale(s).is_some_and(|x| x.is_numeric()),
            (CarrierRef::Symbols(j), Sort::Symbol(l)) => l <= j,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(self.mismatch(&c.to_string(), sort))
        }
    }

    fn result_sort(&self, r: &Option<CarrierRef>) -> Sort {
        match r {
            Some(CarrierRef::Scale(s)) => Sort::Scale(s.clone()),
            Some(CarrierRef::Symbols(j)) => Sort::Symbol(*j),
            None => Sort::Numeric,
        }
    }

    /// `expected` is the carrier of the argument position, if any; it decides
    /// whether a bare constant denotes its value or the symbol itself.
    fn term(&self, t: &Term, expected: Option<&CarrierRef>) -> Result<(TTerm, Sort), TypeError> {
        let wants_symbol = matches!(expected, Some(CarrierRef::Symbols(_)));
        match t {
            Term::Lit(Literal::Num(n)) => Ok((TTerm::Lit(Value::Num(*n)), Sort::Numeric)),
            Term::Lit(Literal::Enum(e)) => {
                let scale = self.schema.enum_scale(e).ok_or_else(|| TypeError::Unknown(e.clone()))?;
                Ok((TTerm::Lit(Value::Enum(e.clone())), Sort::Scale(scale)))
            }
            Term::Arith { op, lhs, rhs } => {
                let (l, ls) = self.term(lhs, None)?;
                let (r, rs) = self.term(rhs, None)?;
                for s in [&ls, &rs] {
                    if !self.numeric(s) {
                        return Err(self.mismatch("a numeric operand", s));
                    }
                }
                Ok((TTerm::Arith(*op, Box::new(l), Box::new(r)), Sort::Numeric))
            }
            Term::Sym { name, args } => {
                let decl = self.schema.symbol(name).ok_or_else(|| TypeError::Unknown(name.clone()))?;
                let value_of_const = decl.kind == SymbolKind::Const
                    && !(wants_symbol && !matches!(decl.result, Some(CarrierRef::Symbols(_))));
                if value_of_const {
                    return Ok((TTerm::Const(name.clone()), self.result_sort(&decl.result)));
                }
                if args.is_empty() {
                    return Ok((TTerm::SymRef(name.clone()), Sort::Symbol(decl.layer)));
                }
                if decl.kind == SymbolKind::Pred {
                    return Err(self.mismatch("a term", &Sort::Symbol(decl.layer)));
                }
                let targs = self.args(name, &decl.args, args)?;
                Ok((TTerm::Apply(name.clone(), targs), self.result_sort(&decl.result)))
            }
            Term::Var { name, order, args } => {
                let var = self.schema.variable(name).ok_or_else(|| TypeError::Unknown(name.clone()))?;
                self.order_ok(name, *order)?;
                match &var.shape {
                    VarShape::Scale(s) => Ok((TTerm::VarVal(name.clone()), Sort::Scale(s.clone()))),
                    VarShape::Symbol(shape) => {
                        let value_of_const = shape.kind == SymbolKind::Const
                            && !(wants_symbol && !matches!(shape.result, Some(CarrierRef::Symbols(_))));
                        if value_of_const {
                            return Ok((TTerm::VarVal(name.clone()), self.result_sort(&shape.result)));
                        }
                        if args.is_empty() {
                            return Ok((TTerm::VarRef(name.clone()), Sort::Symbol(var.order)));
                        }
                        if shape.kind == SymbolKind::Pred {
                            return Err(self.mismatch("a term", &Sort::Symbol(var.order)));
                        }
                        let targs = self.args(name, &shape.args, args)?;
                        Ok((TTerm::VarApply(name.clone(), targs), self.result_sort(&shape.result)))
                    }
                }
            }
        }
    }
}
