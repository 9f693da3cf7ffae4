use std::fmt;

use crate::value::{Name, Number};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
            ArithOp::Div => "/",
        }
    }

    pub(crate) fn precedence(self) -> u8 {
        match self {
            ArithOp::Add | ArithOp::Sub => 1,
            ArithOp::Mul | ArithOp::Div => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RelOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl RelOp {
    pub fn symbol(self) -> &'static str {
        match self {
            RelOp::Eq => "=",
            RelOp::Ne => "~=",
            RelOp::Lt => "<",
            RelOp::Le => "<=",
            RelOp::Gt => ">",
            RelOp::Ge => ">=",
        }
    }

    pub fn is_ordering(self) -> bool {
        !matches!(self, RelOp::Eq | RelOp::Ne)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Literal {
    Num(Number),
    /// Identifier of an enumerated scale value.
    Enum(Name),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Lit(Literal),
    /// `x^k(t1, …, tm)`; zero-ary when `args` is empty.
    Var { name: Name, order: u8, args: Vec<Term> },
    /// Application of a declared symbol; zero-ary mentions are constants or
    /// references to the reified symbol.
    Sym { name: Name, args: Vec<Term> },
    Arith { op: ArithOp, lhs: Box<Term>, rhs: Box<Term> },
}

impl Term {
    pub fn sym(name: &str, args: Vec<Term>) -> Self {
        Term::Sym { name: crate::value::name(name), args }
    }

    pub fn num(n: i64) -> Self {
        Term::Lit(Literal::Num(Number::from_integer(n)))
    }

    /// Visit every symbol name mentioned in the term.
    pub fn for_each_symbol(&self, f: &mut impl FnMut(&Name)) {
        match self {
            Term::Lit(_) => {}
            Term::Var { args, .. } => args.iter().for_each(|a| a.for_each_symbol(f)),
            Term::Sym { name, args } => {
                f(name);
                args.iter().for_each(|a| a.for_each_symbol(f));
            }
            Term::Arith { lhs, rhs, .. } => {
                lhs.for_each_symbol(f);
                rhs.for_each_symbol(f);
            }
        }
    }

    pub fn for_each_var(&self, f: &mut impl FnMut(&Name)) {
        match self {
            Term::Lit(_) => {}
            Term::Var { name, args, .. } => {
                f(name);
                args.iter().for_each(|a| a.for_each_var(f));
            }
            Term::Sym { args, .. } => args.iter().for_each(|a| a.for_each_var(f)),
            Term::Arith { lhs, rhs, .. } => {
                lhs.for_each_var(f);
                rhs.for_each_var(f);
            }
        }
    }

    /// Rename variables (used by invariance tests and sub-model tooling).
    pub fn rename_vars(&self, map: &impl Fn(&Name) -> Name) -> Term {
        match self {
            Term::Lit(l) => Term::Lit(l.clone()),
            Term::Var { name, order, args } => Term::Var {
                name: map(name),
                order: *order,
                args: args.iter().map(|a| a.rename_vars(map)).collect(),
            },
            Term::Sym { name, args } => {
                Term::Sym { name: name.clone(), args: args.iter().map(|a| a.rename_vars(map)).collect() }
            }
            Term::Arith { op, lhs, rhs } => {
                Term::Arith { op: *op, lhs: Box::new(lhs.rename_vars(map)), rhs: Box::new(rhs.rename_vars(map)) }
            }
        }
    }
}

/// Quantifier-free formula. There is deliberately no binder node.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    /// Predicate application (symbol or predicate-shaped variable).
    Atom(Term),
    Compare(RelOp, Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
}

impl Formula {
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn eq(a: Term, b: Term) -> Self {
        Formula::Compare(RelOp::Eq, a, b)
    }

    pub fn for_each_term(&self, f: &mut impl FnMut(&Term)) {
        match self {
            Formula::Atom(t) => f(t),
            Formula::Compare(_, a, b) => {
                f(a);
                f(b);
            }
            Formula::Not(g) => g.for_each_term(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.for_each_term(f);
                b.for_each_term(f);
            }
        }
    }

    pub fn symbols(&self) -> std::collections::BTreeSet<Name> {
        let mut out = std::collections::BTreeSet::new();
        self.for_each_term(&mut |t| t.for_each_symbol(&mut |n| {
            out.insert(n.clone());
        }));
        out
    }

    pub fn variables(&self) -> std::collections::BTreeSet<Name> {
        let mut out = std::collections::BTreeSet::new();
        self.for_each_term(&mut |t| t.for_each_var(&mut |n| {
            out.insert(n.clone());
        }));
        out
    }

    pub fn rename_vars(&self, map: &impl Fn(&Name) -> Name) -> Formula {
        match self {
            Formula::Atom(t) => Formula::Atom(t.rename_vars(map)),
            Formula::Compare(op, a, b) => Formula::Compare(*op, a.rename_vars(map), b.rename_vars(map)),
            Formula::Not(g) => Formula::not(g.rename_vars(map)),
            Formula::And(a, b) => Formula::and(a.rename_vars(map), b.rename_vars(map)),
            Formula::Or(a, b) => Formula::or(a.rename_vars(map), b.rename_vars(map)),
            Formula::Implies(a, b) => Formula::implies(a.rename_vars(map), b.rename_vars(map)),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::render_formula(self))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::render_term(self))
    }
}
