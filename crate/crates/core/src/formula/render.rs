//! Canonical text form: minimal parentheses, parse(render(f)) == f.

use super::ast::{Formula, Literal, Term};
use crate::value::format_number;

const IMPLIES: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const NOT: u8 = 4;

pub fn render_formula(f: &Formula) -> String {
    formula(f, 0)
}

pub fn render_term(t: &Term) -> String {
    term(t, 0)
}

fn wrap(s: String, prec: u8, min: u8) -> String {
    if prec < min {
        format!("({s})")
    } else {
        s
    }
}

fn formula(f: &Formula, min: u8) -> String {
    match f {
        Formula::Implies(a, b) => wrap(format!("{} -> {}", formula(a, OR), formula(b, IMPLIES)), IMPLIES, min),
        Formula::Or(a, b) => wrap(format!("{} | {}", formula(a, OR), formula(b, AND)), OR, min),
        Formula::And(a, b) => wrap(format!("{} & {}", formula(a, AND), formula(b, NOT)), AND, min),
        Formula::Not(g) => format!("~{}", formula(g, NOT)),
        Formula::Atom(t) => term(t, 0),
        Formula::Compare(op, a, b) => format!("{} {} {}", term(a, 0), op.symbol(), term(b, 0)),
    }
}

fn args(out: &mut String, args: &[Term]) {
    if args.is_empty() {
        return;
    }
    let parts: Vec<String> = args.iter().map(|a| term(a, 0)).collect();
    out.push('(');
    out.push_str(&parts.join(", "));
    out.push(')');
}

fn term(t: &Term, min: u8) -> String {
    match t {
        Term::Lit(Literal::Num(n)) => format_number(n),
        Term::Lit(Literal::Enum(e)) => e.to_string(),
        Term::Var { name, order, args: a } => {
            let mut out = name.to_string();
            if *order >= 2 {
                out.push_str(&format!("^{order}"));
            }
            args(&mut out, a);
            out
        }
        Term::Sym { name, args: a } => {
            let mut out = name.to_string();
            args(&mut out, a);
            out
        }
        Term::Arith { op, lhs, rhs } => {
            let p = op.precedence();
            wrap(format!("{} {} {}", term(lhs, p), op.symbol(), term(rhs, p + 1)), p, min)
        }
    }
}
