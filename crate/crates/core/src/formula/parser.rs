//! Recursive-descent parser for the formula language.
//!
//! ```text
//! formula := disj [ "->" formula ]
//! disj    := conj { "|" conj }
//! conj    := lit { "&" lit }
//! lit     := "~" lit | "(" formula ")" | atom
//! atom    := applic | term relop term
//! term    := sum ; sum := prod { ("+"|"-") prod } ; prod := primary { ("*"|"/") primary }
//! primary := number | "-" number | "(" term ")" | applic | enum-value
//! applic  := ident [ "^" int ] [ "(" term { "," term } ")" ]
//! ```

use thiserror::Error;

use super::ast::{ArithOp, Formula, Literal, RelOp, Term};
use super::Schema;
use crate::lex::{tokenize, Tok, Token};
use crate::model::{SymbolKind, VarShape};
use crate::value::{name, parse_number};

const QUANTIFIERS: [&str; 2] = ["forall", "exists"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("{line}:{col}: syntax error: expected {expected}, found {found}")]
    Syntax { line: usize, col: usize, expected: String, found: String },
    #[error("{line}:{col}: unknown identifier `{name}`")]
    UnknownIdentifier { line: usize, col: usize, name: String },
    #[error("{line}:{col}: `{name}` takes {expected} argument(s), found {found}")]
    ArityMismatch { line: usize, col: usize, name: String, expected: usize, found: usize },
    #[error("{line}:{col}: variable `{name}` is declared with order {declared}, written as order {written}")]
    OrderMismatch { line: usize, col: usize, name: String, declared: u8, written: u8 },
}

impl FormulaError {
    pub fn position(&self) -> (usize, usize) {
        match self {
            FormulaError::Syntax { line, col, .. }
            | FormulaError::UnknownIdentifier { line, col, .. }
            | FormulaError::ArityMismatch { line, col, .. }
            | FormulaError::OrderMismatch { line, col, .. } => (*line, *col),
        }
    }

    /// Shift positions of an error found in text embedded at `(line, col)`.
    pub fn offset(mut self, at_line: usize, at_col: usize) -> Self {
        let (l, c) = match &mut self {
            FormulaError::Syntax { line, col, .. }
            | FormulaError::UnknownIdentifier { line, col, .. }
            | FormulaError::ArityMismatch { line, col, .. }
            | FormulaError::OrderMismatch { line, col, .. } => (line, col),
        };
        if *l == 1 {
            *c += at_col - 1;
        }
        *l += at_line - 1;
        self
    }
}

/// Parse formula source text against the identifiers visible in `schema`.
pub fn parse_formula<S: Schema + ?Sized>(text: &str, schema: &S) -> Result<Formula, FormulaError> {
    let toks = lex(text)?;
    let mut p = Parser { toks: &toks, pos: 0, schema };
    let f = p.formula()?;
    p.expect_end()?;
    Ok(f)
}

/// Parse a standalone term (criterion objectives).
pub fn parse_term<S: Schema + ?Sized>(text: &str, schema: &S) -> Result<Term, FormulaError> {
    let toks = lex(text)?;
    let mut p = Parser { toks: &toks, pos: 0, schema };
    let t = p.term()?;
    p.expect_end()?;
    Ok(t)
}

/// Parse from an already tokenized slice (must end with `Eof`).
pub fn parse_formula_tokens<S: Schema + ?Sized>(toks: &[Token], schema: &S) -> Result<Formula, FormulaError> {
    let mut p = Parser { toks, pos: 0, schema };
    let f = p.formula()?;
    p.expect_end()?;
    Ok(f)
}

pub fn parse_term_tokens<S: Schema + ?Sized>(toks: &[Token], schema: &S) -> Result<Term, FormulaError> {
    let mut p = Parser { toks, pos: 0, schema };
    let t = p.term()?;
    p.expect_end()?;
    Ok(t)
}

fn lex(text: &str) -> Result<Vec<Token>, FormulaError> {
    tokenize(text).map_err(|e| FormulaError::Syntax {
        line: e.line,
        col: e.col,
        expected: "a token".into(),
        found: e.message,
    })
}

struct Parser<'a, S: ?Sized> {
    toks: &'a [Token],
    pos: usize,
    schema: &'a S,
}

fn later(a: FormulaError, b: FormulaError) -> FormulaError {
    if b.position() > a.position() {
        b
    } else {
        a
    }
}

impl<'a, S: Schema + ?Sized> Parser<'a, S> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos.min(self.toks.len() - 1)].tok
    }

    fn peek_at(&self, ahead: usize) -> &Tok {
        &self.toks[(self.pos + ahead).min(self.toks.len() - 1)].tok
    }

    fn here(&self) -> &Token {
        &self.toks[self.pos.min(self.toks.len() - 1)]
    }

    fn bump(&mut self) -> Token {
        let t = self.here().clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error(&self, expected: &str) -> FormulaError {
        let t = self.here();
        FormulaError::Syntax { line: t.line, col: t.col, expected: expected.into(), found: t.tok.to_string() }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), FormulaError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.error(what))
        }
    }

    fn expect_end(&mut self) -> Result<(), FormulaError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.error("end of formula"))
        }
    }

    fn formula(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.disj()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disj(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.conj()?;
        while self.eat(&Tok::Bar) {
            let rhs = self.conj()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.lit()?;
        while self.eat(&Tok::Amp) {
            let rhs = self.lit()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn lit(&mut self) -> Result<Formula, FormulaError> {
        if self.eat(&Tok::Tilde) {
            return Ok(Formula::not(self.lit()?));
        }
        if *self.peek() == Tok::LParen {
            // Either a parenthesized formula or a comparison whose left term
            // starts with a parenthesis; try the formula reading first.
            let save = self.pos;
            self.bump();
            let first = self.formula().and_then(|f| self.expect(Tok::RParen, "`)`").map(|_| f));
            match first {
                Ok(f) if !starts_operator(self.peek()) => return Ok(f),
                Ok(_) => {
                    self.pos = save;
                    return self.atom();
                }
                Err(e) => {
                    self.pos = save;
                    return self.atom().map_err(|e2| later(e, e2));
                }
            }
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula, FormulaError> {
        let start = self.here().clone();
        let lhs = self.term()?;
        if let Some(op) = relop(self.peek()) {
            self.bump();
            let rhs = self.term()?;
            return Ok(Formula::Compare(op, lhs, rhs));
        }
        let is_predicate = match &lhs {
            Term::Sym { name, .. } => self.schema.symbol(name).is_some_and(|d| d.kind == SymbolKind::Pred),
            Term::Var { name, .. } => self
                .schema
                .variable(name)
                .and_then(|v| v.symbol_shape())
                .is_some_and(|s| s.kind == SymbolKind::Pred),
            _ => false,
        };
        if is_predicate {
            Ok(Formula::Atom(lhs))
        } else {
            let _ = start;
            Err(self.error("relational operator"))
        }
    }

    fn term(&mut self) -> Result<Term, FormulaError> {
        let mut lhs = self.product()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => ArithOp::Add,
                Tok::Minus => ArithOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.product()?;
            lhs = Term::Arith { op, lhs: Box::new(lhs), rhs: Box::new(rhs) };
        }
    }

    fn product(&mut self) -> Result<Term, FormulaError> {
        let mut lhs = self.primary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => ArithOp::Mul,
                Tok::Slash => ArithOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.primary()?;
            lhs = Term::Arith { op, lhs: Box::new(lhs), rhs: Box::new(rhs) };
        }
    }

    fn number(&mut self, negative: bool) -> Result<Term, FormulaError> {
        let t = self.bump();
        let Tok::Number(text) = &t.tok else { unreachable!("caller checked") };
        let n = parse_number(text).ok_or_else(|| FormulaError::Syntax {
            line: t.line,
            col: t.col,
            expected: "a number".into(),
            found: text.clone(),
        })?;
        Ok(Term::Lit(Literal::Num(if negative { -n } else { n })))
    }

    fn primary(&mut self) -> Result<Term, FormulaError> {
        match self.peek().clone() {
            Tok::Number(_) => self.number(false),
            Tok::Minus if matches!(self.peek_at(1), Tok::Number(_)) => {
                self.bump();
                self.number(true)
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            Tok::Ident(_) => self.applic(),
            _ => Err(self.error("term")),
        }
    }

    fn applic(&mut self) -> Result<Term, FormulaError> {
        let tok = self.bump();
        let Tok::Ident(ident) = &tok.tok else { unreachable!("caller checked") };
        if QUANTIFIERS.contains(&ident.as_str()) {
            return Err(FormulaError::Syntax {
                line: tok.line,
                col: tok.col,
                expected: "a quantifier-free formula".into(),
                found: format!("quantifier `{ident}`"),
            });
        }
        let written_order = if self.eat(&Tok::Caret) {
            let t = self.bump();
            match &t.tok {
                Tok::Number(n) => Some(n.parse::<u8>().map_err(|_| FormulaError::Syntax {
                    line: t.line,
                    col: t.col,
                    expected: "variable order".into(),
                    found: n.clone(),
                })?),
                other => {
                    return Err(FormulaError::Syntax {
                        line: t.line,
                        col: t.col,
                        expected: "variable order".into(),
                        found: other.to_string(),
                    })
                }
            }
        } else {
            None
        };
        let args = if *self.peek() == Tok::LParen {
            self.bump();
            let mut args = Vec::new();
            if *self.peek() != Tok::RParen {
                loop {
                    args.push(self.term()?);
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
            }
            self.expect(Tok::RParen, "`,` or `)`")?;
            Some(args)
        } else {
            None
        };
        let arity_error = |expected: usize, found: usize| FormulaError::ArityMismatch {
            line: tok.line,
            col: tok.col,
            name: ident.clone(),
            expected,
            found,
        };
        if let Some(var) = self.schema.variable(ident) {
            if let Some(k) = written_order {
                if k != var.order {
                    return Err(FormulaError::OrderMismatch {
                        line: tok.line,
                        col: tok.col,
                        name: ident.clone(),
                        declared: var.order,
                        written: k,
                    });
                }
            }
            let expected = match &var.shape {
                VarShape::Scale(_) => 0,
                VarShape::Symbol(s) => s.args.len(),
            };
            let args = args.unwrap_or_default();
            if !args.is_empty() && args.len() != expected {
                return Err(arity_error(expected, args.len()));
            }
            return Ok(Term::Var { name: var.name.clone(), order: var.order, args });
        }
        if written_order.is_some() {
            return Err(FormulaError::Syntax {
                line: tok.line,
                col: tok.col,
                expected: "a declared variable before `^`".into(),
                found: format!("identifier `{ident}`"),
            });
        }
        if let Some(decl) = self.schema.symbol(ident) {
            let args = args.unwrap_or_default();
            if !args.is_empty() && args.len() != decl.arity() {
                return Err(arity_error(decl.arity(), args.len()));
            }
            return Ok(Term::Sym { name: decl.name.clone(), args });
        }
        if self.schema.enum_scale(ident).is_some() {
            if let Some(args) = args {
                return Err(arity_error(0, args.len()));
            }
            return Ok(Term::Lit(Literal::Enum(name(ident))));
        }
        Err(FormulaError::UnknownIdentifier { line: tok.line, col: tok.col, name: ident.clone() })
    }
}

fn relop(t: &Tok) -> Option<RelOp> {
    Some(match t {
        Tok::Eq => RelOp::Eq,
        Tok::Neq => RelOp::Ne,
        Tok::Lt => RelOp::Lt,
        Tok::Le => RelOp::Le,
        Tok::Gt => RelOp::Gt,
        Tok::Ge => RelOp::Ge,
        _ => return None,
    })
}

fn starts_operator(t: &Tok) -> bool {
    relop(t).is_some() || matches!(t, Tok::Plus | Tok::Minus | Tok::Star | Tok::Slash)
}
