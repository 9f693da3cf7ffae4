//! The model file format: reading into a draft and canonical writing.
//!
//! ```text
//! order 2;
//! scales { AngleDeg = int 0 .. 45 step 1 unit "deg"; Material = enum { a, b }; }
//! vars { f : order 2 : func(Material) -> AngleDeg; }
//! layer 1 { const edge_angle : AngleDeg; }
//! layer 2 { func rec_angle(Material) : AngleDeg; pred AngleKnowHow(symbols 2); }
//! facts 2 { rec_angle(carbon_steel) = 12 @ rec_angle:1; AngleKnowHow(rec_angle); }
//! formulas { AngleKnowHow(f^2) -> f^2(workpiece_material) = edge_angle; }
//! knowhow rec_angle { title "..."; usage "..."; source "..."; symbols rec_angle; }
//! task demo { input workpiece_material = carbon_steel; output edge_angle; criterion none; }
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::lex::{tokenize, Tok, Token};
use crate::model::{
    quote, CarrierRef, CriterionSource, FactEntry, FactOrigin, FormulaSource, KnowHowSource, ModelDraft, ModelError,
    ScaleKind, SymbolDecl, SymbolKind, SymbolShape, TaskSource, VarShape, VariableDecl,
};
use crate::value::{name, parse_number, Name, Number, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DocumentError {
    #[error("{line}:{col}: parse error: {message}")]
    Parse { line: usize, col: usize, message: String },
    #[error("{line}:{col}: {error}")]
    Model { line: usize, col: usize, error: ModelError },
}

impl DocumentError {
    fn at(t: &Token, message: impl Into<String>) -> Self {
        DocumentError::Parse { line: t.line, col: t.col, message: message.into() }
    }
}

/// Read a model file into an unchecked draft.
pub fn parse_document(src: &str) -> Result<ModelDraft, DocumentError> {
    let toks = tokenize(src).map_err(|e| DocumentError::Parse { line: e.line, col: e.col, message: e.message })?;
    let mut p = DocParser { src, toks: &toks, pos: 0 };
    p.document()
}

struct DocParser<'a> {
    src: &'a str,
    toks: &'a [Token],
    pos: usize,
}

impl DocParser<'_> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if &self.peek().tok == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<Token, DocumentError> {
        if self.peek().tok == tok {
            Ok(self.bump())
        } else {
            Err(DocumentError::at(self.peek(), format!("expected {tok}, found {}", self.peek().tok)))
        }
    }

    fn ident(&mut self) -> Result<Name, DocumentError> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let n = name(s);
                self.bump();
                Ok(n)
            }
            other => Err(DocumentError::at(self.peek(), format!("expected identifier, found {other}"))),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), DocumentError> {
        match &self.peek().tok {
            Tok::Ident(s) if s == kw => {
                self.bump();
                Ok(())
            }
            other => Err(DocumentError::at(self.peek(), format!("expected `{kw}`, found {other}"))),
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    fn string(&mut self) -> Result<String, DocumentError> {
        match &self.peek().tok {
            Tok::Str(s) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            other => Err(DocumentError::at(self.peek(), format!("expected string, found {other}"))),
        }
    }

    fn number(&mut self) -> Result<Number, DocumentError> {
        let neg = self.eat(&Tok::Minus);
        let t = self.bump();
        match &t.tok {
            Tok::Number(s) => {
                let mut n = parse_number(s).ok_or_else(|| DocumentError::at(&t, format!("bad number `{s}`")))?;
                // Rationals without a finite decimal form are written `a/b`.
                if self.peek().tok == Tok::Slash {
                    self.bump();
                    let d = self.bump();
                    let denom = match &d.tok {
                        Tok::Number(s) => parse_number(s).filter(|d| *d != Number::from_integer(0)),
                        _ => None,
                    };
                    n /= denom.ok_or_else(|| DocumentError::at(&d, "bad denominator"))?;
                }
                Ok(if neg { -n } else { n })
            }
            other => Err(DocumentError::at(&t, format!("expected number, found {other}"))),
        }
    }

    fn integer(&mut self) -> Result<i64, DocumentError> {
        let t = self.peek().clone();
        let n = self.number()?;
        if n.is_integer() {
            Ok(n.to_integer())
        } else {
            Err(DocumentError::at(&t, "expected an integer"))
        }
    }

    fn small(&mut self) -> Result<u8, DocumentError> {
        let t = self.peek().clone();
        let n = self.integer()?;
        u8::try_from(n).map_err(|_| DocumentError::at(&t, "number out of range"))
    }

    fn value(&mut self) -> Result<Value, DocumentError> {
        match &self.peek().tok {
            Tok::Ident(_) => Ok(Value::Enum(self.ident()?)),
            _ => Ok(Value::Num(self.number()?)),
        }
    }

    /// Raw source text up to (not including) the next `;`.
    fn until_semi(&mut self) -> Result<(String, usize, usize), DocumentError> {
        let first = self.peek().clone();
        let mut last_end = first.start;
        while !matches!(self.peek().tok, Tok::Semi | Tok::Eof | Tok::RBrace) {
            last_end = self.bump().end;
        }
        if last_end == first.start {
            return Err(DocumentError::at(&first, "expected text before `;`"));
        }
        self.expect(Tok::Semi)?;
        Ok((self.src[first.start..last_end].to_string(), first.line, first.col))
    }

    fn document(&mut self) -> Result<ModelDraft, DocumentError> {
        let mut order: Option<u8> = None;
        let mut draft = ModelDraft::new(1);
        let mut layers: Vec<SymbolDecl> = Vec::new();
        while self.peek().tok != Tok::Eof {
            let t = self.peek().clone();
            let Tok::Ident(section) = &t.tok else {
                return Err(DocumentError::at(&t, format!("expected a section, found {}", t.tok)));
            };
            self.bump();
            match section.as_str() {
                "order" => {
                    order = Some(self.small()?);
                    self.expect(Tok::Semi)?;
                }
                "scales" => self.scales(&mut draft)?,
                "vars" => self.vars(&mut draft)?,
                "layer" => {
                    let level = self.small()?;
                    self.block(|p| {
                        layers.push(p.symbol(level)?);
                        Ok(())
                    })?;
                }
                "facts" => {
                    let level = self.small()?;
                    self.block(|p| {
                        draft.facts.push(p.fact(level)?);
                        Ok(())
                    })?;
                }
                "formulas" => self.block(|p| {
                    let (text, line, col) = p.until_semi()?;
                    draft.formulas.push(FormulaSource { text, line, col });
                    Ok(())
                })?,
                "knowhow" => {
                    let source = self.knowhow()?;
                    draft.sources.insert(source.id.clone(), source);
                }
                "task" => {
                    let task = self.task()?;
                    if draft.tasks.contains_key(&task.name) {
                        return Err(DocumentError::at(&t, format!("duplicate task `{}`", task.name)));
                    }
                    draft.tasks.insert(task.name.clone(), task);
                }
                other => return Err(DocumentError::at(&t, format!("unknown section `{other}`"))),
            }
        }
        draft.order = order.unwrap_or_else(|| layers.iter().map(|d| d.layer).max().unwrap_or(1).max(1));
        for d in layers {
            if draft.signature.get(&d.name).is_some() {
                return Err(DocumentError::Model { line: 0, col: 0, error: ModelError::NameClash(d.name) });
            }
            draft.signature.insert_unchecked(d);
        }
        Ok(draft)
    }

    /// `{ item* }` where each item consumes its own terminator.
    fn block(&mut self, mut item: impl FnMut(&mut Self) -> Result<(), DocumentError>) -> Result<(), DocumentError> {
        self.expect(Tok::LBrace)?;
        while !self.eat(&Tok::RBrace) {
            if self.peek().tok == Tok::Eof {
                return Err(DocumentError::at(self.peek(), "unexpected end of input, expected `}`"));
            }
            item(self)?;
        }
        Ok(())
    }

    fn scales(&mut self, draft: &mut ModelDraft) -> Result<(), DocumentError> {
        self.block(|p| {
            let at = p.peek().clone();
            let scale = p.ident()?;
            p.expect(Tok::Eq)?;
            let kind_tok = p.peek().clone();
            let kind = match p.ident()?.as_ref() {
                "enum" => {
                    p.expect(Tok::LBrace)?;
                    let mut values = vec![p.ident()?];
                    while p.eat(&Tok::Comma) {
                        values.push(p.ident()?);
                    }
                    p.expect(Tok::RBrace)?;
                    ScaleKind::Enumerated(values)
                }
                "int" => {
                    let lo = p.integer()?;
                    p.expect(Tok::DotDot)?;
                    let hi = p.integer()?;
                    let step = if p.at_keyword("step") {
                        p.bump();
                        p.integer()?
                    } else {
                        1
                    };
                    ScaleKind::Integer { lo, hi, step }
                }
                "dec" => {
                    let lo = p.number()?;
                    p.expect(Tok::DotDot)?;
                    let hi = p.number()?;
                    p.keyword("step")?;
                    let step = p.number()?;
                    ScaleKind::Decimal { lo, hi, step }
                }
                other => return Err(DocumentError::at(&kind_tok, format!("unknown scale kind `{other}`"))),
            };
            let unit = if p.at_keyword("unit") {
                p.bump();
                Some(p.string()?)
            } else {
                None
            };
            p.expect(Tok::Semi)?;
            draft
                .scales
                .define_scale(&scale, kind, unit)
                .map_err(|error| DocumentError::Model { line: at.line, col: at.col, error })?;
            Ok(())
        })
    }

    fn carrier(&mut self) -> Result<CarrierRef, DocumentError> {
        if self.at_keyword("symbols") {
            self.bump();
            return Ok(CarrierRef::Symbols(self.small()?));
        }
        Ok(CarrierRef::Scale(self.ident()?))
    }

    fn carriers(&mut self) -> Result<Vec<CarrierRef>, DocumentError> {
        let mut out = Vec::new();
        if self.eat(&Tok::LParen) && !self.eat(&Tok::RParen) {
            out.push(self.carrier()?);
            while self.eat(&Tok::Comma) {
                out.push(self.carrier()?);
            }
            self.expect(Tok::RParen)?;
        }
        Ok(out)
    }

    fn vars(&mut self, draft: &mut ModelDraft) -> Result<(), DocumentError> {
        self.block(|p| {
            let at = p.peek().clone();
            let var = p.ident()?;
            p.expect(Tok::Colon)?;
            if p.at_keyword("order") {
                p.bump();
            }
            let order = p.small()?;
            p.expect(Tok::Colon)?;
            let shape = match &p.peek().tok {
                Tok::Ident(k) if k == "const" => {
                    p.bump();
                    VarShape::Symbol(SymbolShape { kind: SymbolKind::Const, args: vec![], result: Some(p.carrier()?) })
                }
                Tok::Ident(k) if k == "func" => {
                    p.bump();
                    let args = p.carriers()?;
                    p.expect(Tok::Arrow)?;
                    VarShape::Symbol(SymbolShape { kind: SymbolKind::Func, args, result: Some(p.carrier()?) })
                }
                Tok::Ident(k) if k == "pred" => {
                    p.bump();
                    let args = p.carriers()?;
                    VarShape::Symbol(SymbolShape { kind: SymbolKind::Pred, args, result: None })
                }
                _ => VarShape::Scale(p.ident()?),
            };
            p.expect(Tok::Semi)?;
            if draft.variables.contains_key(&var) {
                return Err(DocumentError::Model { line: at.line, col: at.col, error: ModelError::NameClash(var) });
            }
            draft.variables.insert(var.clone(), VariableDecl { name: var, order, shape });
            Ok(())
        })
    }

    fn symbol(&mut self, layer: u8) -> Result<SymbolDecl, DocumentError> {
        let kind_tok = self.peek().clone();
        let kind = match self.ident()?.as_ref() {
            "const" => SymbolKind::Const,
            "func" => SymbolKind::Func,
            "pred" => SymbolKind::Pred,
            other => return Err(DocumentError::at(&kind_tok, format!("expected const, func or pred, found `{other}`"))),
        };
        let symbol = self.ident()?;
        let args = if kind == SymbolKind::Const { Vec::new() } else { self.carriers()? };
        let result = if kind == SymbolKind::Pred {
            None
        } else {
            self.expect(Tok::Colon)?;
            Some(self.carrier()?)
        };
        self.expect(Tok::Semi)?;
        Ok(SymbolDecl { name: symbol, layer, kind, args, result })
    }

    fn fact(&mut self, level: u8) -> Result<FactEntry, DocumentError> {
        let symbol = self.ident()?;
        let mut args = Vec::new();
        if self.eat(&Tok::LParen) && !self.eat(&Tok::RParen) {
            args.push(self.value()?);
            while self.eat(&Tok::Comma) {
                args.push(self.value()?);
            }
            self.expect(Tok::RParen)?;
        }
        let value = if self.eat(&Tok::Eq) { Some(self.value()?) } else { None };
        let origin = if self.eat(&Tok::At) {
            let table = self.ident()?;
            self.expect(Tok::Colon)?;
            let t = self.peek().clone();
            let row = usize::try_from(self.integer()?).map_err(|_| DocumentError::at(&t, "bad row number"))?;
            Some(FactOrigin { table, row })
        } else {
            None
        };
        self.expect(Tok::Semi)?;
        Ok(FactEntry { level, symbol, args, value, origin })
    }

    fn knowhow(&mut self) -> Result<KnowHowSource, DocumentError> {
        let id = self.ident()?;
        let mut source = KnowHowSource { id, ..KnowHowSource::default() };
        self.block(|p| {
            let t = p.peek().clone();
            match p.ident()?.as_ref() {
                "title" => source.title = p.string()?,
                "usage" => source.usage = p.string()?,
                "source" => source.provenance = p.string()?,
                "symbols" => {
                    source.symbols.push(p.ident()?);
                    while p.eat(&Tok::Comma) {
                        source.symbols.push(p.ident()?);
                    }
                }
                other => return Err(DocumentError::at(&t, format!("unknown knowhow field `{other}`"))),
            }
            p.expect(Tok::Semi)?;
            Ok(())
        })?;
        Ok(source)
    }

    fn task(&mut self) -> Result<TaskSource, DocumentError> {
        let task = self.ident()?;
        let mut inputs = Vec::new();
        let mut outputs = Vec::new();
        let mut criterion = CriterionSource::None;
        self.block(|p| {
            let t = p.peek().clone();
            match p.ident()?.as_ref() {
                "input" => {
                    let s = p.ident()?;
                    p.expect(Tok::Eq)?;
                    inputs.push((s, p.value()?));
                    p.expect(Tok::Semi)?;
                }
                "output" => {
                    outputs.push(p.ident()?);
                    while p.eat(&Tok::Comma) {
                        outputs.push(p.ident()?);
                    }
                    p.expect(Tok::Semi)?;
                }
                "criterion" => {
                    let kt = p.peek().clone();
                    criterion = match p.ident()?.as_ref() {
                        "none" => {
                            p.expect(Tok::Semi)?;
                            CriterionSource::None
                        }
                        "maximize" => CriterionSource::Maximize(p.until_semi()?.0),
                        "minimize" => CriterionSource::Minimize(p.until_semi()?.0),
                        "predicate" => CriterionSource::Predicate(p.until_semi()?.0),
                        other => return Err(DocumentError::at(&kt, format!("unknown criterion `{other}`"))),
                    };
                }
                other => return Err(DocumentError::at(&t, format!("unknown task field `{other}`"))),
            }
            Ok(())
        })?;
        Ok(TaskSource { name: task, inputs, outputs, criterion })
    }
}

/// Canonical, deterministic text of a draft.
pub fn save_draft(draft: &ModelDraft) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "order {};", draft.order);
    out.push_str("\nscales {\n");
    for s in draft.scales.iter() {
        let _ = writeln!(out, "  {} = {};", s.name(), s.describe());
    }
    out.push_str("}\n");
    if !draft.variables.is_empty() {
        out.push_str("\nvars {\n");
        for v in draft.variables.values() {
            let _ = writeln!(out, "  {};", v.describe());
        }
        out.push_str("}\n");
    }
    for layer in draft.signature.layers() {
        if layer.symbols.is_empty() {
            continue;
        }
        let _ = writeln!(out, "\nlayer {} {{", layer.level);
        for d in layer.symbols.values() {
            let _ = writeln!(out, "  {};", d.describe());
        }
        out.push_str("}\n");
    }
    let mut by_level: BTreeMap<u8, Vec<&FactEntry>> = BTreeMap::new();
    for f in &draft.facts {
        by_level.entry(f.level).or_default().push(f);
    }
    for (level, mut facts) in by_level {
        facts.sort_by(|a, b| (&a.symbol, &a.args, &a.value).cmp(&(&b.symbol, &b.args, &b.value)));
        facts.dedup_by(|a, b| a.symbol == b.symbol && a.args == b.args && a.value == b.value);
        let _ = writeln!(out, "\nfacts {level} {{");
        for f in facts {
            let _ = write!(out, "  {}", f.describe());
            if let Some(o) = &f.origin {
                let _ = write!(out, " @ {}:{}", o.table, o.row);
            }
            out.push_str(";\n");
        }
        out.push_str("}\n");
    }
    if !draft.formulas.is_empty() {
        out.push_str("\nformulas {\n");
        for f in &draft.formulas {
            let _ = writeln!(out, "  {};", f.text.trim());
        }
        out.push_str("}\n");
    }
    for s in draft.sources.values() {
        let _ = writeln!(out, "\nknowhow {} {{", s.id);
        let _ = writeln!(out, "  title {};", quote(&s.title));
        let _ = writeln!(out, "  usage {};", quote(&s.usage));
        let _ = writeln!(out, "  source {};", quote(&s.provenance));
        if !s.symbols.is_empty() {
            let names: Vec<&str> = s.symbols.iter().map(|n| n.as_ref()).collect();
            let _ = writeln!(out, "  symbols {};", names.join(", "));
        }
        out.push_str("}\n");
    }
    for t in draft.tasks.values() {
        let _ = writeln!(out, "\ntask {} {{", t.name);
        for (s, v) in &t.inputs {
            let _ = writeln!(out, "  input {s} = {v};");
        }
        let names: Vec<&str> = t.outputs.iter().map(|n| n.as_ref()).collect();
        let _ = writeln!(out, "  output {};", names.join(", "));
        let criterion = match &t.criterion {
            CriterionSource::None => "none".to_string(),
            CriterionSource::Predicate(f) => format!("predicate {f}"),
            CriterionSource::Maximize(e) => format!("maximize {e}"),
            CriterionSource::Minimize(e) => format!("minimize {e}"),
        };
        let _ = writeln!(out, "  criterion {criterion};");
        out.push_str("}\n");
    }
    out
}
