//! Know-how tables and their text form.
//!
//! ```text
//! id: rec_angle
//! title: End mill edge angles recommended to prolong tool life
//! usage: Reduce by 2 deg when cutting is unstable.
//! source: Synthetic catalogue data
//! conditions: material:Material
//! results: angle:AngleDeg
//! class: AngleKnowHow
//! bind: angle=edge_angle
//! ---
//! material,angle
//! carbon_steel,12
//! alloy_steel,8
//! ```
//!
//! Header values run to the end of their line and are taken verbatim
//! (trimmed). `class` and `bind` are optional defaults for compiling the
//! table: the class predicate, and column-to-constant bindings. Rows are comma-separated with standard double-quote escaping;
//! the first row names the columns, conditions first.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::value::{name, parse_number, Name, Number, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("table is missing the `{0}` header")]
    MissingHeader(&'static str),
    #[error("row {row}: expected {expected} cells, found {found}")]
    RowWidth { row: usize, expected: usize, found: usize },
    #[error("row {row} repeats the condition values of row {first}")]
    DuplicateRow { row: usize, first: usize },
    #[error("column header `{found}` does not match the declared column `{expected}`")]
    HeaderMismatch { expected: String, found: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Column {
    pub name: Name,
    pub scale: Name,
}

/// Experimental know-how: condition columns determine result columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnowHowTable {
    pub id: Name,
    pub title: String,
    pub usage: String,
    pub provenance: String,
    pub conditions: Vec<Column>,
    pub results: Vec<Column>,
    pub class: Option<Name>,
    /// Column → Σ¹ constant.
    pub bind: BTreeMap<Name, Name>,
    /// Condition cells then result cells.
    pub rows: Vec<Vec<Value>>,
}

fn parse_cell(text: &str) -> Value {
    let t = text.trim();
    if let Some((n, d)) = t.split_once('/') {
        if let (Some(n), Some(d)) = (parse_number(n.trim()), parse_number(d.trim())) {
            if d != Number::from_integer(0) {
                return Value::Num(n / d);
            }
        }
    }
    match parse_number(t) {
        Some(n) => Value::Num(n),
        None => Value::Enum(name(t)),
    }
}

fn parse_bindings(text: &str, line: usize) -> Result<BTreeMap<Name, Name>, TableError> {
    text.split(',')
        .map(str::trim)
        .filter(|c| !c.is_empty())
        .map(|c| {
            let (col, target) = c.split_once('=').ok_or_else(|| TableError::Syntax {
                line,
                message: format!("binding `{c}` must be written `column=constant`"),
            })?;
            Ok((name(col.trim()), name(target.trim())))
        })
        .collect()
}

fn parse_columns(text: &str, line: usize) -> Result<Vec<Column>, TableError> {
    text.split(',')
        .map(str::trim)
        .filter(|c| !c.is_empty())
        .map(|c| {
            let (n, s) = c.split_once(':').ok_or_else(|| TableError::Syntax {
                line,
                message: format!("column `{c}` must be written `name:Scale`"),
            })?;
            Ok(Column { name: name(n.trim()), scale: name(s.trim()) })
        })
        .collect()
}

impl KnowHowTable {
    pub fn width(&self) -> usize {
        self.conditions.len() + self.results.len()
    }

    pub fn columns(&self) -> impl Iterator<Item = &Column> {
        self.conditions.iter().chain(&self.results)
    }

    /// Check the row shape and the uniqueness of condition keys.
    pub fn check_rows(&self) -> Result<(), TableError> {
        let mut seen: Vec<(&[Value], usize)> = Vec::new();
        let mut keys = BTreeSet::new();
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != self.width() {
                return Err(TableError::RowWidth { row: i + 1, expected: self.width(), found: row.len() });
            }
            let key = &row[..self.conditions.len()];
            if !keys.insert(key) {
                let first = seen.iter().find(|(k, _)| *k == key).map(|(_, r)| *r).unwrap_or(0);
                return Err(TableError::DuplicateRow { row: i + 1, first });
            }
            seen.push((key, i + 1));
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self, TableError> {
        let mut id = None;
        let mut title = String::new();
        let mut usage = String::new();
        let mut provenance = String::new();
        let mut conditions = None;
        let mut results = None;
        let mut class = None;
        let mut bind = BTreeMap::new();
        let mut body_start = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if line == "---" {
                body_start = Some(i + 1);
                break;
            }
            let (key, value) = line.split_once(':').ok_or_else(|| TableError::Syntax {
                line: i + 1,
                message: "expected `key: value`".into(),
            })?;
            let value = value.trim();
            match key.trim() {
                "id" => id = Some(name(value)),
                "title" => title = value.to_string(),
                "usage" => usage = value.to_string(),
                "source" => provenance = value.to_string(),
                "conditions" => conditions = Some(parse_columns(value, i + 1)?),
                "results" => results = Some(parse_columns(value, i + 1)?),
                "class" => class = Some(name(value)),
                "bind" => bind = parse_bindings(value, i + 1)?,
                other => {
                    return Err(TableError::Syntax { line: i + 1, message: format!("unknown header `{other}`") })
                }
            }
        }
        let id = id.ok_or(TableError::MissingHeader("id"))?;
        let conditions = conditions.unwrap_or_default();
        let results = results.ok_or(TableError::MissingHeader("results"))?;
        let start = body_start.ok_or(TableError::MissingHeader("---"))?;
        let body = text.lines().skip(start).collect::<Vec<_>>().join("\n");
        let mut reader =
            csv::ReaderBuilder::new().has_headers(true).flexible(true).trim(csv::Trim::All).from_reader(body.as_bytes());
        let mut table = KnowHowTable { id, title, usage, provenance, conditions, results, class, bind, rows: Vec::new() };
        let headers = reader
            .headers()
            .map_err(|e| TableError::Syntax { line: start + 1, message: e.to_string() })?
            .clone();
        let declared: Vec<&Name> = table.columns().map(|c| &c.name).collect();
        if headers.len() != declared.len() {
            return Err(TableError::RowWidth { row: 0, expected: declared.len(), found: headers.len() });
        }
        for (h, d) in headers.iter().zip(&declared) {
            if h != d.as_ref() {
                return Err(TableError::HeaderMismatch { expected: d.to_string(), found: h.to_string() });
            }
        }
        for record in reader.records() {
            let record = record.map_err(|e| TableError::Syntax {
                line: e.position().map(|p| start + p.line() as usize).unwrap_or(start),
                message: e.to_string(),
            })?;
            table.rows.push(record.iter().map(parse_cell).collect());
        }
        table.check_rows()?;
        Ok(table)
    }

    /// Text form; `parse(to_text(t)) == t` for tables whose header texts
    /// fit on one line.
    pub fn to_text(&self) -> String {
        let cols = |cs: &[Column]| cs.iter().map(|c| format!("{}:{}", c.name, c.scale)).collect::<Vec<_>>().join(", ");
        let mut out = format!("id: {}\n", self.id);
        out.push_str(&format!("title: {}\n", self.title));
        out.push_str(&format!("usage: {}\n", self.usage));
        out.push_str(&format!("source: {}\n", self.provenance));
        out.push_str(&format!("conditions: {}\n", cols(&self.conditions)));
        out.push_str(&format!("results: {}\n", cols(&self.results)));
        if let Some(c) = &self.class {
            out.push_str(&format!("class: {c}\n"));
        }
        if !self.bind.is_empty() {
            let pairs: Vec<String> = self.bind.iter().map(|(c, t)| format!("{c}={t}")).collect();
            out.push_str(&format!("bind: {}\n", pairs.join(", ")));
        }
        out.push_str("---\n");
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let header: Vec<&str> = self.columns().map(|c| c.name.as_ref()).collect();
        w.write_record(&header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(ToString::to_string)).expect("in-memory write");
        }
        out.push_str(&String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells"));
        out
    }
}
