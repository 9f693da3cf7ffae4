//! Derivation graphs for solutions and their text rendering.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use super::chain::Branch;
use super::TaskSpec;
use crate::model::DomainModel;
use crate::semantics::Access;
use crate::value::{Name, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExplainError {
    #[error("no derivation trace is available for solution `{0}`")]
    TraceMissing(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExplanationNode {
    Input {
        symbol: Name,
        value: Value,
    },
    Fact {
        symbol: Name,
        args: Vec<Value>,
        #[serde(skip_serializing_if = "Option::is_none")]
        value: Option<Value>,
        /// For predicate facts: whether the tuple is a member.
        holds: bool,
        #[serde(skip_serializing_if = "Option::is_none")]
        table: Option<Name>,
        #[serde(skip_serializing_if = "Option::is_none")]
        row: Option<usize>,
        #[serde(skip_serializing_if = "Option::is_none")]
        title: Option<String>,
        #[serde(skip_serializing_if = "Option::is_none")]
        usage: Option<String>,
    },
    Derived {
        symbol: Name,
        value: Value,
        formula: usize,
        rule: String,
        assignment: BTreeMap<Name, Value>,
        premises: Vec<usize>,
    },
}

impl ExplanationNode {
    pub fn is_leaf(&self) -> bool {
        !matches!(self, ExplanationNode::Derived { .. })
    }

    fn headline(&self) -> String {
        match self {
            ExplanationNode::Input { symbol, value } => format!("input {symbol} = {value}"),
            ExplanationNode::Fact { symbol, args, value, holds, table, row, title, usage } => {
                let mut s = String::from("fact ");
                if !holds && value.is_none() {
                    s.push_str("not ");
                }
                s.push_str(symbol);
                if !args.is_empty() {
                    let a: Vec<String> = args.iter().map(ToString::to_string).collect();
                    s.push_str(&format!("({})", a.join(", ")));
                }
                if let Some(v) = value {
                    s.push_str(&format!(" = {v}"));
                }
                if let Some(t) = table {
                    s.push_str(&format!("  [table {t}"));
                    if let Some(r) = row {
                        s.push_str(&format!(", row {r}"));
                    }
                    s.push(']');
                }
                if let Some(t) = title {
                    s.push_str(&format!("  \"{t}\""));
                }
                if let Some(u) = usage {
                    s.push_str(&format!("  usage: {u}"));
                }
                s
            }
            ExplanationNode::Derived { symbol, value, rule, assignment, .. } => {
                let mut s = format!("{symbol} = {value}  by {rule}");
                if !assignment.is_empty() {
                    let a: Vec<String> = assignment.iter().map(|(n, v)| format!("{n} := {v}")).collect();
                    s.push_str(&format!("  with {}", a.join(", ")));
                }
                s
            }
        }
    }
}

/// The derivation graph of one solution. `roots` holds one node per output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Explanation {
    pub solution_id: String,
    pub task: String,
    pub roots: Vec<usize>,
    pub nodes: Vec<ExplanationNode>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExplainFormat {
    Text,
    Structured,
}

impl Explanation {
    pub(crate) fn build(model: &DomainModel, task: &TaskSpec, branch: &Branch, solution_id: String) -> Self {
        let mut b = Builder { model, task, branch, nodes: Vec::new(), index: BTreeMap::new() };
        let roots = task.outputs.iter().map(|o| b.binding(o, &[])).collect();
        Explanation { solution_id, task: task.name.to_string(), roots, nodes: b.nodes }
    }

    /// Every premise edge points to an earlier node, so the graph is acyclic.
    pub fn is_well_founded(&self) -> bool {
        self.nodes.iter().enumerate().all(|(i, n)| match n {
            ExplanationNode::Derived { premises, .. } => premises.iter().all(|&p| p < i),
            _ => true,
        })
    }

    /// Nodes without premises.
    pub fn leaves(&self) -> impl Iterator<Item = &ExplanationNode> {
        self.nodes.iter().filter(|n| n.is_leaf())
    }

    pub fn render(&self, format: ExplainFormat) -> String {
        match format {
            ExplainFormat::Structured => serde_json::to_string_pretty(self).expect("explanations serialize"),
            ExplainFormat::Text => {
                let mut out = format!("solution {} (task {})\n", self.solution_id, self.task);
                let mut shown = vec![false; self.nodes.len()];
                for &r in &self.roots {
                    self.render_node(r, 1, &mut shown, &mut out);
                }
                out
            }
        }
    }

    fn render_node(&self, i: usize, depth: usize, shown: &mut [bool], out: &mut String) {
        let pad = "  ".repeat(depth);
        let node = &self.nodes[i];
        if let ExplanationNode::Derived { symbol, value, premises, .. } = node {
            if shown[i] {
                out.push_str(&format!("{pad}{symbol} = {value}  (derived above)\n"));
                return;
            }
            shown[i] = true;
            out.push_str(&format!("{pad}{}\n", node.headline()));
            for &p in premises {
                self.render_node(p, depth + 1, shown, out);
            }
        } else {
            out.push_str(&format!("{pad}{}\n", node.headline()));
        }
    }
}

struct Builder<'a> {
    model: &'a DomainModel,
    task: &'a TaskSpec,
    branch: &'a Branch,
    nodes: Vec<ExplanationNode>,
    index: BTreeMap<String, usize>,
}

impl Builder<'_> {
    fn push(&mut self, key: String, node: ExplanationNode) -> usize {
        let id = self.nodes.len();
        self.nodes.push(node);
        self.index.insert(key, id);
        id
    }

    /// Node for a Σ¹ (or input Σ⁰) binding: an input or a derived output.
    fn binding(&mut self, symbol: &Name, args: &[Value]) -> usize {
        let key = format!("b:{symbol}:{args:?}");
        if let Some(&id) = self.index.get(&key) {
            return id;
        }
        if let Some(d) = self.branch.derivations.get(symbol) {
            let premises: Vec<usize> = d.premises.iter().map(|p| self.access(p)).collect();
            let mut unique = Vec::new();
            for p in premises {
                if !unique.contains(&p) {
                    unique.push(p);
                }
            }
            let rule = self.model.formulas()[d.formula].text();
            let node = ExplanationNode::Derived {
                symbol: symbol.clone(),
                value: d.value.clone(),
                formula: d.formula,
                rule,
                assignment: d.assignment.bindings.iter().cloned().collect(),
                premises: unique,
            };
            return self.push(key, node);
        }
        let value = match self.task.inputs.get(symbol) {
            Some(crate::model::Interp::Const(v)) => v.clone(),
            Some(crate::model::Interp::Func(t)) => t.get(args).cloned().unwrap_or_else(|| Value::enumerated("undefined")),
            Some(crate::model::Interp::Pred(t)) => Value::enumerated(if t.contains(args) { "true" } else { "false" }),
            None => Value::enumerated("unbound"),
        };
        let label = if args.is_empty() {
            symbol.clone()
        } else {
            let a: Vec<String> = args.iter().map(ToString::to_string).collect();
            crate::value::name(&format!("{symbol}({})", a.join(", ")))
        };
        self.push(key, ExplanationNode::Input { symbol: label, value })
    }

    fn access(&mut self, access: &Access) -> usize {
        match access {
            Access::Binding { symbol, args, .. } => self.binding(symbol, args),
            Access::Fact { symbol, args, value, holds } => {
                let key = format!("f:{symbol}:{args:?}:{holds}");
                if let Some(&id) = self.index.get(&key) {
                    return id;
                }
                let origin = self.model.origin(symbol, args).cloned();
                let source = match &origin {
                    Some(o) => self.model.sources().get(&o.table),
                    None => self.model.source_of(symbol),
                };
                let node = ExplanationNode::Fact {
                    symbol: symbol.clone(),
                    args: args.clone(),
                    value: value.clone(),
                    holds: *holds,
                    table: origin.as_ref().map(|o| o.table.clone()).or_else(|| source.map(|s| s.id.clone())),
                    row: origin.as_ref().map(|o| o.row),
                    title: source.map(|s| s.title.clone()).filter(|t| !t.is_empty()),
                    usage: source.map(|s| s.usage.clone()).filter(|u| !u.is_empty()),
                };
                self.push(key, node)
            }
        }
    }
}
