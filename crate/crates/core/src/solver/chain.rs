//! Semi-naive forward chaining with branching on alternative values.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};

use super::rules::{compile_rules, Rule, RuleKind, RuleSet};
use super::{SolveError, TaskSpec};
use crate::formula::Schema;
use crate::model::{DomainModel, Interp, SymbolKind};
use crate::semantics::{Access, Assignment, Candidate, Evaluator, Truth};
use crate::value::{Name, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChainConfig {
    /// Fail on divergent derivations instead of branching.
    pub conflict_mode: bool,
    /// Largest number of live branches.
    pub branch_budget: usize,
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig { conflict_mode: false, branch_budget: 1_000_000 }
    }
}

/// Why an output has its value on a branch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub symbol: Name,
    pub value: Value,
    pub rule: usize,
    pub formula: usize,
    pub assignment: Assignment,
    pub premises: Vec<Access>,
}

#[derive(Clone, Debug)]
pub struct Branch {
    pub candidate: Candidate,
    pub derivations: BTreeMap<Name, Derivation>,
}

#[derive(Clone, Debug)]
pub struct ChainResult {
    pub rules: RuleSet,
    /// Branches that bound every output, in derivation order.
    pub branches: Vec<Branch>,
}

type Options = BTreeMap<Name, BTreeMap<Value, Derivation>>;

struct Chainer<'a> {
    model: &'a DomainModel,
    rules: &'a RuleSet,
    domains: BTreeMap<Name, BTreeSet<Value>>,
}

impl Chainer<'_> {
    fn antecedent_holds(&self, ev: &Evaluator<'_>, rule: &Rule, a: &Assignment) -> bool {
        rule.antecedent.iter().all(|f| ev.formula(f, a) == Truth::True)
    }

    fn in_domain(&self, symbol: &Name, v: &Value) -> bool {
        self.domains.get(symbol).is_some_and(|d| d.contains(v))
    }

    /// Re-run a firing instance with logging to collect its premises.
    fn premises(&self, c: &Candidate, rule: &Rule, a: &Assignment, extra: Option<Access>) -> Vec<Access> {
        let log = RefCell::new(Vec::new());
        let ev = Evaluator::with_log(self.model, c, &log);
        for f in &rule.antecedent {
            ev.formula(f, a);
        }
        match &rule.kind {
            RuleKind::Assign { expr, .. } => {
                ev.term(expr, a);
            }
            RuleKind::Choose { args, .. } => {
                for t in args.iter().flatten() {
                    ev.term(t, a);
                }
            }
        }
        let mut out = log.into_inner();
        // Failed lookups are not premises; non-membership of a stored predicate is.
        out.retain(|x| match x {
            Access::Binding { value, .. } => value.is_some(),
            Access::Fact { symbol, value, .. } => {
                value.is_some() || self.model.symbol(symbol).is_some_and(|d| d.kind == SymbolKind::Pred)
            }
        });
        out.extend(extra);
        let mut seen = BTreeSet::new();
        out.retain(|x| seen.insert(x.clone()));
        out
    }

    fn fire(&self, c: &Candidate, ri: usize, options: &mut Options) {
        let rule = &self.rules.rules[ri];
        let ev = Evaluator::new(self.model, c);
        for a in &rule.assignments {
            if !self.antecedent_holds(&ev, rule, a) {
                continue;
            }
            match &rule.kind {
                RuleKind::Assign { head, expr } => {
                    if c.is_bound(head) {
                        continue;
                    }
                    let Some(v) = ev.term(expr, a) else { continue };
                    if !self.in_domain(head, &v) {
                        continue;
                    }
                    let slot = options.entry(head.clone()).or_default();
                    if !slot.contains_key(&v) {
                        let premises = self.premises(c, rule, a, None);
                        slot.insert(
                            v.clone(),
                            Derivation {
                                symbol: head.clone(),
                                value: v,
                                rule: ri,
                                formula: rule.formula,
                                assignment: a.clone(),
                                premises,
                            },
                        );
                    }
                }
                RuleKind::Choose { pred, args, heads } => {
                    let Some(Interp::Pred(tuples)) = self.model.fact(pred) else { continue };
                    // Non-head arguments must be defined before the rule can pick.
                    let fixed: Option<Vec<Option<Value>>> = args
                        .iter()
                        .map(|t| match t {
                            None => Some(None),
                            Some(t) => ev.term(t, a).map(Some),
                        })
                        .collect();
                    let Some(fixed) = fixed else { continue };
                    'tuples: for tuple in tuples {
                        let mut picks: BTreeMap<&Name, &Value> = BTreeMap::new();
                        for (i, v) in tuple.iter().enumerate() {
                            if let Some(Some(want)) = fixed.get(i) {
                                if want != v {
                                    continue 'tuples;
                                }
                            }
                        }
                        for (i, h) in heads {
                            let v = &tuple[*i];
                            if let Some(bound) = c.constant(h) {
                                if bound != v {
                                    continue 'tuples;
                                }
                                continue;
                            }
                            match picks.get(h) {
                                Some(prev) if *prev != v => continue 'tuples,
                                _ => {
                                    picks.insert(h, v);
                                }
                            }
                        }
                        if picks.iter().any(|(h, v)| !self.in_domain(h, v)) {
                            continue;
                        }
                        for (h, v) in picks {
                            let slot = options.entry(h.clone()).or_default();
                            if slot.contains_key(v) {
                                continue;
                            }
                            let member = Access::Fact { symbol: pred.clone(), args: tuple.clone(), value: None, holds: true };
                            let premises = self.premises(c, rule, a, Some(member));
                            slot.insert(
                                v.clone(),
                                Derivation {
                                    symbol: h.clone(),
                                    value: v.clone(),
                                    rule: ri,
                                    formula: rule.formula,
                                    assignment: a.clone(),
                                    premises,
                                },
                            );
                        }
                    }
                }
            }
        }
    }
}

/// Derive candidate interpretations of the outputs from inputs and facts.
pub fn forward_chain(model: &DomainModel, task: &TaskSpec, config: &ChainConfig) -> Result<ChainResult, SolveError> {
    let rules = compile_rules(model, task);
    let domains: BTreeMap<Name, BTreeSet<Value>> = task
        .outputs
        .iter()
        .map(|o| {
            let decl = model.symbol(o).expect("task outputs are declared");
            (o.clone(), model.carrier_values(decl.result.as_ref().expect("constant")).into_iter().collect())
        })
        .collect();
    let chainer = Chainer { model, rules: &rules, domains };
    let carrier = model.carrier_of(model.order()).map(|c| c.values.len()).unwrap_or(0);
    let cap = (carrier * carrier).max(task.outputs.len() + 1);

    let start = Branch { candidate: task.base_candidate(), derivations: BTreeMap::new() };
    let mut frontier: Vec<(Branch, Option<BTreeSet<Name>>)> = vec![(start, None)];
    let mut complete = Vec::new();
    let mut stuck: Option<Name> = None;
    let mut round = 0usize;
    while !frontier.is_empty() {
        round += 1;
        if round > cap {
            return Err(SolveError::IterationCapExceeded(cap));
        }
        let mut next = Vec::new();
        for (branch, delta) in frontier {
            let mut options = Options::new();
            for (ri, rule) in rules.rules.iter().enumerate() {
                let open = rule.heads().iter().any(|h| !branch.candidate.is_bound(h));
                let touched = delta.as_ref().is_none_or(|d| !rule.deps.is_disjoint(d));
                if open && touched {
                    chainer.fire(&branch.candidate, ri, &mut options);
                }
            }
            if options.is_empty() {
                match task.outputs.iter().find(|o| !branch.candidate.is_bound(o)) {
                    None => complete.push(branch),
                    Some(o) => {
                        stuck.get_or_insert_with(|| o.clone());
                    }
                }
                continue;
            }
            if config.conflict_mode {
                if let Some((symbol, values)) = options.iter().find(|(_, v)| v.len() > 1) {
                    return Err(SolveError::Conflict {
                        symbol: symbol.clone(),
                        values: values.keys().map(ToString::to_string).collect(),
                    });
                }
            }
            let delta: BTreeSet<Name> = options.keys().cloned().collect();
            let mut expanded = vec![branch];
            for (symbol, values) in &options {
                let mut grown = Vec::with_capacity(expanded.len() * values.len());
                for b in &expanded {
                    for (v, d) in values {
                        let mut nb = b.clone();
                        nb.candidate.bind_const(symbol.clone(), v.clone());
                        nb.derivations.insert(symbol.clone(), d.clone());
                        grown.push(nb);
                    }
                }
                expanded = grown;
                if expanded.len() + next.len() > config.branch_budget {
                    return Err(SolveError::BranchBudgetExceeded(config.branch_budget));
                }
            }
            next.extend(expanded.into_iter().map(|b| (b, Some(delta.clone()))));
        }
        frontier = next;
    }
    if complete.is_empty() {
        let symbol = stuck.unwrap_or_else(|| task.outputs[0].clone());
        return Err(SolveError::NoDerivation(symbol));
    }
    Ok(ChainResult { rules, branches: complete })
}
