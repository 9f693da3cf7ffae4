//! The shipped end-milling pack: validity, solvability across the input
//! sweep, the criterion trade-off and explanation coverage.

use std::collections::BTreeSet;

use knowbase::demo::{build_demo, input_sweep, TASKS};
use knowbase::formula::Schema;
use knowbase::model::DomainModel;
use knowbase::semantics::{check_solution, compare_solution_sets, oracle_solutions, OracleConfig};
use knowbase::solver::{solve, ExplanationNode, SolveConfig, TaskSpec};
use knowbase::validation::{validate_consistency, validate_model};
use knowbase::value::Value;

fn pack_oracle() -> OracleConfig {
    OracleConfig { budget: u128::MAX, ..OracleConfig::default() }
}

fn task_for(model: &DomainModel, task: &str, inputs: &[(knowbase::value::Name, Value)]) -> TaskSpec {
    let base = TaskSpec::named(model, task).unwrap();
    let inputs: Vec<(&str, Value)> = inputs.iter().map(|(n, v)| (n.as_ref(), v.clone())).collect();
    let outputs: Vec<&str> = base.outputs.iter().map(|o| o.as_ref()).collect();
    TaskSpec::with_constants(model, task, &inputs, &outputs, base.criterion.clone()).unwrap()
}

#[test]
fn pack_validates_clean() {
    let ws = build_demo().unwrap();
    let m = ws.model();
    assert_eq!(ws.tables().len(), 11);
    assert!(validate_model(m.draft()).is_empty(), "{:?}", validate_model(m.draft()));
    for t in TASKS {
        let probe = TaskSpec::named(&m, t).unwrap();
        assert!(validate_consistency(&m, Some(&probe), &pack_oracle()).unwrap().is_empty());
    }
    let order2 = m.formulas().iter().filter(|f| f.free_vars.iter().any(|v| m.variable(v).is_some_and(|d| d.order == 2)));
    assert!(order2.count() >= 10);
}

#[test]
fn life_task_cites_a_table_row() {
    let mut ws = build_demo().unwrap();
    let m = ws.model();
    let task = TaskSpec::named(&m, "life").unwrap();
    let out = ws.solve(&task, &SolveConfig::default()).unwrap();
    assert!(!out.solutions.is_empty());
    let oracle = oracle_solutions(&m, &task, &pack_oracle()).unwrap();
    assert!(compare_solution_sets(&out.set, &oracle).unwrap().is_empty());
    let cited = out.solutions[0].explanation.leaves().any(|l| {
        matches!(l, ExplanationNode::Fact { table: Some(t), row: Some(_), .. } if t.as_ref() == "speed")
    });
    assert!(cited);
}

#[test]
fn sweep_solves_both_tasks_and_criteria_differ() {
    let ws = build_demo().unwrap();
    let m = ws.model();
    let mut differ = 0;
    let mut fired: BTreeSet<usize> = BTreeSet::new();
    let mut tables: BTreeSet<String> = BTreeSet::new();
    for inputs in input_sweep(&m) {
        let mut sets = Vec::new();
        for t in TASKS {
            let task = task_for(&m, t, &inputs);
            let out = solve(&m, &task, &SolveConfig::default()).unwrap_or_else(|e| panic!("{t} {inputs:?}: {e}"));
            let oracle = oracle_solutions(&m, &task, &pack_oracle()).unwrap();
            assert!(compare_solution_sets(&out.set, &oracle).unwrap().is_empty(), "{t} {inputs:?}");
            for s in &out.solutions {
                assert_eq!(check_solution(&m, &s.candidate), Ok(true));
                for node in &s.explanation.nodes {
                    match node {
                        ExplanationNode::Derived { formula, .. } => {
                            fired.insert(*formula);
                        }
                        ExplanationNode::Fact { table: Some(t), .. } => {
                            tables.insert(t.to_string());
                        }
                        _ => {}
                    }
                }
                for leaf in s.explanation.leaves() {
                    assert!(matches!(leaf, ExplanationNode::Input { .. } | ExplanationNode::Fact { .. }));
                }
            }
            sets.push(out.set);
        }
        if sets[0] != sets[1] {
            differ += 1;
        }
    }
    assert!(differ > 0);
    for f in m.formulas() {
        if !f.free_vars.is_empty() {
            assert!(fired.contains(&f.index), "order-2 formula {} never fired", f.text());
        }
    }
    assert_eq!(tables.len(), 11, "{tables:?}");
}

#[test]
fn build_is_deterministic() {
    assert_eq!(build_demo().unwrap().export(), build_demo().unwrap().export());
}

#[test]
fn export_import_round_trips() {
    let ws = build_demo().unwrap();
    let text = ws.export();
    let again = knowbase::workspace::Workspace::import(&text).unwrap();
    assert_eq!(again.tables().len(), 11);
    assert_eq!(again.export(), text);
}
