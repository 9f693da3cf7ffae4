//! The EM-micro fixture end to end: model, formulas, semantics, solver,
//! know-how, validation and persistence.

use std::collections::BTreeSet;

use knowbase::formula::{parse_formula, render_formula, Formula, Schema, Term};
use knowbase::knowhow::{
    add_facts, compile_knowhow, ingest_feedback, DecisionRecord, KnowHowBinding, KnowHowError, KnowHowTable,
    ModelDelta,
};
use knowbase::model::{
    assemble, CarrierRef, DomainModel, FactEntry, ModelError, ScaleSystem, Signature, SymbolDecl,
};
use knowbase::semantics::{
    check_solution, compare_solution_sets, enumerate_assignments, oracle_candidates, oracle_solutions, Candidate,
    Evaluator, OracleConfig, SemanticsError, Solution, SolutionSet,
};
use knowbase::solver::{
    compile_rules, forward_chain, solve, ChainConfig, Criterion, ExplainFormat, ExplanationNode, RuleKind,
    SolveConfig, SolveError, Stage, TaskSpec,
};
use knowbase::validation::{validate_completeness, validate_consistency, validate_model, validate_pertinency, Code};
use knowbase::value::{name, Value};
use knowbase::workspace::{extract_submodel, extract_submodel_excluding, load_model, save_model, LoadError, Workspace};

const EM_MICRO: &str = include_str!("../examples/em-micro.model");

fn fixture() -> DomainModel {
    load_model(EM_MICRO).expect("fixture loads")
}

fn variant(from: &str, to: &str) -> DomainModel {
    assert!(EM_MICRO.contains(from), "fixture text `{from}` missing");
    load_model(&EM_MICRO.replacen(from, to, 1)).expect("variant loads")
}

fn task(model: &DomainModel, material: &str, criterion: &str) -> TaskSpec {
    let source = match criterion {
        "none" => knowbase::model::CriterionSource::None,
        c if c.starts_with("max ") => knowbase::model::CriterionSource::Maximize(c[4..].into()),
        c if c.starts_with("min ") => knowbase::model::CriterionSource::Minimize(c[4..].into()),
        c => knowbase::model::CriterionSource::Predicate(c.into()),
    };
    let criterion = Criterion::parse(model, &source).unwrap();
    TaskSpec::with_constants(
        model,
        "probe",
        &[("workpiece_material", Value::enumerated(material))],
        &["edge_angle", "tool_life"],
        criterion,
    )
    .unwrap()
}

fn candidate(material: &str, angle: i64, life: i64) -> Candidate {
    let mut c = Candidate::new();
    c.bind_const(name("workpiece_material"), Value::enumerated(material));
    c.bind_const(name("edge_angle"), Value::int(angle));
    c.bind_const(name("tool_life"), Value::int(life));
    c
}

fn sol(angle: i64, life: i64) -> Solution {
    Solution {
        values: [(name("edge_angle"), Value::int(angle)), (name("tool_life"), Value::int(life))].into_iter().collect(),
    }
}

// ---- model ----

#[test]
fn fixture_is_a_valid_order_two_model() {
    let m = fixture();
    assert_eq!(m.order(), 2);
    let s1: Vec<&str> = m.sigma1().map(|d| d.name.as_ref()).collect();
    assert_eq!(s1, ["edge_angle", "tool_life", "workpiece_material"]);
    let s2: Vec<&str> = m.signature().layer(2).unwrap().symbols.keys().map(|n| n.as_ref()).collect();
    assert_eq!(s2, ["AngleKnowHow", "life_at", "rec_angle"]);
    assert_eq!(m.formulas().len(), 3);
}

#[test]
fn level_one_facts_are_rejected() {
    let mut draft = fixture().into_draft();
    draft.facts.push(FactEntry { level: 1, symbol: name("edge_angle"), args: vec![], value: Some(Value::int(12)), origin: None });
    assert_eq!(assemble(draft).unwrap_err(), ModelError::FactAtLevelOne(name("edge_angle")));
}

#[test]
fn off_scale_fact_is_not_pertinent() {
    let mut draft = fixture().into_draft();
    draft.facts.push(FactEntry {
        level: 2,
        symbol: name("rec_angle"),
        args: vec![Value::enumerated("titanium")],
        value: Some(Value::int(9)),
        origin: None,
    });
    assert!(matches!(assemble(draft), Err(ModelError::PertinencyFailed { .. })));
}

#[test]
fn carriers_nest() {
    let m = fixture();
    let c0 = m.carrier_of(0).unwrap();
    // Integer scales overlap; the carrier is a set.
    assert_eq!(c0.values.len(), 601 + 2);
    let c1 = m.carrier_of(1).unwrap();
    let c2 = m.carrier_of(2).unwrap();
    let extra: Vec<&Value> = c2.values.iter().filter(|v| !c1.values.contains(v)).collect();
    assert_eq!(extra, [&Value::symbol("edge_angle"), &Value::symbol("tool_life"), &Value::symbol("workpiece_material")]);
    assert!(c1.values.iter().all(|v| c2.values.contains(v)));
    assert_eq!(m.carrier_of(7).unwrap_err(), ModelError::LevelOutOfRange { level: 7, order: 2 });
}

#[test]
fn declarations_may_not_cite_their_own_layer() {
    let m = fixture();
    let mut sig = Signature::new();
    let scales: &ScaleSystem = m.scales();
    sig.declare_symbol(SymbolDecl::constant("edge_angle", 1, CarrierRef::Scale(name("AngleDeg"))), scales).unwrap();
    let err = sig
        .declare_symbol(SymbolDecl::function("f", 1, vec![CarrierRef::Symbols(1)], CarrierRef::Scale(name("AngleDeg"))), scales)
        .unwrap_err();
    assert!(matches!(err, ModelError::ForwardLayerRef { .. }), "{err:?}");
}

// ---- formulas ----

#[test]
fn bridge_formula_parses_to_an_implication() {
    let m = fixture();
    let f = parse_formula("AngleKnowHow(f^2) -> f^2(workpiece_material) = edge_angle", &m).unwrap();
    let Formula::Implies(lhs, rhs) = &f else { panic!("{f:?}") };
    assert!(matches!(**lhs, Formula::Atom(_)));
    assert!(matches!(**rhs, Formula::Compare(..)));
    assert_eq!(f.variables().into_iter().collect::<Vec<_>>(), [name("f")]);
    let typed = &m.formulas()[0];
    assert_eq!(typed.free_vars, [name("f")]);
    let mut orders = Vec::new();
    f.for_each_term(&mut |t| {
        if let Term::Var { order, .. } = t {
            orders.push(*order)
        }
    });
    assert!(orders.contains(&2));
}

#[test]
fn fixture_formulas_round_trip() {
    let m = fixture();
    for f in m.formulas() {
        let again = parse_formula(&render_formula(&f.formula), &m).unwrap();
        assert_eq!(again, f.formula);
    }
}

// ---- semantics ----

#[test]
fn stored_facts_evaluate() {
    let m = fixture();
    let c = Candidate::new();
    let ev = Evaluator::new(&m, &c);
    let t = knowbase::formula::check_objective(&knowbase::formula::parse_term("rec_angle(carbon_steel)", &m).unwrap(), &m).unwrap();
    assert_eq!(ev.term(&t, &Default::default()), Some(Value::int(12)));
}

#[test]
fn order_two_variable_ranges_over_matching_symbols() {
    let m = fixture();
    let a = enumerate_assignments(&m, &[name("f")]);
    assert_eq!(a.len(), 1);
    assert_eq!(a[0].get("f"), Some(&Value::symbol("rec_angle")));
    assert_eq!(enumerate_assignments(&m, &[]).len(), 1);
}

#[test]
fn solution_check_accepts_the_fixture_solution_only() {
    let m = fixture();
    assert_eq!(check_solution(&m, &candidate("carbon_steel", 12, 90)), Ok(true));
    assert_eq!(check_solution(&m, &candidate("carbon_steel", 10, 90)), Ok(false));
    let mut partial = Candidate::new();
    partial.bind_const(name("edge_angle"), Value::int(12));
    assert!(matches!(check_solution(&m, &partial), Err(SemanticsError::IncompleteCandidate(_))));
}

#[test]
fn oracle_finds_the_fixture_solution() {
    let m = fixture();
    let set = oracle_solutions(&m, &task(&m, "carbon_steel", "max tool_life"), &OracleConfig::default()).unwrap();
    assert_eq!(set.solutions, [sol(12, 90)]);
    let all = oracle_solutions(&m, &task(&m, "carbon_steel", "none"), &OracleConfig::default()).unwrap();
    assert_eq!(all.solutions, [sol(12, 90)]);
    let unpruned = OracleConfig { prune: false, ..OracleConfig::default() };
    assert_eq!(oracle_candidates(&m, &task(&m, "carbon_steel", "none"), &unpruned).unwrap().len(), 1);
    let err = oracle_solutions(&m, &task(&m, "carbon_steel", "none"), &OracleConfig::with_budget(10)).unwrap_err();
    assert_eq!(err, SemanticsError::OracleBudgetExceeded { limit: 10, required: 46 * 601 });
}

#[test]
fn solution_set_differences() {
    let one = SolutionSet::new(&[name("x")], [Solution { values: [(name("x"), Value::int(1))].into_iter().collect() }]);
    let two = SolutionSet::new(
        &[name("x")],
        [1, 2].map(|v| Solution { values: [(name("x"), Value::int(v))].into_iter().collect() }),
    );
    assert!(compare_solution_sets(&one, &one).unwrap().is_empty());
    let d = compare_solution_sets(&one, &two).unwrap();
    assert_eq!(d.missing_in_left.len(), 1);
    assert!(d.missing_in_right.is_empty());
    let other = SolutionSet::new(&[name("y")], []);
    assert!(matches!(compare_solution_sets(&one, &other), Err(SemanticsError::SchemaMismatch { .. })));
}

// ---- solver ----

#[test]
fn rules_come_from_the_bridge_and_the_life_formula() {
    let m = fixture();
    let rules = compile_rules(&m, &task(&m, "carbon_steel", "none"));
    let heads: Vec<(usize, String)> = rules
        .rules
        .iter()
        .map(|r| match &r.kind {
            RuleKind::Assign { head, .. } => (r.formula, head.to_string()),
            RuleKind::Choose { .. } => (r.formula, "choose".into()),
        })
        .collect();
    assert_eq!(heads, [(0, "edge_angle".to_string()), (1, "tool_life".to_string())]);
    assert_eq!(rules.constraints, [2]);
}

#[test]
fn negated_bound_is_check_only() {
    let m = variant("tool_life > 0;", "tool_life > 0;\n  ~(edge_angle > 40);");
    let rules = compile_rules(&m, &task(&m, "carbon_steel", "none"));
    assert_eq!(rules.constraints, [2, 3]);
}

#[test]
fn forward_chaining_derives_one_candidate() {
    let m = fixture();
    let r = forward_chain(&m, &task(&m, "carbon_steel", "none"), &ChainConfig::default()).unwrap();
    assert_eq!(r.branches.len(), 1);
    let b = &r.branches[0];
    assert_eq!(b.candidate, candidate("carbon_steel", 12, 90));
    assert_eq!(b.derivations.len(), 2);
}

#[test]
fn missing_life_row_blocks_derivation() {
    let m = fixture();
    let t = task(&m, "alloy_steel", "none");
    assert_eq!(forward_chain(&m, &t, &ChainConfig::default()).unwrap_err(), SolveError::NoDerivation(name("tool_life")));
    let err = solve(&m, &t, &SolveConfig::default()).unwrap_err();
    assert!(matches!(err, SolveError::NoSolution { stage: Stage::ForwardChain, .. }), "{err:?}");
}

#[test]
fn solve_matches_the_oracle_and_explains() {
    let m = fixture();
    let t = task(&m, "carbon_steel", "max tool_life");
    let out = solve(&m, &t, &SolveConfig::default()).unwrap();
    assert_eq!(out.set.solutions, [sol(12, 90)]);
    let e = &out.solutions[0].explanation;
    assert!(e.is_well_founded());
    let ExplanationNode::Derived { symbol, premises, .. } = &e.nodes[e.roots[0]] else { panic!() };
    assert_eq!(symbol.as_ref(), "edge_angle");
    let leaves: Vec<String> = premises
        .iter()
        .map(|&p| match &e.nodes[p] {
            ExplanationNode::Input { symbol, value } => format!("input {symbol}={value}"),
            ExplanationNode::Fact { symbol, args, value, table, row, .. } => {
                format!("fact {symbol}{args:?}={value:?} {table:?}:{row:?}")
            }
            other => panic!("{other:?}"),
        })
        .collect();
    assert_eq!(leaves.len(), 3, "{leaves:?}");
    assert!(leaves.iter().any(|l| l.starts_with("fact AngleKnowHow")));
    assert!(leaves.iter().any(|l| l.starts_with("fact rec_angle") && l.contains("Some(\"rec_angle\"):Some(1)")));
    assert!(leaves.iter().any(|l| l == "input workpiece_material=carbon_steel"));
    for leaf in e.leaves() {
        assert!(matches!(leaf, ExplanationNode::Input { .. } | ExplanationNode::Fact { .. }));
    }
    let text = e.render(ExplainFormat::Text);
    assert!(text.contains("edge_angle = 12"), "{text}");
    assert!(text.contains("Reduce the angle when cutting is unstable"), "{text}");
    let json: serde_json::Value = serde_json::from_str(&e.render(ExplainFormat::Structured)).unwrap();
    assert!(json["nodes"].as_array().unwrap().len() >= 4);
}

#[test]
fn oracle_solutions_have_no_trace() {
    let m = fixture();
    let ws = Workspace::new(m).unwrap();
    assert!(ws.explanation("0123456789abcdef").is_err());
}

#[test]
fn two_tables_in_one_class_admit_no_solution() {
    let text = EM_MICRO
        .replace("  func rec_angle(Material) : AngleDeg;", "  func rec_angle(Material) : AngleDeg;\n  func rec_angle_b(Material) : AngleDeg;")
        .replace(
            "  life_at(12) = 90;",
            "  AngleKnowHow(rec_angle_b);\n  life_at(10) = 60;\n  life_at(12) = 90;\n  rec_angle_b(carbon_steel) = 10;",
        );
    let m = load_model(&text).unwrap();
    let t = task(&m, "carbon_steel", "min tool_life");
    assert_eq!(forward_chain(&m, &t, &ChainConfig::default()).unwrap().branches.len(), 2);
    let err = solve(&m, &t, &SolveConfig::default()).unwrap_err();
    assert!(matches!(err, SolveError::NoSolution { stage: Stage::SolutionCheck, .. }), "{err:?}");
    assert!(oracle_solutions(&m, &t, &OracleConfig::default()).unwrap().is_empty());
    let conflict = ChainConfig { conflict_mode: true, ..ChainConfig::default() };
    assert!(matches!(forward_chain(&m, &t, &conflict), Err(SolveError::Conflict { .. })));
}

#[test]
fn alternative_recommendations_follow_the_criterion() {
    // A choice relation instead of a single-valued table.
    let text = EM_MICRO
        .replace("  func rec_angle(Material) : AngleDeg;", "  func rec_angle(Material) : AngleDeg;\n  pred angle_option(Material, AngleDeg);")
        .replace("  life_at(12) = 90;", "  angle_option(carbon_steel, 10);\n  angle_option(carbon_steel, 12);\n  life_at(10) = 60;\n  life_at(12) = 90;")
        .replace("  AngleKnowHow(f^2) -> f^2(workpiece_material) = edge_angle;", "  angle_option(workpiece_material, edge_angle);");
    let m = load_model(&text).unwrap();
    for (criterion, expected) in [("min tool_life", sol(10, 60)), ("max tool_life", sol(12, 90))] {
        let t = task(&m, "carbon_steel", criterion);
        let out = solve(&m, &t, &SolveConfig::default()).unwrap();
        assert_eq!(out.set.solutions, std::slice::from_ref(&expected), "{criterion}");
        assert_eq!(oracle_solutions(&m, &t, &OracleConfig::default()).unwrap().solutions, [expected]);
    }
    let none = solve(&m, &task(&m, "carbon_steel", "none"), &SolveConfig::default()).unwrap();
    assert_eq!(none.set.len(), 2);
}

// ---- know-how ----

const REC_ANGLE_TABLE: &str = "id: rec_angle_t\ntitle: End mill edge angles recommended to prolong tool life\nusage: Reduce the angle when cutting is unstable\nsource: Synthetic catalogue data\nconditions: material:Material\nresults: angle:AngleDeg\n---\nmaterial,angle\ncarbon_steel,12\nalloy_steel,8\n";

/// EM-micro without its table, class and bridge.
fn base_without_table() -> DomainModel {
    let text = EM_MICRO
        .replace("  f : order 2 : func(Material) -> AngleDeg;\n", "")
        .replace("  pred AngleKnowHow(symbols 2);\n", "")
        .replace("  func rec_angle(Material) : AngleDeg;\n", "")
        .replace("  AngleKnowHow(rec_angle);\n", "")
        .replace("  rec_angle(alloy_steel) = 8 @ rec_angle:2;\n  rec_angle(carbon_steel) = 12 @ rec_angle:1;\n", "")
        .replace("  AngleKnowHow(f^2) -> f^2(workpiece_material) = edge_angle;\n", "")
        .replace("vars {\n}\n", "");
    let start = text.find("knowhow rec_angle").unwrap();
    let end = start + text[start..].find("}\n").unwrap() + 2;
    let text = format!("{}{}", &text[..start], &text[end..]);
    load_model(&text).unwrap()
}

#[test]
fn compiling_the_fixture_table_reproduces_the_fixture() {
    let base = base_without_table();
    let table = KnowHowTable::parse(REC_ANGLE_TABLE).unwrap();
    let delta = compile_knowhow(&base, &table, &KnowHowBinding::results(&[("angle", "edge_angle")]), "AngleKnowHow").unwrap();
    assert_eq!(delta.symbols.len(), 2);
    assert_eq!(delta.facts.iter().filter(|f| f.value.is_some()).count(), 2);
    assert_eq!(delta.class_memberships().count(), 1);
    assert_eq!(delta.formulas.len(), 1);
    let compiled = add_facts(&base, &delta).unwrap();

    // Equal to the fixture up to the names of the table symbol and bridge variable.
    let renamed = save_model(&compiled)
        .replace("kh_rec_angle_t_angle", "rec_angle")
        .replace("kh_f_AngleKnowHow_edge_angle", "f")
        .replace("@ rec_angle_t:", "@ rec_angle:")
        .replace("knowhow rec_angle_t", "knowhow rec_angle");
    let expected = save_model(&fixture());
    let strip = |s: &str| {
        s.lines()
            .filter(|l| !l.trim_start().starts_with("symbols") && !l.contains("title") && !l.contains("usage") && !l.contains("source"))
            .map(str::to_string)
            .collect::<BTreeSet<_>>()
    };
    let structural = |s: &str| {
        strip(s).into_iter().filter(|l| !l.contains("->") || l.contains("order")).collect::<BTreeSet<_>>()
    };
    assert_eq!(structural(&renamed), structural(&expected));
    let bridge = compiled.formulas().iter().find(|f| f.text().contains("AngleKnowHow")).unwrap().text();
    assert_eq!(
        bridge.replace("kh_f_AngleKnowHow_edge_angle", "f"),
        fixture().formulas()[0].text()
    );
    let t = task(&compiled, "carbon_steel", "max tool_life");
    assert_eq!(solve(&compiled, &t, &SolveConfig::default()).unwrap().set.solutions, [sol(12, 90)]);
}

#[test]
fn knowhow_rows_must_be_on_scale() {
    let base = base_without_table();
    let table = KnowHowTable::parse(&REC_ANGLE_TABLE.replace("alloy_steel,8", "titanium,9")).unwrap();
    let err = compile_knowhow(&base, &table, &KnowHowBinding::results(&[("angle", "edge_angle")]), "AngleKnowHow");
    assert!(matches!(err, Err(KnowHowError::ScaleMismatch(_))), "{err:?}");
    let unbound = compile_knowhow(&base, &KnowHowTable::parse(REC_ANGLE_TABLE).unwrap(), &KnowHowBinding::default(), "C");
    assert!(matches!(unbound, Err(KnowHowError::UnboundResultColumn(_))));
}

#[test]
fn two_row_table_gives_one_symbol_and_three_facts() {
    let base = base_without_table();
    let table = KnowHowTable::parse(REC_ANGLE_TABLE).unwrap();
    let delta = compile_knowhow(&base, &table, &KnowHowBinding::results(&[("angle", "edge_angle")]), "AngleKnowHow").unwrap();
    let functions: Vec<_> = delta.symbols.iter().filter(|s| s.kind == knowbase::model::SymbolKind::Func).collect();
    assert_eq!(functions.len(), 1);
    assert_eq!(delta.facts.len(), 3);
    assert!(delta.formulas.len() <= 1);
    let again = add_facts(&base, &delta).unwrap();
    let second = compile_knowhow(&again, &table, &KnowHowBinding::results(&[("angle", "edge_angle")]), "AngleKnowHow");
    assert!(matches!(second, Err(KnowHowError::DuplicateTableId(_))));
}

#[test]
fn empty_delta_is_identity_and_redeclaration_clashes() {
    let m = fixture();
    let same = add_facts(&m, &ModelDelta::default()).unwrap();
    assert_eq!(save_model(&same), save_model(&m));
    let t = task(&m, "carbon_steel", "none");
    let a = oracle_solutions(&m, &t, &OracleConfig::default()).unwrap();
    let b = oracle_solutions(&same, &t, &OracleConfig::default()).unwrap();
    assert!(compare_solution_sets(&a, &b).unwrap().is_empty());
    let clash = ModelDelta {
        symbols: vec![SymbolDecl::function("rec_angle", 2, vec![CarrierRef::Scale(name("Material"))], CarrierRef::Scale(name("AngleDeg")))],
        ..ModelDelta::default()
    };
    assert!(matches!(add_facts(&m, &clash), Err(KnowHowError::Model(ModelError::NameClash(_)))));
}

fn record(angle: i64, accepted: bool) -> DecisionRecord {
    DecisionRecord {
        task: name("demo"),
        inputs: [(name("workpiece_material"), Value::enumerated("carbon_steel"))].into_iter().collect(),
        outputs: [(name("edge_angle"), Value::int(angle)), (name("tool_life"), Value::int(90))].into_iter().collect(),
        accepted,
        timestamp: 0,
        comment: String::new(),
    }
}

#[test]
fn feedback_becomes_precedent_tuples() {
    let m = fixture();
    let delta = ingest_feedback(&m, &record(12, true)).unwrap();
    assert_eq!(delta.facts.len(), 1);
    assert!(delta.formulas.is_empty());
    assert_eq!(delta.facts[0].args.last(), Some(&Value::enumerated("accepted")));
    let m2 = add_facts(&m, &delta).unwrap();
    let rejected = ingest_feedback(&m2, &record(12, false)).unwrap();
    assert_eq!(rejected.facts.len(), 1);
    assert_eq!(rejected.facts[0].args.last(), Some(&Value::enumerated("rejected")));
    assert!(rejected.symbols.is_empty() && rejected.scales.is_empty());
    let m3 = add_facts(&m2, &rejected).unwrap();
    assert!(matches!(m3.fact("precedent_demo"), Some(knowbase::model::Interp::Pred(t)) if t.len() == 2));
    let off = ingest_feedback(&m, &record(99, true));
    assert!(matches!(off, Err(KnowHowError::Model(ModelError::PertinencyFailed { .. }))), "{off:?}");
}

// ---- validation ----

#[test]
fn fixture_validates_clean() {
    let m = fixture();
    assert!(validate_pertinency(m.draft()).is_empty());
    let c = validate_completeness(m.draft());
    assert!(c.iter().all(|d| !d.is_error()), "{c:?}");
    assert!(c.iter().all(|d| d.code != Code::Unused), "{c:?}");
    let probe = task(&m, "carbon_steel", "none");
    assert!(validate_consistency(&m, Some(&probe), &OracleConfig::default()).unwrap().is_empty());
}

#[test]
fn off_scale_fact_yields_one_scale_error() {
    let mut draft = fixture().into_draft();
    draft.facts.retain(|f| !(f.symbol.as_ref() == "rec_angle" && f.args == [Value::enumerated("carbon_steel")]));
    draft.facts.push(FactEntry {
        level: 2,
        symbol: name("rec_angle"),
        args: vec![Value::enumerated("carbon_steel")],
        value: Some(Value::int(77)),
        origin: None,
    });
    let d = validate_pertinency(&draft);
    assert_eq!(d.len(), 1, "{d:?}");
    assert_eq!(d[0].code, Code::Scale);
    assert_eq!(d[0].witness.as_deref(), Some("rec_angle(carbon_steel) = 77"));
}

#[test]
fn fact_over_deleted_scale_yields_one_scale_error() {
    let mut draft = fixture().into_draft();
    draft.scales.remove("Minutes");
    let d = validate_pertinency(&draft);
    assert_eq!(d.len(), 1, "{d:?}");
    assert_eq!(d[0].code, Code::Scale);
}

#[test]
fn undeclared_symbol_in_formula() {
    let mut draft = fixture().into_draft();
    draft.formulas.push(knowbase::model::FormulaSource::new("spindle_speed > 100"));
    let d: Vec<_> = validate_completeness(&draft).into_iter().filter(|d| d.is_error()).collect();
    assert_eq!(d.len(), 1, "{d:?}");
    assert_eq!(d[0].code, Code::Undeclared);
}

#[test]
fn unreferenced_unknown_is_unused() {
    let m = variant("  const tool_life : Minutes;", "  const tool_life : Minutes;\n  const coolant : Minutes;");
    let d: Vec<_> = validate_completeness(m.draft()).into_iter().filter(|d| d.code == Code::Unused).collect();
    assert_eq!(d.len(), 1);
    assert_eq!(d[0].location, "symbol coolant");
}

#[test]
fn contradicting_bound_is_reported_with_witness() {
    let m = variant("tool_life > 0;", "tool_life > 0;\n  edge_angle > 40;");
    let probe = task(&m, "carbon_steel", "none");
    let d = validate_consistency(&m, Some(&probe), &OracleConfig::default()).unwrap();
    assert!(!d.is_empty());
    assert!(d.iter().all(|x| x.code == Code::NoSolution && x.witness.is_some()), "{d:?}");
    assert!(d.iter().any(|x| x.message.contains("AngleKnowHow")), "{d:?}");
    assert!(d.iter().any(|x| x.message.contains("edge_angle > 40")), "{d:?}");
}

#[test]
fn ground_falsity_is_inconsistent() {
    let m = variant("tool_life > 0;", "tool_life > 0;\n  12 > 13;");
    let d = validate_consistency(&m, None, &OracleConfig::default()).unwrap();
    assert_eq!(d.len(), 1, "{d:?}");
    assert_eq!(d[0].code, Code::Inconsistent);
    assert!(d[0].witness.is_some());
}

#[test]
fn report_lines_are_tab_separated() {
    let mut draft = fixture().into_draft();
    draft.formulas.push(knowbase::model::FormulaSource::new("spindle_speed > 100"));
    let d = validate_model(&draft);
    let report = knowbase::validation::render_report(&d);
    let first = report.lines().next().unwrap();
    assert_eq!(first.split('\t').count(), 3, "{first}");
    assert!(first.starts_with("E-UNDECL\tformula 4\t"));
}

// ---- persistence ----

#[test]
fn save_load_round_trip() {
    let m = fixture();
    let text = save_model(&m);
    assert_eq!(save_model(&load_model(&text).unwrap()), text);
    let again = load_model(&text).unwrap();
    let t = task(&m, "carbon_steel", "max tool_life");
    let a = solve(&m, &t, &SolveConfig::default()).unwrap().set;
    let b = solve(&again, &TaskSpec::named(&again, "demo").unwrap(), &SolveConfig::default()).unwrap().set;
    assert!(compare_solution_sets(&a, &b).unwrap().is_empty());
    assert_eq!(m.hash(), again.hash());
}

#[test]
fn truncated_file_is_a_parse_error() {
    let cut = &EM_MICRO[..EM_MICRO.find("formulas {").unwrap() + 20];
    let err = load_model(cut).unwrap_err();
    assert!(matches!(err, LoadError::Parse { .. }), "{err:?}");
    assert!(err.position().is_some());
}

#[test]
fn type_errors_carry_formula_positions() {
    let text = EM_MICRO.replace("tool_life > 0;", "tool_life > carbon_steel;");
    let err = load_model(&text).unwrap_err();
    let line = EM_MICRO.lines().position(|l| l.contains("tool_life > 0;")).unwrap() + 1;
    assert_eq!(err.position(), Some((line, 3)), "{err}");
}

// ---- sub-models ----

#[test]
fn full_keep_set_extracts_the_fixture() {
    let m = fixture();
    let keep: BTreeSet<_> = ["edge_angle", "workpiece_material", "tool_life"].map(name).into_iter().collect();
    let sub = extract_submodel(&m, &keep).unwrap();
    assert_eq!(save_model(&sub), save_model(&m));
}

#[test]
fn projection_drops_the_life_formula() {
    let m = fixture();
    let keep: BTreeSet<_> = ["edge_angle", "workpiece_material"].map(name).into_iter().collect();
    let sub = extract_submodel(&m, &keep).unwrap();
    assert!(sub.formulas().iter().all(|f| !f.text().contains("tool_life")));
    assert!(sub.symbol("tool_life").is_none());
    for material in ["carbon_steel", "alloy_steel"] {
        let mk = |model: &DomainModel| {
            TaskSpec::with_constants(model, "p", &[("workpiece_material", Value::enumerated(material))], &["edge_angle"], Criterion::None)
                .unwrap()
        };
        let a = oracle_solutions(&m, &mk(&m), &OracleConfig::default()).unwrap();
        let b = oracle_solutions(&sub, &mk(&sub), &OracleConfig::default()).unwrap();
        assert!(compare_solution_sets(&a, &b).unwrap().is_empty(), "{material}");
        assert_eq!(a.len(), 1);
    }
}

#[test]
fn dropping_a_needed_class_dangles() {
    let m = fixture();
    let keep: BTreeSet<_> = ["edge_angle", "workpiece_material"].map(name).into_iter().collect();
    let exclude: BTreeSet<_> = [name("AngleKnowHow")].into_iter().collect();
    let err = extract_submodel_excluding(&m, &keep, &exclude).unwrap_err();
    assert!(matches!(err, knowbase::workspace::SubmodelError::DanglingDependency { .. }), "{err:?}");
}

#[test]
fn checks_over_derived_values_are_not_warned() {
    let m = variant("tool_life > 0;", "tool_life > 0;\n  ~(edge_angle > 40);");
    assert!(validate_model(m.draft()).is_empty());
    let lonely = variant("  const tool_life : Minutes;", "  const tool_life : Minutes;\n  const coolant : Minutes;");
    let lonely = variant_of(&lonely, "tool_life > 0;", "tool_life > 0;\n  coolant > 5;");
    let d = validate_model(lonely.draft());
    assert_eq!(d.iter().map(|x| x.code).collect::<Vec<_>>(), [Code::Unconvertible], "{d:?}");
}

fn variant_of(model: &DomainModel, from: &str, to: &str) -> DomainModel {
    load_model(&save_model(model).replacen(from, to, 1)).unwrap()
}
