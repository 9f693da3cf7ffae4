//! The `knowbase` binary, run against workspace files in a scratch directory.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const EM_MICRO: &str = include_str!("../../core/examples/em-micro.model");

struct Scratch {
    dir: TempDir,
}

impl Scratch {
    fn with_fixture() -> Self {
        let dir = TempDir::new().unwrap();
        std::fs::write(dir.path().join("knowbase.model"), EM_MICRO).unwrap();
        Scratch { dir }
    }

    fn path(&self, file: &str) -> PathBuf {
        self.dir.path().join(file)
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_knowbase"))
            .current_dir(self.dir.path())
            .env_remove("KNOWBASE_MODEL")
            .args(args)
            .output()
            .unwrap()
    }

    fn write(&self, file: &str, text: &str) -> PathBuf {
        let p = self.path(file);
        std::fs::write(&p, text).unwrap();
        p
    }
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn validate_on_the_fixture_is_clean() {
    let s = Scratch::with_fixture();
    let o = s.run(&["validate"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "");
}

#[test]
fn solve_with_oracle_reports_identical() {
    let s = Scratch::with_fixture();
    let o = s.run(&["solve", "--task", "demo", "--oracle"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("edge_angle=12 tool_life=90"), "{out}");
    assert!(out.trim_end().ends_with("oracle: identical"), "{out}");
}

#[test]
fn missing_task_fails_with_unknown_task() {
    let s = Scratch::with_fixture();
    let o = s.run(&["solve", "--task", "missing"]);
    assert_ne!(o.status.code(), Some(0));
    assert!(stderr(&o).starts_with("E-UNDECL\ttask missing\tunknown task `missing`"), "{}", stderr(&o));
}

#[test]
fn explain_finds_solutions_by_id() {
    let s = Scratch::with_fixture();
    let out = stdout(&s.run(&["solve", "--task", "demo"]));
    let id = out.lines().nth(1).unwrap().split('\t').next().unwrap().to_string();
    let text = s.run(&["explain", &id]);
    assert!(text.status.success());
    assert!(stdout(&text).contains("[table rec_angle, row 1]"), "{}", stdout(&text));
    let structured = s.run(&["explain", &id, "--format", "structured"]);
    let json: serde_json::Value = serde_json::from_slice(&structured.stdout).unwrap();
    assert_eq!(json["solutionId"], id.as_str());
    assert_eq!(s.run(&["explain", "nope"]).status.code(), Some(3));
}

#[test]
fn criterion_and_input_overrides() {
    let s = Scratch::with_fixture();
    let o = s.run(&["solve", "--task", "demo", "--input", "workpiece_material=alloy_steel", "--criterion", "none"]);
    // No life lookup exists for 8 degrees.
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("NoDerivation(tool_life)"), "{}", stderr(&o));
    let o = s.run(&["solve", "--task", "demo", "--input", "workpiece_material=carbon_steel", "--criterion", "minimize edge_angle"]);
    assert!(stdout(&o).contains("edge_angle=12 tool_life=90"), "{}", stderr(&o));
    let o = s.run(&["solve", "--task", "demo", "--criterion", "predicate edge_angle = 40"]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    assert!(stderr(&o).starts_with("E-NOSOL"));
}

#[test]
fn scales_and_ontology_extend_the_model() {
    let s = Scratch::with_fixture();
    assert!(s.run(&["scales", "add", r#"Rpm = int 0 .. 20000 step 100 unit "1/min""#]).status.success());
    assert!(s.run(&["ontology", "declare", "--layer", "1", "const spindle : Rpm"]).status.success());
    assert!(stdout(&s.run(&["scales", "list"])).contains("Rpm = int 0 .. 20000 step 100"));
    assert!(stdout(&s.run(&["ontology", "list"])).contains("layer 1 const spindle : Rpm"));
    let o = s.run(&["validate"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("W-UNUSED\tsymbol spindle"));

    let clash = s.run(&["ontology", "declare", "--layer", "1", "const spindle : Rpm"]);
    assert_ne!(clash.status.code(), Some(0));
    let undeclared = s.run(&["ontology", "declare", "--layer", "1", "const feed : Nowhere"]);
    assert_ne!(undeclared.status.code(), Some(0));
}

#[test]
fn knowhow_add_rejects_off_scale_rows_and_keeps_the_file() {
    let s = Scratch::with_fixture();
    let table = "id: rec_angle_b
title: Extra angles
conditions: material:Material
results: angle:AngleDeg
class: AngleKnowHow
bind: angle=edge_angle
---
material,angle
carbon_steel,99
";
    let before = read(&s.path("knowbase.model"));
    let bad = s.write("bad.table", table);
    let o = s.run(&["knowhow", "add", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("E-SCALE\ttable rec_angle_b"), "{}", stderr(&o));
    assert_eq!(read(&s.path("knowbase.model")), before);

    let good = s.write("good.table", &table.replace("99", "12"));
    let o = s.run(&["knowhow", "add", good.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&s.run(&["knowhow", "list"])).starts_with("rec_angle_b\t1 row(s)"));
    assert!(stdout(&s.run(&["facts", "list", "--symbol", "kh_rec_angle_b_angle"])).contains("rec_angle_b:1"));
    assert!(s.run(&["solve", "--task", "demo", "--oracle"]).status.success());
}

#[test]
fn export_import_round_trip() {
    let s = Scratch::with_fixture();
    let first = stdout(&s.run(&["export"]));
    let copy = s.write("copy.model", &first);
    let o = s.run(&["--model", "other.model", "import", copy.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&s.run(&["--model", "other.model", "export"])), first);
    let truncated = s.write("cut.model", &first[..first.len() / 2]);
    assert_eq!(s.run(&["--model", "x.model", "import", truncated.to_str().unwrap()]).status.code(), Some(6));
}

#[test]
fn demo_pack_solves_with_oracle_check() {
    let s = Scratch::with_fixture();
    assert!(s.run(&["demo", "--out", "pack.model"]).status.success());
    let o = s.run(&["-m", "pack.model", "validate", "--probe", "time"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = s.run(&["-m", "pack.model", "solve", "--task", "time", "--oracle", "--budget", "unlimited", "--sequential"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("oracle: identical"));
    let o = s.run(&["-m", "pack.model", "solve", "--task", "time", "--oracle"]);
    assert_eq!(o.status.code(), Some(5), "the default budget cannot cover the pack");
}
