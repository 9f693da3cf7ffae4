//! Random desk-scale models for the equivalence sweeps.
//!
//! Models are shaped like compiled know-how: every output gets a defining
//! formula over earlier unknowns (a table lookup, a stored relation, a
//! threshold split, arithmetic or an order-2 class bridge) and a few check
//! formulas constrain the result. Bounds: at most 4 scales of at most 8
//! values, 6 level-1 constants, 12 formulas, order 2.

#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const MAX_SCALES: usize = 4;
pub const MAX_VALUES: usize = 8;
pub const MAX_CONSTS: usize = 6;
pub const MAX_FORMULAS: usize = 12;

#[derive(Clone, Debug)]
struct ScaleGen {
    name: String,
    values: Vec<String>,
    numeric: bool,
}

#[derive(Default)]
struct Text {
    layer: Vec<String>,
    facts: Vec<String>,
    vars: Vec<String>,
    formulas: Vec<String>,
    fresh: usize,
}

impl Text {
    fn fresh(&mut self, prefix: &str) -> String {
        self.fresh += 1;
        format!("{prefix}{}", self.fresh)
    }
}

/// Summary of what a generated model contains.
#[derive(Clone, Debug, Default)]
pub struct Shape {
    pub scales: usize,
    pub consts: usize,
    pub formulas: usize,
    pub order: u8,
    pub bridges: usize,
}

pub struct Generated {
    pub text: String,
    pub shape: Shape,
}

/// The model text for `seed`, with one stored task named `t`.
pub fn random_model(seed: u64) -> Generated {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scales: Vec<ScaleGen> = (0..rng.gen_range(2..=MAX_SCALES))
        .map(|i| {
            let k = rng.gen_range(2..=MAX_VALUES);
            if rng.gen_bool(0.5) {
                ScaleGen { name: format!("S{i}"), values: (0..k).map(|j| format!("s{i}v{j}")).collect(), numeric: false }
            } else {
                let lo: i64 = rng.gen_range(0..5);
                let step: i64 = *[1, 2, 5].choose(&mut rng).unwrap();
                ScaleGen {
                    name: format!("S{i}"),
                    values: (0..k as i64).map(|j| (lo + j * step).to_string()).collect(),
                    numeric: true,
                }
            }
        })
        .collect();
    let n_consts = rng.gen_range(3..=MAX_CONSTS);
    let consts: Vec<(String, usize)> = (0..n_consts).map(|i| (format!("c{i}"), rng.gen_range(0..scales.len()))).collect();
    let n_inputs = rng.gen_range(1..=2);
    let order: u8 = if rng.gen_bool(0.6) { 2 } else { 1 };
    let fact_layer = if order == 2 { 2 } else { 0 };

    let mut t = Text::default();
    let mut bridges = 0;
    // Defining formulas.
    for i in n_inputs..n_consts {
        let (o, so) = (&consts[i].0, &scales[consts[i].1]);
        let (src, ss) = {
            let j = rng.gen_range(0..i);
            (&consts[j].0, &scales[consts[j].1])
        };
        let room = MAX_FORMULAS - t.formulas.len() - (n_consts - i - 1);
        let mut kinds = vec!["lookup", "relation"];
        if room >= 2 {
            kinds.push("split");
        }
        if ss.numeric && so.numeric {
            kinds.push("arith");
        }
        if order == 2 {
            kinds.extend(["bridge", "bridge"]);
        }
        match *kinds.choose(&mut rng).unwrap() {
            "lookup" => {
                let f = t.fresh("f");
                t.layer.push(format!("func {f}({}) : {}", ss.name, so.name));
                for v in &ss.values {
                    if rng.gen_bool(0.95) {
                        t.facts.push(format!("{f}({v}) = {}", so.values.choose(&mut rng).unwrap()));
                    }
                }
                t.formulas.push(format!("{o} = {f}({src})"));
            }
            "relation" => {
                let p = t.fresh("p");
                t.layer.push(format!("pred {p}({}, {})", ss.name, so.name));
                for v in &ss.values {
                    let n = *[1, 1, 2, 2, 3].choose(&mut rng).unwrap();
                    for w in so.values.choose_multiple(&mut rng, n) {
                        t.facts.push(format!("{p}({v}, {w})"));
                    }
                }
                t.formulas.push(format!("{p}({src}, {o})"));
            }
            "split" => {
                let v = ss.values.choose(&mut rng).unwrap();
                let a = so.values.choose(&mut rng).unwrap();
                let b = so.values.choose(&mut rng).unwrap();
                t.formulas.push(format!("{src} = {v} -> {o} = {a}"));
                t.formulas.push(format!("~({src} = {v}) -> {o} = {b}"));
            }
            "arith" => {
                let k: i64 = rng.gen_range(-3..=3);
                let op = if k < 0 { "-" } else { "+" };
                t.formulas.push(format!("{o} = {src} {op} {}", k.abs()));
            }
            _ => {
                bridges += 1;
                let class = t.fresh("K");
                let g = t.fresh("g");
                t.layer.push(format!("pred {class}(symbols 2)"));
                t.vars.push(format!("{g} : order 2 : func({}) -> {}", ss.name, so.name));
                let members = if rng.gen_bool(0.75) { 1 } else { 2 };
                for m in 0..members + 1 {
                    let h = t.fresh("h");
                    t.layer.push(format!("func {h}({}) : {}", ss.name, so.name));
                    for v in &ss.values {
                        if rng.gen_bool(0.9) {
                            t.facts.push(format!("{h}({v}) = {}", so.values.choose(&mut rng).unwrap()));
                        }
                    }
                    // The last one has the right shape but is not a member.
                    if m < members {
                        t.facts.push(format!("{class}({h})"));
                    }
                }
                t.formulas.push(format!("{class}({g}^2) -> {g}^2({src}) = {o}"));
            }
        }
    }
    // Check formulas.
    let outputs: Vec<usize> = (n_inputs..n_consts).collect();
    let pick_value = |rng: &mut ChaCha8Rng, c: usize| scales[consts[c].1].values.choose(rng).unwrap().clone();
    let checks = rng.gen_range(0..=2).min(MAX_FORMULAS - t.formulas.len());
    for _ in 0..checks {
        let a = *outputs.choose(&mut rng).unwrap();
        let b = rng.gen_range(0..n_consts);
        let (va, vb) = (pick_value(&mut rng, a), pick_value(&mut rng, b));
        let (ca, cb) = (&consts[a].0, &consts[b].0);
        let numeric = scales[consts[a].1].numeric;
        let f = match rng.gen_range(0..5) {
            0 => format!("{ca} ~= {va}"),
            1 if numeric => format!("{ca} {} {va}", ["<=", ">=", "<", ">"].choose(&mut rng).unwrap()),
            1 | 2 => format!("{ca} = {va} | {cb} = {vb}"),
            3 => format!("~({ca} = {va} & {cb} = {vb})"),
            _ => format!("{cb} = {vb} -> {ca} ~= {va}"),
        };
        t.formulas.push(f);
    }

    let criterion = {
        let numeric: Vec<usize> = outputs.iter().copied().filter(|&c| scales[consts[c].1].numeric).collect();
        match rng.gen_range(0..4) {
            0 | 1 if !numeric.is_empty() => {
                let c = &consts[*numeric.choose(&mut rng).unwrap()].0;
                format!("{} {c}", if rng.gen_bool(0.5) { "maximize" } else { "minimize" })
            }
            2 => {
                let a = *outputs.choose(&mut rng).unwrap();
                format!("predicate ~({} = {})", consts[a].0, pick_value(&mut rng, a))
            }
            _ => "none".to_string(),
        }
    };

    let mut text = format!("order {order};\n\nscales {{\n");
    for s in &scales {
        if s.numeric {
            let step = if s.values.len() > 1 {
                s.values[1].parse::<i64>().unwrap() - s.values[0].parse::<i64>().unwrap()
            } else {
                1
            };
            text += &format!("  {} = int {} .. {} step {step};\n", s.name, s.values[0], s.values.last().unwrap());
        } else {
            text += &format!("  {} = enum {{ {} }};\n", s.name, s.values.join(", "));
        }
    }
    text += "}\n\n";
    if !t.vars.is_empty() {
        text += &format!("vars {{\n{}}}\n\n", t.vars.iter().map(|v| format!("  {v};\n")).collect::<String>());
    }
    text += "layer 1 {\n";
    for (c, s) in &consts {
        text += &format!("  const {c} : {};\n", scales[*s].name);
    }
    text += "}\n\n";
    if !t.layer.is_empty() {
        text += &format!("layer {fact_layer} {{\n{}}}\n\n", t.layer.iter().map(|d| format!("  {d};\n")).collect::<String>());
    }
    if !t.facts.is_empty() {
        text += &format!("facts {fact_layer} {{\n{}}}\n\n", t.facts.iter().map(|f| format!("  {f};\n")).collect::<String>());
    }
    text += &format!("formulas {{\n{}}}\n\n", t.formulas.iter().map(|f| format!("  {f};\n")).collect::<String>());
    text += "task t {\n";
    for (c, s) in consts.iter().take(n_inputs) {
        let v = scales[*s].values.choose(&mut rng).unwrap();
        text += &format!("  input {c} = {v};\n");
    }
    let outs: Vec<&str> = outputs.iter().map(|&i| consts[i].0.as_str()).collect();
    text += &format!("  output {};\n  criterion {criterion};\n}}\n", outs.join(", "));

    let shape = Shape { scales: scales.len(), consts: n_consts, formulas: t.formulas.len(), order, bridges };
    Generated { text, shape }
}
